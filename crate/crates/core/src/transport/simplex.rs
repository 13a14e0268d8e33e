//! Bounded-variable primal simplex for the maximum-cost transportation
//! problem, in its spanning-tree (network) form.
//!
//! Rows are supply nodes, columns demand nodes, and every admissible cell is
//! an arc with bounds `0 <= x <= min(supply, demand)`. Flows are kept in exact
//! rational arithmetic so every iterate satisfies the marginal equalities
//! exactly; only reduced costs, which steer the pivots, are floating point.
//! Bland's rule (lowest eligible index entering, lowest blocking index
//! leaving) rules out cycling on degenerate pivots.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Reduced costs below this (relative to the largest cost) count as zero.
pub(crate) const REDUCED_COST_TOLERANCE: f64 = 1e-9;

pub(crate) struct Transportation<'a> {
    pub supply: &'a [BigRational],
    pub demand: &'a [BigRational],
    /// `(row, column)` of each admissible cell.
    pub cells: &'a [(usize, usize)],
    pub cost: &'a [f64],
}

struct Tree {
    in_basis: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
}

impl Tree {
    fn insert(&mut self, arc: usize, ends: (usize, usize)) {
        self.in_basis[arc] = true;
        self.adjacency[ends.0].push(arc);
        self.adjacency[ends.1].push(arc);
    }

    fn remove(&mut self, arc: usize, ends: (usize, usize)) {
        self.in_basis[arc] = false;
        self.adjacency[ends.0].retain(|&a| a != arc);
        self.adjacency[ends.1].retain(|&a| a != arc);
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

impl Transportation<'_> {
    fn rows(&self) -> usize {
        self.supply.len()
    }

    fn nodes(&self) -> usize {
        self.supply.len() + self.demand.len()
    }

    /// Node indices of an arc: rows first, then columns.
    fn ends(&self, arc: usize) -> (usize, usize) {
        let (i, j) = self.cells[arc];
        (i, self.rows() + j)
    }

    fn upper(&self, arc: usize) -> BigRational {
        let (i, j) = self.cells[arc];
        if self.supply[i] < self.demand[j] {
            self.supply[i].clone()
        } else {
            self.demand[j].clone()
        }
    }

    fn other_end(&self, arc: usize, node: usize) -> usize {
        let (a, b) = self.ends(arc);
        if a == node {
            b
        } else {
            a
        }
    }

    /// Arcs on the tree path from `from` to `to`, in walking order.
    fn tree_path(&self, tree: &Tree, from: usize, to: usize) -> Vec<usize> {
        let mut via = vec![usize::MAX; self.nodes()];
        let mut seen = vec![false; self.nodes()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &arc in &tree.adjacency[v] {
                let w = self.other_end(arc, v);
                if !seen[w] {
                    seen[w] = true;
                    via[w] = arc;
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let arc = via[v];
            assert!(arc != usize::MAX, "nodes lie in the same tree");
            path.push(arc);
            v = self.other_end(arc, v);
        }
        path.reverse();
        path
    }

    /// Pushes flow around the cycle closed by `arc` (oriented row -> column)
    /// and the tree path back from its column to its row. `direction` is the
    /// sign applied to `arc`; path arcs alternate starting with the opposite
    /// sign. Returns the step length and the blocking arc with lowest index.
    fn cycle_step(
        &self,
        flow: &[BigRational],
        arc: usize,
        direction: bool,
        path: &[usize],
    ) -> (BigRational, usize, Vec<(usize, bool)>) {
        let mut signed = vec![(arc, direction)];
        signed.extend(path.iter().enumerate().map(|(k, &a)| (a, (k % 2 == 1) == direction)));
        let mut best: Option<(BigRational, usize)> = None;
        for &(a, up) in &signed {
            let room = if up { self.upper(a) - &flow[a] } else { flow[a].clone() };
            let better = match &best {
                None => true,
                Some((theta, idx)) => room < *theta || (room == *theta && a < *idx),
            };
            if better {
                best = Some((room, a));
            }
        }
        let (theta, leaving) = best.expect("cycle is nonempty");
        (theta, leaving, signed)
    }

    fn apply(flow: &mut [BigRational], signed: &[(usize, bool)], theta: &BigRational) {
        for &(a, up) in signed {
            if up {
                flow[a] += theta;
            } else {
                flow[a] -= theta;
            }
        }
    }

    /// Turns a feasible flow into a basic one: free arcs (strictly between
    /// their bounds) are made acyclic, then completed to spanning trees.
    fn initial_basis(&self, flow: &mut [BigRational]) -> Tree {
        let free = |flow: &[BigRational], a: usize| flow[a].is_positive() && flow[a] < self.upper(a);
        'restart: loop {
            let mut uf = UnionFind((0..self.nodes()).collect());
            let mut tree = Tree {
                in_basis: vec![false; self.cells.len()],
                adjacency: vec![Vec::new(); self.nodes()],
            };
            for a in 0..self.cells.len() {
                if !free(flow, a) {
                    continue;
                }
                let (r, c) = self.ends(a);
                if uf.union(r, c) {
                    tree.insert(a, (r, c));
                    continue;
                }
                let path = self.tree_path(&tree, c, r);
                let (theta, _, signed) = self.cycle_step(flow, a, true, &path);
                Self::apply(flow, &signed, &theta);
                continue 'restart;
            }
            let mut uf = UnionFind((0..self.nodes()).collect());
            for a in 0..self.cells.len() {
                if tree.in_basis[a] {
                    let (r, c) = self.ends(a);
                    uf.union(r, c);
                }
            }
            for a in 0..self.cells.len() {
                let (r, c) = self.ends(a);
                if !tree.in_basis[a] && uf.union(r, c) {
                    tree.insert(a, (r, c));
                }
            }
            return tree;
        }
    }

    fn potentials(&self, tree: &Tree) -> Vec<f64> {
        let mut pot = vec![f64::NAN; self.nodes()];
        for root in 0..self.nodes() {
            if !pot[root].is_nan() {
                continue;
            }
            pot[root] = 0.0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &arc in &tree.adjacency[v] {
                    let w = self.other_end(arc, v);
                    if pot[w].is_nan() {
                        // pot[row] + pot[col] = cost on basic arcs
                        pot[w] = self.cost[arc] - pot[v];
                        queue.push_back(w);
                    }
                }
            }
        }
        pot
    }

    /// Maximizes `sum cost * x` starting from the feasible flow `initial`.
    pub fn maximize(&self, initial: Vec<BigRational>) -> Result<Vec<BigRational>> {
        let mut flow = initial;
        let mut tree = self.initial_basis(&mut flow);
        let scale = self.cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let tolerance = REDUCED_COST_TOLERANCE * scale;
        let limit = 1000 * (self.cells.len() + 10);

        for _ in 0..limit {
            let pot = self.potentials(&tree);
            let entering = (0..self.cells.len()).find_map(|a| {
                if tree.in_basis[a] {
                    return None;
                }
                let (r, c) = self.ends(a);
                let reduced = self.cost[a] - pot[r] - pot[c];
                if flow[a].is_zero() && reduced > tolerance {
                    Some((a, true))
                } else if !flow[a].is_zero() && reduced < -tolerance {
                    Some((a, false))
                } else {
                    None
                }
            });
            let Some((arc, increase)) = entering else {
                return Ok(flow);
            };
            let (r, c) = self.ends(arc);
            let path = self.tree_path(&tree, c, r);
            let (theta, leaving, signed) = self.cycle_step(&flow, arc, increase, &path);
            Self::apply(&mut flow, &signed, &theta);
            if leaving != arc {
                tree.remove(leaving, self.ends(leaving));
                tree.insert(arc, (r, c));
            }
        }
        Err(Error::Solver(format!(
            "transportation simplex did not converge within {limit} pivots"
        )))
    }
}

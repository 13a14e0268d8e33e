//! Dinic's maximum flow over exact rationals.
//!
//! Every augmentation saturates at least one arc of the level graph, so the
//! algorithm terminates with rational capacities just as with integers.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: BigRational,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    // arc 2k is forward, 2k + 1 its residual twin; `cap` is residual capacity
    arcs: Vec<Arc>,
    original: Vec<BigRational>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); nodes],
            arcs: Vec::new(),
            original: Vec::new(),
        }
    }

    /// Adds an arc and returns its key.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: BigRational) -> usize {
        let key = self.original.len();
        self.adjacency[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap: cap.clone() });
        self.adjacency[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: BigRational::zero(),
        });
        self.original.push(cap);
        key
    }

    pub fn flow(&self, key: usize) -> BigRational {
        &self.original[key] - &self.arcs[2 * key].cap
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> BigRational {
        let mut total = BigRational::zero();
        loop {
            let level = self.levels(source);
            if level[sink] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; self.adjacency.len()];
            loop {
                let pushed = self.augment(source, sink, None, &level, &mut next);
                if pushed.is_zero() {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn levels(&self, source: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adjacency.len()];
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adjacency[v] {
                let arc = &self.arcs[a];
                if arc.cap.is_positive() && level[arc.to] == usize::MAX {
                    level[arc.to] = level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    /// Pushes up to `limit` (unbounded when `None`) from `v` to `sink`.
    fn augment(
        &mut self,
        v: usize,
        sink: usize,
        limit: Option<&BigRational>,
        level: &[usize],
        next: &mut [usize],
    ) -> BigRational {
        if v == sink {
            return limit.cloned().expect("source differs from sink");
        }
        while next[v] < self.adjacency[v].len() {
            let a = self.adjacency[v][next[v]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap.clone());
            if cap.is_positive() && level[to] == level[v] + 1 {
                let bound = match limit {
                    Some(l) if *l < cap => l.clone(),
                    _ => cap,
                };
                let pushed = self.augment(to, sink, Some(&bound), level, next);
                if pushed.is_positive() {
                    self.arcs[a].cap -= &pushed;
                    self.arcs[a ^ 1].cap += &pushed;
                    return pushed;
                }
            }
            next[v] += 1;
        }
        BigRational::zero()
    }

    /// Nodes reachable from `source` in the residual network.
    pub fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let level = self.levels(source);
        level.into_iter().map(|l| l != usize::MAX).collect()
    }
}

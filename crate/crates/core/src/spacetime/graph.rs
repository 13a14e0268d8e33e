//! Weighted causal graphs.
//!
//! The causal relation is the reflexive-transitive closure of the edge set.
//! Chronological precedence needs a path through at least one timelike edge.
//! The Lorentzian distance is the longest path, `+inf` when some route passes
//! through a cycle carrying a timelike edge.

use std::collections::{BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::to_f64;

use super::{EventId, ExtendedReal, Ladder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Timelike,
    Null,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: EventId,
    pub dst: EventId,
    pub weight: BigRational,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn timelike(src: usize, dst: usize, weight: BigRational) -> Edge {
        Edge {
            src: EventId(src),
            dst: EventId(dst),
            weight,
            kind: EdgeKind::Timelike,
        }
    }

    pub fn null(src: usize, dst: usize) -> Edge {
        Edge {
            src: EventId(src),
            dst: EventId(dst),
            weight: BigRational::zero(),
            kind: EdgeKind::Null,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CausalGraphModel {
    n: usize,
    edges: Vec<Edge>,
    // n*n row-major matrices: [p * n + q]
    causal: Vec<bool>,
    chrono: Vec<bool>,
    distance: Vec<ExtendedReal>,
}

impl PartialEq for CausalGraphModel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

#[derive(Clone, Debug)]
enum Length {
    Finite(BigRational),
    Infinite,
}

impl Length {
    fn extend(&self, weight: &BigRational) -> Length {
        match self {
            Length::Finite(v) => Length::Finite(v + weight),
            Length::Infinite => Length::Infinite,
        }
    }

    fn max(self, other: Length) -> Length {
        match (self, other) {
            (Length::Finite(a), Length::Finite(b)) => Length::Finite(if a >= b { a } else { b }),
            _ => Length::Infinite,
        }
    }
}

impl CausalGraphModel {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for edge in &edges {
            for id in [edge.src, edge.dst] {
                if id.index() >= n {
                    return Err(Error::InvalidEvent { id, len: n });
                }
            }
            let ok = match edge.kind {
                EdgeKind::Timelike => edge.weight.is_positive(),
                EdgeKind::Null => edge.weight.is_zero(),
            };
            if !ok {
                return Err(Error::InvalidWeight(format!(
                    "edge {} -> {} is {:?} with weight {}; timelike edges need a positive weight and null edges weight 0",
                    edge.src, edge.dst, edge.kind, edge.weight
                )));
            }
        }

        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, edge) in edges.iter().enumerate() {
            out[edge.src.index()].push(i);
        }

        let mut causal = vec![false; n * n];
        for p in 0..n {
            let row = &mut causal[p * n..(p + 1) * n];
            bfs(&edges, &out, [p], row);
        }

        let mut chrono = vec![false; n * n];
        for p in 0..n {
            let starts: Vec<usize> = edges
                .iter()
                .filter(|e| e.kind == EdgeKind::Timelike && causal[p * n + e.src.index()])
                .map(|e| e.dst.index())
                .collect();
            bfs(&edges, &out, starts, &mut chrono[p * n..(p + 1) * n]);
        }

        let mut model = CausalGraphModel {
            n,
            edges,
            causal,
            chrono,
            distance: Vec::new(),
        };
        model.distance = model.longest_paths();
        Ok(model)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn causally_precedes(&self, p: EventId, q: EventId) -> bool {
        self.causal[p.index() * self.n + q.index()]
    }

    pub fn chronologically_precedes(&self, p: EventId, q: EventId) -> bool {
        self.chrono[p.index() * self.n + q.index()]
    }

    pub fn distance(&self, p: EventId, q: EventId) -> ExtendedReal {
        self.distance[p.index() * self.n + q.index()]
    }

    pub fn classify(&self) -> Ladder {
        let n = self.n;
        if (0..n).any(|p| self.chrono[p * n + p]) {
            return Ladder::NonChronological;
        }
        let self_loop = self.edges.iter().any(|e| e.src == e.dst);
        let mutual = (0..n).any(|p| (p + 1..n).any(|q| self.causal[p * n + q] && self.causal[q * n + p]));
        if self_loop || mutual {
            Ladder::NonCausalChronological
        } else {
            Ladder::Causal
        }
    }

    /// Events of some closed causal curve, if one exists.
    pub fn causal_loop(&self) -> Option<Vec<EventId>> {
        let n = self.n;
        for p in 0..n {
            let class: Vec<EventId> = (0..n)
                .filter(|&q| self.causal[p * n + q] && self.causal[q * n + p])
                .map(EventId)
                .collect();
            if class.len() > 1 || self.chrono[p * n + p] {
                return Some(class);
            }
        }
        self.edges.iter().find(|e| e.src == e.dst).map(|e| vec![e.src])
    }

    pub fn time_reverse(&self) -> CausalGraphModel {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                src: e.dst,
                dst: e.src,
                weight: e.weight.clone(),
                kind: e.kind,
            })
            .collect();
        CausalGraphModel::new(self.n, edges).expect("transposed edges stay valid")
    }

    /// Topological order with lowest-id tie breaking; `None` on cyclic graphs.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut indegree = vec![0usize; self.n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            indegree[e.dst.index()] += 1;
            out[e.src.index()].push(e.dst.index());
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..self.n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut tau = vec![usize::MAX; self.n];
        let mut next = 0;
        while let Some(Reverse(v)) = ready.pop() {
            tau[v] = next;
            next += 1;
            for &w in &out[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        (next == self.n).then_some(tau)
    }

    fn longest_paths(&self) -> Vec<ExtendedReal> {
        let n = self.n;
        // Strongly connected classes straight from the closure.
        let component: Vec<usize> = (0..n)
            .map(|p| {
                (0..n)
                    .find(|&q| self.causal[p * n + q] && self.causal[q * n + p])
                    .unwrap_or(p)
            })
            .collect();
        // A timelike edge inside a class makes every route through it unbounded.
        let unbounded: Vec<bool> = (0..n).map(|p| self.chrono[p * n + p]).collect();
        // Ancestor counts strictly increase along the condensation.
        let ancestors: Vec<usize> = (0..n)
            .map(|q| (0..n).filter(|&p| self.causal[p * n + q]).count())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (ancestors[v], component[v], v));

        let mut incoming: Vec<Vec<&Edge>> = vec![Vec::new(); n];
        for e in &self.edges {
            incoming[e.dst.index()].push(e);
        }

        let mut result = vec![ExtendedReal::ZERO; n * n];
        let mut value: Vec<Option<Length>> = vec![None; n];
        for source in 0..n {
            value.iter_mut().for_each(|v| *v = None);
            let row = &self.causal[source * n..(source + 1) * n];
            let mut i = 0;
            while i < n {
                let comp = component[order[i]];
                let mut j = i;
                while j < n && component[order[j]] == comp {
                    j += 1;
                }
                let members = &order[i..j];
                i = j;
                if !row[members[0]] {
                    continue;
                }
                let length = if unbounded[members[0]] {
                    Length::Infinite
                } else {
                    let mut best = members
                        .contains(&source)
                        .then(|| Length::Finite(BigRational::zero()));
                    for &v in members {
                        for e in &incoming[v] {
                            let u = e.src.index();
                            if component[u] == comp || !row[u] {
                                continue;
                            }
                            let candidate = value[u]
                                .as_ref()
                                .expect("predecessor classes come first")
                                .extend(&e.weight);
                            best = Some(match best {
                                Some(b) => b.max(candidate),
                                None => candidate,
                            });
                        }
                    }
                    best.expect("reachable class has a reachable predecessor")
                };
                for &v in members {
                    result[source * n + v] = match &length {
                        Length::Finite(w) => ExtendedReal::finite(to_f64(w)),
                        Length::Infinite => ExtendedReal::Infinite,
                    };
                    value[v] = Some(length.clone());
                }
            }
        }
        result
    }

    pub(crate) fn future_row(&self, p: EventId) -> &[bool] {
        &self.causal[p.index() * self.n..(p.index() + 1) * self.n]
    }

    pub(crate) fn reachable_from(&self, set: &BTreeSet<EventId>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        for p in set {
            for (q, &r) in self.future_row(*p).iter().enumerate() {
                seen[q] |= r;
            }
        }
        seen
    }
}

fn bfs(
    edges: &[Edge],
    out: &[Vec<usize>],
    starts: impl IntoIterator<Item = usize>,
    seen: &mut [bool],
) {
    let mut queue = VecDeque::new();
    for s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &i in &out[v] {
            let w = edges[i].dst.index();
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
}

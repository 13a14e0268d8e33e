//! Deciding `μ ⪯ ν`, extracting causal couplings and infeasibility
//! certificates, and computing Lorentz-Wasserstein distances.
//!
//! Precedence is a max-flow question: the source feeds each atom `p` of `μ`
//! with capacity `μ(p)`, each atom `q` of `ν` drains into the sink with
//! capacity `ν(q)`, and `p -> q` is an arc whenever `p ⪯ q`. A causal
//! coupling exists iff the maximum flow saturates all of `μ`; otherwise the
//! source side of a minimum cut generates a future set that `μ` charges more
//! than `ν`.

mod certificate;
mod flow;
mod simplex;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{Coupling, DiscreteMeasure};
use crate::rational::to_f64;
use crate::spacetime::{EventId, ExtendedReal, SpacetimeModel};

pub use certificate::Certificate;
use flow::FlowNetwork;
use simplex::Transportation;

/// Outcome of a precedence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Precedence {
    /// `μ ⪯ ν`, with a causal coupling as witness.
    Feasible(Coupling),
    /// `μ ⋠ ν`, with a violating future set as witness.
    Infeasible(Certificate),
}

impl Precedence {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Precedence::Feasible(_))
    }

    pub fn coupling(&self) -> Option<&Coupling> {
        match self {
            Precedence::Feasible(c) => Some(c),
            Precedence::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Precedence::Feasible(_) => None,
            Precedence::Infeasible(c) => Some(c),
        }
    }
}

/// Atoms of two measures and the admissible cells between them.
struct Bipartite {
    left: Vec<(EventId, BigRational)>,
    right: Vec<(EventId, BigRational)>,
    cells: Vec<(usize, usize)>,
}

impl Bipartite {
    fn new(
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        mut admissible: impl FnMut(EventId, EventId) -> bool,
    ) -> Self {
        let left: Vec<_> = mu.atoms().map(|(p, w)| (p, w.clone())).collect();
        let right: Vec<_> = nu.atoms().map(|(q, w)| (q, w.clone())).collect();
        let mut cells = Vec::new();
        for (i, (p, _)) in left.iter().enumerate() {
            for (j, (q, _)) in right.iter().enumerate() {
                if admissible(*p, *q) {
                    cells.push((i, j));
                }
            }
        }
        Bipartite { left, right, cells }
    }

    fn supply(&self) -> Vec<BigRational> {
        self.left.iter().map(|(_, w)| w.clone()).collect()
    }

    fn demand(&self) -> Vec<BigRational> {
        self.right.iter().map(|(_, w)| w.clone()).collect()
    }

    fn coupling(&self, flows: &[BigRational]) -> Coupling {
        Coupling::new(
            self.cells
                .iter()
                .zip(flows)
                .map(|(&(i, j), x)| ((self.left[i].0, self.right[j].0), x.clone())),
        )
        .expect("a saturating flow carries unit mass")
    }
}

/// A maximum flow through the bipartite network.
struct FlowSolution {
    value: BigRational,
    flows: Vec<BigRational>,
    /// Left atoms on the source side of the minimum cut.
    source_side: Vec<bool>,
}

fn max_flow(net: &Bipartite) -> FlowSolution {
    let (m, n) = (net.left.len(), net.right.len());
    let (source, sink) = (m + n, m + n + 1);
    let mut network = FlowNetwork::new(m + n + 2);
    for (i, (_, w)) in net.left.iter().enumerate() {
        network.add_arc(source, i, w.clone());
    }
    for (j, (_, w)) in net.right.iter().enumerate() {
        network.add_arc(m + j, sink, w.clone());
    }
    // Total mass is one, so unit capacity never binds on middle arcs.
    let keys: Vec<usize> = net
        .cells
        .iter()
        .map(|&(i, j)| network.add_arc(i, m + j, BigRational::one()))
        .collect();
    let value = network.max_flow(source, sink);
    let flows = keys.iter().map(|&k| network.flow(k)).collect();
    let reach = network.residual_reachable(source);
    FlowSolution {
        value,
        flows,
        source_side: reach[..m].to_vec(),
    }
}

fn validate(model: &SpacetimeModel, measures: &[&DiscreteMeasure]) -> Result<()> {
    measures.iter().try_for_each(|m| m.validate_in(model))
}

/// Decides `μ ⪯ ν`: a causal coupling when one exists, a certificate otherwise.
pub fn check_precedence(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<Precedence> {
    validate(model, &[mu, nu])?;
    let net = Bipartite::new(mu, nu, |p, q| model.precedes(p, q));
    let solution = max_flow(&net);
    if solution.value.is_one() {
        return Ok(Precedence::Feasible(net.coupling(&solution.flows)));
    }
    let generator: BTreeSet<EventId> = net
        .left
        .iter()
        .zip(&solution.source_side)
        .filter(|(_, &side)| side)
        .map(|((p, _), _)| *p)
        .collect();
    let certificate = Certificate::from_generator(model, mu, nu, generator)?;
    debug_assert_eq!(
        certificate.deficiency(),
        BigRational::one() - &solution.value
    );
    Ok(Precedence::Infeasible(certificate))
}

/// True iff `coupling` has marginals `μ`, `ν` and lives on `J+`.
pub fn verify_coupling(
    model: &SpacetimeModel,
    coupling: &Coupling,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> bool {
    let in_model = coupling
        .entries()
        .all(|((p, q), _)| p.index() < model.len() && q.index() < model.len());
    in_model
        && coupling.first_marginal() == *mu
        && coupling.second_marginal() == *nu
        && coupling.entries().all(|((p, q), _)| model.precedes(p, q))
}

/// Value and maximizing coupling of a Lorentz-Wasserstein distance.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzWasserstein {
    pub value: ExtendedReal,
    pub s: f64,
    /// `None` when no causal coupling exists (the distance is then 0).
    pub optimal_coupling: Option<Coupling>,
}

fn check_exponent(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent s = {s} is outside (0, 1]")))
    }
}

/// `LW_s(μ, ν)`: the supremum over causal couplings of `[∫ d^s dω]^{1/s}`,
/// or 0 when `μ ⋠ ν`.
pub fn lorentz_wasserstein(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    s: f64,
) -> Result<LorentzWasserstein> {
    check_exponent(s)?;
    validate(model, &[mu, nu])?;
    let net = Bipartite::new(mu, nu, |p, q| model.precedes(p, q));
    let solution = max_flow(&net);
    if !solution.value.is_one() {
        return Ok(LorentzWasserstein {
            value: ExtendedReal::ZERO,
            s,
            optimal_coupling: None,
        });
    }

    let distance: Vec<ExtendedReal> = net
        .cells
        .iter()
        .map(|&(i, j)| model.distance(net.left[i].0, net.right[j].0))
        .collect();
    if let Some(flows) = route_through_infinite(&net, &solution.flows, &distance) {
        return Ok(LorentzWasserstein {
            value: ExtendedReal::Infinite,
            s,
            optimal_coupling: Some(net.coupling(&flows)),
        });
    }

    // Infinite cells carry no mass in any causal coupling; drop them.
    let keep: Vec<usize> = (0..net.cells.len()).filter(|&a| !distance[a].is_infinite()).collect();
    let finite = Bipartite {
        left: net.left.clone(),
        right: net.right.clone(),
        cells: keep.iter().map(|&a| net.cells[a]).collect(),
    };
    let cost: Vec<f64> = keep.iter().map(|&a| distance[a].powf(s).to_f64()).collect();
    let initial: Vec<BigRational> = keep.iter().map(|&a| solution.flows[a].clone()).collect();
    let (supply, demand) = (finite.supply(), finite.demand());
    let flows = Transportation {
        supply: &supply,
        demand: &demand,
        cells: &finite.cells,
        cost: &cost,
    }
    .maximize(initial)?;
    let total: f64 = flows.iter().zip(&cost).map(|(x, c)| to_f64(x) * c).sum();
    let value = total.max(0.0).powf(1.0 / s);
    Ok(LorentzWasserstein {
        value: ExtendedReal::finite(value),
        s,
        optimal_coupling: Some(finite.coupling(&flows)),
    })
}

/// Looks for a causal coupling that puts positive mass on a cell of infinite
/// distance. Feasible couplings differ from `flows` by circulations in the
/// residual network, so a zero-flow cell `p -> q` can pick up mass iff `q`
/// reaches `p` back through residual arcs.
fn route_through_infinite(
    net: &Bipartite,
    flows: &[BigRational],
    distance: &[ExtendedReal],
) -> Option<Vec<BigRational>> {
    let infinite: Vec<usize> = (0..net.cells.len()).filter(|&a| distance[a].is_infinite()).collect();
    if infinite.iter().any(|&a| flows[a].is_positive()) {
        return Some(flows.to_vec());
    }
    let m = net.left.len();
    let nodes = m + net.right.len();
    for &start in &infinite {
        let (p, q) = net.cells[start];
        // BFS from q's node to p's node over residual arcs; remember the arc used.
        let mut via: Vec<Option<(usize, bool)>> = vec![None; nodes];
        let mut seen = vec![false; nodes];
        seen[m + q] = true;
        let mut queue = std::collections::VecDeque::from([m + q]);
        while let Some(v) = queue.pop_front() {
            if v == p {
                break;
            }
            for (a, &(i, j)) in net.cells.iter().enumerate() {
                if a == start {
                    continue;
                }
                // forward residual: row -> column while below unit capacity
                let step = if v == i && flows[a] < BigRational::one() {
                    Some((m + j, true))
                } else if v == m + j && flows[a].is_positive() {
                    Some((i, false))
                } else {
                    None
                };
                if let Some((w, forward)) = step {
                    if !seen[w] {
                        seen[w] = true;
                        via[w] = Some((a, forward));
                        queue.push_back(w);
                    }
                }
            }
        }
        if !seen[p] {
            continue;
        }
        let mut cycle = vec![(start, true)];
        let mut v = p;
        while v != m + q {
            let (a, forward) = via[v].expect("visited nodes have a parent arc");
            cycle.push((a, forward));
            let (i, j) = net.cells[a];
            v = if forward { i } else { m + j };
        }
        let theta = cycle
            .iter()
            .map(|&(a, forward)| {
                if forward {
                    BigRational::one() - &flows[a]
                } else {
                    flows[a].clone()
                }
            })
            .min()
            .expect("cycle is nonempty");
        let mut out = flows.to_vec();
        for (a, forward) in cycle {
            if forward {
                out[a] += &theta;
            } else {
                out[a] -= &theta;
            }
        }
        return Some(out);
    }
    None
}

/// Maximizes `Σ ω(p, q) c(p, q)` over couplings of `μ`, `ν` supported on the
/// listed cells. Returns `None` when no coupling fits the cells.
pub fn max_cost_coupling(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cells: &[(EventId, EventId, f64)],
) -> Result<Option<(f64, Coupling)>> {
    for &(_, _, c) in cells {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("cell cost {c} is not finite")));
        }
    }
    let left: Vec<_> = mu.atoms().map(|(p, w)| (p, w.clone())).collect();
    let right: Vec<_> = nu.atoms().map(|(q, w)| (q, w.clone())).collect();
    let position = |list: &[(EventId, BigRational)], id: EventId| list.iter().position(|(e, _)| *e == id);
    let mut net = Bipartite {
        left: left.clone(),
        right: right.clone(),
        cells: Vec::new(),
    };
    let mut cost = Vec::new();
    for &(p, q, c) in cells {
        if let (Some(i), Some(j)) = (position(&left, p), position(&right, q)) {
            if let Some(k) = net.cells.iter().position(|&cell| cell == (i, j)) {
                cost[k] = f64::max(cost[k], c);
            } else {
                net.cells.push((i, j));
                cost.push(c);
            }
        }
    }
    let solution = max_flow(&net);
    if !solution.value.is_one() {
        return Ok(None);
    }
    let (supply, demand) = (net.supply(), net.demand());
    let flows = Transportation {
        supply: &supply,
        demand: &demand,
        cells: &net.cells,
        cost: &cost,
    }
    .maximize(solution.flows)?;
    let total = flows.iter().zip(&cost).map(|(x, c)| to_f64(x) * c).sum();
    Ok(Some((total, net.coupling(&flows))))
}

/// Largest off-diagonal mass over causal couplings of `μ` with itself.
///
/// On causal models the diagonal coupling is the only one, so this is zero.
pub fn max_violation(model: &SpacetimeModel, mu: &DiscreteMeasure) -> Result<BigRational> {
    validate(model, &[mu])?;
    let net = Bipartite::new(mu, mu, |p, q| model.precedes(p, q));
    let cost: Vec<f64> = net
        .cells
        .iter()
        .map(|&(i, j)| if i == j { 0.0 } else { 1.0 })
        .collect();
    // Start from the diagonal coupling.
    let initial: Vec<BigRational> = net
        .cells
        .iter()
        .map(|&(i, j)| if i == j { net.left[i].1.clone() } else { BigRational::zero() })
        .collect();
    let (supply, demand) = (net.supply(), net.demand());
    let flows = Transportation {
        supply: &supply,
        demand: &demand,
        cells: &net.cells,
        cost: &cost,
    }
    .maximize(initial)?;
    Ok(net
        .cells
        .iter()
        .zip(&flows)
        .filter(|(&(i, j), _)| i != j)
        .fold(BigRational::zero(), |acc, (_, x)| acc + x))
}

#[cfg(test)]
mod tests;

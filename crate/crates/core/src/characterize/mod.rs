//! Brute-force oracles for the equivalent formulations of `μ ⪯ ν`, monotone
//! function machinery, volume functions and order-property suites.
//!
//! Everything here is exponential or randomized on purpose. These functions
//! exist to cross-check the flow-based decision in [`crate::transport`].

mod falsify;
mod suite;
mod volume;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::spacetime::{EventId, SpacetimeModel};

pub use falsify::{evaluate_causal_function, falsify_condition_2, Falsification};
pub use suite::{
    equivalence_report, property_suite, ConditionReport, Counterexample, EquivalenceReport,
    PropertyOutcome, PropertyReport, Verdict,
};
pub use volume::{volume_functions, VolumeFunctions};

/// Largest ground set the subset enumerations accept.
pub const BRUTE_FORCE_BOUND: usize = 20;

/// Result of a condition check: either it holds or a witness breaks it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Check<W> {
    Holds,
    Violated(W),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Holds => None,
            Check::Violated(w) => Some(w),
        }
    }
}

/// Up-sets of the order induced on a ground set, as bitmasks over `ground`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpSetFamily {
    ground: Vec<EventId>,
    sets: Vec<u32>,
}

impl UpSetFamily {
    pub fn ground(&self) -> &[EventId] {
        &self.ground
    }

    /// Members in increasing bitmask order; bit `k` stands for `ground[k]`.
    pub fn masks(&self) -> &[u32] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains_mask(&self, mask: u32) -> bool {
        self.sets.binary_search(&mask).is_ok()
    }

    pub fn decode(&self, mask: u32) -> BTreeSet<EventId> {
        decode(&self.ground, mask)
    }

    pub fn members(&self) -> impl Iterator<Item = BTreeSet<EventId>> + '_ {
        self.sets.iter().map(|&m| self.decode(m))
    }
}

fn decode(ground: &[EventId], mask: u32) -> BTreeSet<EventId> {
    (0..ground.len())
        .filter(|&k| mask >> k & 1 == 1)
        .map(|k| ground[k])
        .collect()
}

fn bounded_ground(
    model: &SpacetimeModel,
    ground: impl IntoIterator<Item = EventId>,
) -> Result<Vec<EventId>> {
    let ground: Vec<EventId> = ground.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    for &p in &ground {
        model.check_event(p)?;
    }
    if ground.len() > BRUTE_FORCE_BOUND {
        return Err(Error::Capacity {
            what: "brute-force ground set",
            size: ground.len(),
            bound: BRUTE_FORCE_BOUND,
        });
    }
    Ok(ground)
}

/// `up[k]` is the mask of ground elements that `ground[k]` precedes.
fn up_masks(model: &SpacetimeModel, ground: &[EventId]) -> Vec<u32> {
    ground
        .iter()
        .map(|&p| {
            ground
                .iter()
                .enumerate()
                .filter(|&(_, &q)| model.precedes(p, q))
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

fn is_up_set(up: &[u32], mask: u32) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        if up[k] & !mask != 0 {
            return false;
        }
        rest &= rest - 1;
    }
    true
}

/// All up-sets of the order that `model` induces on `ground`.
pub fn enumerate_future_sets(
    model: &SpacetimeModel,
    ground: impl IntoIterator<Item = EventId>,
) -> Result<UpSetFamily> {
    let ground = bounded_ground(model, ground)?;
    let up = up_masks(model, &ground);
    let sets = (0u32..1 << ground.len()).filter(|&m| is_up_set(&up, m)).collect();
    Ok(UpSetFamily { ground, sets })
}

/// Weights of two measures on a ground set, scaled to integers over a
/// common denominator so subset masses compare without fractions.
struct Scaled {
    mu: Vec<BigInt>,
    nu: Vec<BigInt>,
}

impl Scaled {
    fn new(ground: &[EventId], mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Scaled {
        let denominator = mu
            .atoms()
            .chain(nu.atoms())
            .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
        let scale = |m: &DiscreteMeasure| -> Vec<BigInt> {
            ground
                .iter()
                .map(|&p| {
                    let w = m.weight(p);
                    w.numer() * (&denominator / w.denom())
                })
                .collect()
        };
        Scaled {
            mu: scale(mu),
            nu: scale(nu),
        }
    }

    fn excess(&self, mask: u32) -> bool {
        let mut diff = BigInt::zero();
        let mut rest = mask;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            diff += &self.mu[k];
            diff -= &self.nu[k];
            rest &= rest - 1;
        }
        diff > BigInt::zero()
    }
}

fn prepare(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<(Vec<EventId>, Vec<u32>, Scaled)> {
    mu.validate_in(model)?;
    nu.validate_in(model)?;
    let ground = bounded_ground(model, mu.support().chain(nu.support()))?;
    let up = up_masks(model, &ground);
    let scaled = Scaled::new(&ground, mu, nu);
    Ok((ground, up, scaled))
}

/// Scans every future set of the combined support for one with `μ(F) > ν(F)`.
///
/// Returns the violating set with the smallest bitmask. Future sets of the
/// whole model meet the support in exactly these up-sets, so this decides
/// precedence on its own.
pub fn check_condition_5(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<Check<BTreeSet<EventId>>> {
    let (ground, up, scaled) = prepare(model, mu, nu)?;
    let found = (0u32..1 << ground.len()).find(|&m| is_up_set(&up, m) && scaled.excess(m));
    Ok(match found {
        Some(m) => Check::Violated(decode(&ground, m)),
        None => Check::Holds,
    })
}

/// Scans subsets `K` of `supp μ` for `μ(J+(K)) > ν(J+(K))`.
///
/// Returns the violating `K` with the smallest bitmask over `supp μ`.
pub fn check_condition_4(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<Check<BTreeSet<EventId>>> {
    let (ground, up, scaled) = prepare(model, mu, nu)?;
    let generators: Vec<usize> = (0..ground.len()).filter(|&k| mu.contains(ground[k])).collect();
    for subset in 0u32..1 << generators.len() {
        let mut future = 0u32;
        for (bit, &k) in generators.iter().enumerate() {
            if subset >> bit & 1 == 1 {
                future |= up[k];
            }
        }
        if scaled.excess(future) {
            let k: BTreeSet<EventId> = generators
                .iter()
                .enumerate()
                .filter(|&(bit, _)| subset >> bit & 1 == 1)
                .map(|(_, &k)| ground[k])
                .collect();
            return Ok(Check::Violated(k));
        }
    }
    Ok(Check::Holds)
}

/// Compares the tails `μ(t ≥ c)` and `ν(t ≥ c)` at every atom time `c`.
///
/// `{t ≥ c}` is the causal future of the slice `t = c`, so a violation
/// disproves `μ ⪯ ν`; passing proves nothing. Reports the earliest violating `c`.
pub fn check_condition_8_slices(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<Check<f64>> {
    let Some(mink) = model.as_minkowski() else {
        return Err(Error::UnsupportedModel(
            "slice screen needs a Minkowski model".into(),
        ));
    };
    mu.validate_in(model)?;
    nu.validate_in(model)?;
    let mut times: Vec<f64> = mu.support().chain(nu.support()).map(|p| mink.time(p)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    for c in times {
        let tail = |m: &DiscreteMeasure| m.mass_where(|p| mink.time(p) >= c);
        if tail(mu) > tail(nu) {
            return Ok(Check::Violated(c));
        }
    }
    Ok(Check::Holds)
}

/// `ĝ(p) = max { g(x) : x ⪯ p }`, the least causal function above `g`.
///
/// `g` is indexed by event id and must cover the whole model.
pub fn monotone_closure<T: PartialOrd + Clone>(model: &SpacetimeModel, g: &[T]) -> Result<Vec<T>> {
    if g.len() != model.len() {
        return Err(Error::InvalidParameter(format!(
            "function has {} values for {} events",
            g.len(),
            model.len()
        )));
    }
    Ok(model
        .events()
        .map(|p| {
            let mut best = g[p.index()].clone();
            for x in model.events() {
                if g[x.index()] > best && model.precedes(x, p) {
                    best = g[x.index()].clone();
                }
            }
            best
        })
        .collect())
}

/// True when `f` never decreases along `⪯`.
pub fn is_causal_function<T: PartialOrd>(model: &SpacetimeModel, f: &[T]) -> bool {
    f.len() == model.len()
        && model.events().all(|p| {
            model
                .events()
                .all(|q| !model.precedes(p, q) || f[p.index()] <= f[q.index()])
        })
}

/// True when `J+(set) = set`.
pub fn is_future_set(model: &SpacetimeModel, set: &BTreeSet<EventId>) -> bool {
    model
        .future_of(set.iter().copied())
        .map(|f| &f == set)
        .unwrap_or(false)
}

/// `𝟙_F` as a function table over the model.
pub fn indicator(model: &SpacetimeModel, set: &BTreeSet<EventId>) -> Vec<BigRational> {
    model
        .events()
        .map(|p| {
            if set.contains(&p) {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

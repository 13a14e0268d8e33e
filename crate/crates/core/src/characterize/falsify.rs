use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::rational::from_f64;
use crate::spacetime::{EventId, SpacetimeModel};

/// Outcome of the randomized search for a causal `f` with `∫f dμ > ∫f dν`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Falsification {
    NoViolationFound {
        trials: u64,
        seed: u64,
    },
    Violated {
        seed: u64,
        trial: u64,
        /// Values of the violating function on the combined support.
        function: Vec<(EventId, f64)>,
        #[serde(serialize_with = "crate::rational::serialize_fraction")]
        mu_integral: BigRational,
        #[serde(serialize_with = "crate::rational::serialize_fraction")]
        nu_integral: BigRational,
    },
}

impl Falsification {
    pub fn is_violated(&self) -> bool {
        matches!(self, Falsification::Violated { .. })
    }
}

fn integral(m: &DiscreteMeasure, ground: &[EventId], values: &[BigRational]) -> BigRational {
    ground
        .iter()
        .zip(values)
        .map(|(&p, v)| m.weight(p) * v)
        .sum()
}

/// Sign test for `∫f dμ - ∫f dν = Σ f(p) (μ(p) - ν(p))`.
///
/// Differences are scaled to integers over a common denominator. Atoms
/// where `f` takes the same value are summed exactly first, which settles
/// the many structural ties (equal closure values, complementary masses)
/// without rational arithmetic. A float sum with a forward error bound
/// decides the rest, and anything within the bound is redone exactly.
struct Difference<'a> {
    mu: &'a DiscreteMeasure,
    nu: &'a DiscreteMeasure,
    ground: &'a [EventId],
    scaled: Option<Vec<i128>>,
}

impl<'a> Difference<'a> {
    fn new(mu: &'a DiscreteMeasure, nu: &'a DiscreteMeasure, ground: &'a [EventId]) -> Self {
        let diffs: Vec<BigRational> = ground.iter().map(|&p| mu.weight(p) - nu.weight(p)).collect();
        let denominator = diffs.iter().fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
        // headroom so that group sums cannot overflow
        let limit = i128::MAX >> 8;
        let scaled = diffs
            .iter()
            .map(|d| (d.numer() * (&denominator / d.denom())).to_i128().filter(|v| v.abs() < limit))
            .collect();
        Difference { mu, nu, ground, scaled }
    }

    /// Exact integrals when `∫f dμ > ∫f dν`.
    fn excess(&self, f: &[f64]) -> Option<(BigRational, BigRational)> {
        if let Some(scaled) = &self.scaled {
            let mut order: Vec<usize> = (0..f.len()).collect();
            order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
            let (mut total, mut magnitude, mut groups) = (0.0f64, 0.0f64, 0usize);
            let mut k = 0;
            while k < order.len() {
                let value = f[order[k]];
                let mut mass = 0i128;
                while k < order.len() && f[order[k]] == value {
                    mass += scaled[order[k]];
                    k += 1;
                }
                if mass != 0 && value != 0.0 {
                    let term = value * mass as f64;
                    total += term;
                    magnitude += term.abs();
                    groups += 1;
                }
            }
            if groups == 0 {
                return None;
            }
            let slack = (groups as f64 + 4.0) * f64::EPSILON * magnitude;
            if total < -slack {
                return None;
            }
        }
        let exact: Vec<BigRational> = f
            .iter()
            .map(|&v| from_f64(v).expect("closure of finite samples is finite"))
            .collect();
        let (a, b) = (integral(self.mu, self.ground, &exact), integral(self.nu, self.ground, &exact));
        (a > b).then_some((a, b))
    }
}

/// Draws `trials` random functions, closes each upward and tests
/// `∫ĝ dμ ≤ ∫ĝ dν` for `ĝ` and for every superlevel indicator of `ĝ`.
///
/// Only values on `supp μ ∪ supp ν` matter, so functions live there and are
/// closed under the induced order. Trial `i` uses stream `i` of a ChaCha8
/// generator seeded with `seed`. Violations are confirmed exactly (every
/// `f64` is a dyadic rational), so one is never a rounding artifact.
pub fn falsify_condition_2(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    trials: u64,
    seed: u64,
) -> Result<Falsification> {
    mu.validate_in(model)?;
    nu.validate_in(model)?;
    let ground: Vec<EventId> = mu.support().chain(nu.support()).collect::<BTreeSet<_>>().into_iter().collect();
    let below: Vec<Vec<usize>> = ground
        .iter()
        .map(|&p| (0..ground.len()).filter(|&j| model.precedes(ground[j], p)).collect())
        .collect();

    let diff = Difference::new(mu, nu, &ground);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        rng.set_stream(trial);
        rng.set_word_pos(0);
        let raw: Vec<f64> = ground.iter().map(|_| rng.gen::<f64>()).collect();
        let closed: Vec<f64> = below
            .iter()
            .map(|idx| idx.iter().map(|&j| raw[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect();

        let mut levels = closed.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        // the lowest level gives the constant 1, which never separates
        let candidates = std::iter::once(closed.clone()).chain(levels.into_iter().skip(1).map(|a| {
            closed.iter().map(|&v| if v >= a { 1.0 } else { 0.0 }).collect()
        }));
        for f in candidates {
            if let Some((a, b)) = diff.excess(&f) {
                return Ok(Falsification::Violated {
                    seed,
                    trial,
                    function: ground.iter().copied().zip(f).collect(),
                    mu_integral: a,
                    nu_integral: b,
                });
            }
        }
    }
    Ok(Falsification::NoViolationFound { trials, seed })
}

/// Tests one explicit function, indexed by event id.
///
/// Returns `Some((∫f dμ, ∫f dν))` when `f` is causal and the first integral
/// is larger, `None` when it is causal and the inequality holds.
pub fn evaluate_causal_function(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    f: &[BigRational],
) -> Result<Option<(BigRational, BigRational)>> {
    mu.validate_in(model)?;
    nu.validate_in(model)?;
    if !super::is_causal_function(model, f) {
        return Err(Error::InvalidParameter(
            "function decreases along the causal order".into(),
        ));
    }
    let all: Vec<EventId> = model.events().collect();
    let (a, b) = (integral(mu, &all, f), integral(nu, &all, f));
    Ok((a > b).then_some((a, b)))
}

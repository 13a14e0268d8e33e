use std::collections::BTreeSet;

use num_rational::BigRational;

use crate::error::Result;
use crate::measure::DiscreteMeasure;
use crate::spacetime::{EventId, SpacetimeModel};

/// Witness that `μ ⋠ ν`: a future set `F = J+(K)` with `μ(F) > ν(F)`.
///
/// The indicator `1_F` is a causal function, so the pair `(1_F, 1_F)` also
/// breaks the integral inequality for function pairs with `φ(p) <= ψ(q)`
/// whenever `p ⪯ q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    generator: Vec<EventId>,
    violating_set: Vec<EventId>,
    mu_mass: BigRational,
    nu_mass: BigRational,
}

impl Certificate {
    pub fn new(
        generator: Vec<EventId>,
        violating_set: Vec<EventId>,
        mu_mass: BigRational,
        nu_mass: BigRational,
    ) -> Self {
        Certificate {
            generator,
            violating_set,
            mu_mass,
            nu_mass,
        }
    }

    /// Builds the certificate for `F = J+(K)`, then thins `K` to the minimal
    /// events of `K` (the smallest generator of the same `F`).
    pub fn from_generator(
        model: &SpacetimeModel,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        generator: BTreeSet<EventId>,
    ) -> Result<Self> {
        let future = model.future_of(generator.iter().copied())?;
        let mut kept: Vec<EventId> = generator.into_iter().collect();
        let mut k = 0;
        while k < kept.len() {
            let a = kept[k];
            if kept.iter().any(|&b| b != a && model.precedes(b, a)) {
                kept.remove(k);
            } else {
                k += 1;
            }
        }
        Ok(Certificate {
            generator: kept,
            mu_mass: mu.mass_where(|p| future.contains(&p)),
            nu_mass: nu.mass_where(|p| future.contains(&p)),
            violating_set: future.into_iter().collect(),
        })
    }

    /// `K`.
    pub fn generator(&self) -> &[EventId] {
        &self.generator
    }

    /// `F = J+(K)`.
    pub fn violating_set(&self) -> &[EventId] {
        &self.violating_set
    }

    pub fn mu_mass(&self) -> &BigRational {
        &self.mu_mass
    }

    pub fn nu_mass(&self) -> &BigRational {
        &self.nu_mass
    }

    /// `μ(F) - ν(F)`.
    pub fn deficiency(&self) -> BigRational {
        &self.mu_mass - &self.nu_mass
    }

    pub fn contains(&self, p: EventId) -> bool {
        self.violating_set.binary_search(&p).is_ok()
    }

    /// Re-derives every claim from scratch in exact arithmetic.
    pub fn verify(&self, model: &SpacetimeModel, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> bool {
        let Ok(from_generator) = model.future_of(self.generator.iter().copied()) else {
            return false;
        };
        let Ok(closure) = model.future_of(self.violating_set.iter().copied()) else {
            return false;
        };
        let listed: BTreeSet<EventId> = self.violating_set.iter().copied().collect();
        if listed.len() != self.violating_set.len() || from_generator != listed || closure != listed {
            return false;
        }
        let mu_f = mu.mass_where(|p| listed.contains(&p));
        let nu_f = nu.mass_where(|p| listed.contains(&p));
        if mu_f != self.mu_mass || nu_f != self.nu_mass || mu_f <= nu_f {
            return false;
        }
        // (1_F, 1_F) respects the causal premise on the supports.
        mu.support().all(|p| {
            nu.support()
                .all(|q| !model.precedes(p, q) || !listed.contains(&p) || listed.contains(&q))
        })
    }
}

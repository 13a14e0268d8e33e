use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::spacetime::{EventId, SpacetimeModel};

/// Past and future volume functions `t-(p) = η(I-(p))`, `t+(p) = -η(I+(p))`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeFunctions {
    eta: DiscreteMeasure,
    t_minus: Vec<BigRational>,
    t_plus: Vec<BigRational>,
}

impl VolumeFunctions {
    pub fn eta(&self) -> &DiscreteMeasure {
        &self.eta
    }

    pub fn t_minus(&self, p: EventId) -> &BigRational {
        &self.t_minus[p.index()]
    }

    pub fn t_plus(&self, p: EventId) -> &BigRational {
        &self.t_plus[p.index()]
    }

    pub fn t_minus_values(&self) -> &[BigRational] {
        &self.t_minus
    }

    pub fn t_plus_values(&self) -> &[BigRational] {
        &self.t_plus
    }

    /// Both functions are non-decreasing along `⪯`.
    pub fn is_causal(&self, model: &SpacetimeModel) -> bool {
        super::is_causal_function(model, &self.t_minus) && super::is_causal_function(model, &self.t_plus)
    }

    /// First pair `p ≪ q` (`p != q`) across which either function fails to
    /// increase strictly. Chronological models never produce one.
    pub fn strictness_failure(&self, model: &SpacetimeModel) -> Option<(EventId, EventId)> {
        model.events().find_map(|p| {
            model
                .events()
                .filter(|&q| q != p && model.chronologically(p, q))
                .find(|&q| {
                    self.t_minus[p.index()] >= self.t_minus[q.index()]
                        || self.t_plus[p.index()] >= self.t_plus[q.index()]
                })
                .map(|q| (p, q))
        })
    }
}

/// Computes both volume functions of an admissible `eta`, one with positive
/// weight on every event.
pub fn volume_functions(model: &SpacetimeModel, eta: &DiscreteMeasure) -> Result<VolumeFunctions> {
    eta.validate_in(model)?;
    if let Some(p) = model.events().find(|&p| !eta.contains(p)) {
        return Err(Error::InvalidWeight(format!(
            "eta must charge every event, but event {p} has weight 0"
        )));
    }
    let mut t_minus = vec![BigRational::zero(); model.len()];
    let mut t_plus = vec![BigRational::zero(); model.len()];
    for (x, w) in eta.atoms() {
        for p in model.events() {
            if model.chronologically(x, p) {
                t_minus[p.index()] += w;
            }
            if model.chronologically(p, x) {
                t_plus[p.index()] -= w;
            }
        }
    }
    Ok(VolumeFunctions {
        eta: eta.clone(),
        t_minus,
        t_plus,
    })
}

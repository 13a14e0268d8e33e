//! Point clouds in flat (1+d)-dimensional Minkowski space.
//!
//! Relation decisions compare `dt^2` against `|dx|^2` without square roots.
//! A floating-point filter answers almost every query; when the computed
//! interval lies inside its rounding error bound the comparison is redone
//! in exact rational arithmetic on the stored coordinates.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::to_f64;

use super::{EventId, ExtendedReal};

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiModel {
    spatial_dim: usize,
    events: Vec<Vec<f64>>,
    coincident: Option<(EventId, EventId)>,
}

/// Causal character of the separation between two events.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Separation {
    /// Sign of `t(q) - t(p)`.
    pub time: Ordering,
    /// Sign of `dt^2 - |dx|^2`.
    pub interval: Ordering,
}

impl Separation {
    pub fn causal(&self) -> bool {
        self.time != Ordering::Less && self.interval != Ordering::Less
    }

    pub fn timelike(&self) -> bool {
        self.time == Ordering::Greater && self.interval == Ordering::Greater
    }
}

impl MinkowskiModel {
    /// Builds a model from `(t, x_1, ..., x_d)` coordinate rows.
    pub fn new(spatial_dim: usize, events: Vec<Vec<f64>>) -> Result<Self> {
        if spatial_dim == 0 {
            return Err(Error::UnsupportedModel(
                "Minkowski models need at least one spatial dimension".into(),
            ));
        }
        for (id, coords) in events.iter().enumerate() {
            if coords.len() != spatial_dim + 1 {
                return Err(Error::Document(format!(
                    "event {id} has {} coordinates, expected {}",
                    coords.len(),
                    spatial_dim + 1
                )));
            }
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::Document(format!("event {id} has a non-finite coordinate")));
            }
        }
        let coincident = find_coincident(&events);
        Ok(MinkowskiModel {
            spatial_dim,
            events,
            coincident,
        })
    }

    pub fn spatial_dim(&self) -> usize {
        self.spatial_dim
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn coords(&self, id: EventId) -> &[f64] {
        &self.events[id.index()]
    }

    pub fn events(&self) -> &[Vec<f64>] {
        &self.events
    }

    pub fn time(&self, id: EventId) -> f64 {
        self.events[id.index()][0]
    }

    /// Two distinct events with identical coordinates, if any.
    pub fn coincident_pair(&self) -> Option<(EventId, EventId)> {
        self.coincident
    }

    pub(crate) fn separation(&self, p: EventId, q: EventId) -> Separation {
        let a = &self.events[p.index()];
        let b = &self.events[q.index()];
        // The sign of a rounded difference is exact.
        let time = (b[0] - a[0]).partial_cmp(&0.0).unwrap_or(Ordering::Equal);

        let dt = b[0] - a[0];
        let dt2 = dt * dt;
        let dx2: f64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| (y - x) * (y - x)).sum();
        let interval = dt2 - dx2;
        let bound = (self.spatial_dim as f64 + 8.0) * f64::EPSILON * (dt2 + dx2);
        let interval = if interval > bound {
            Ordering::Greater
        } else if interval < -bound {
            Ordering::Less
        } else {
            exact_interval(a, b).cmp(&BigRational::zero())
        };
        Separation { time, interval }
    }

    pub fn causally_precedes(&self, p: EventId, q: EventId) -> bool {
        p == q || self.separation(p, q).causal()
    }

    pub fn chronologically_precedes(&self, p: EventId, q: EventId) -> bool {
        self.separation(p, q).timelike()
    }

    /// Proper time `sqrt(dt^2 - |dx|^2)` for causally related events, else 0.
    pub fn distance(&self, p: EventId, q: EventId) -> ExtendedReal {
        let sep = self.separation(p, q);
        if !sep.timelike() {
            return ExtendedReal::ZERO;
        }
        let a = &self.events[p.index()];
        let b = &self.events[q.index()];
        let dt = b[0] - a[0];
        let dx2: f64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| (y - x) * (y - x)).sum();
        let squared = dt * dt - dx2;
        if squared > 0.0 {
            ExtendedReal::finite(squared.sqrt())
        } else {
            // Timelike but lost to cancellation: fall back to the exact interval.
            ExtendedReal::finite(to_f64(&exact_interval(a, b)).sqrt())
        }
    }

    pub fn time_reverse(&self) -> MinkowskiModel {
        let events = self
            .events
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c[0] = -c[0];
                c
            })
            .collect();
        MinkowskiModel {
            spatial_dim: self.spatial_dim,
            events,
            coincident: self.coincident,
        }
    }
}

fn exact_interval(a: &[f64], b: &[f64]) -> BigRational {
    let exact = |v: f64| BigRational::from_float(v).expect("coordinates are finite");
    let dt = exact(b[0]) - exact(a[0]);
    let mut acc = &dt * &dt;
    for (x, y) in a[1..].iter().zip(&b[1..]) {
        let d = exact(*y) - exact(*x);
        acc -= &d * &d;
    }
    acc
}

fn find_coincident(events: &[Vec<f64>]) -> Option<(EventId, EventId)> {
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&i, &j| {
        events[i]
            .iter()
            .zip(&events[j])
            // adding 0.0 folds -0.0 into +0.0
            .map(|(a, b)| (a + 0.0).total_cmp(&(b + 0.0)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    order.windows(2).find_map(|w| {
        let (i, j) = (w[0], w[1]);
        (events[i] == events[j]).then_some((EventId(i), EventId(j)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(points: &[[f64; 2]]) -> MinkowskiModel {
        MinkowskiModel::new(1, points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn cone_membership() {
        let m = model(&[[0.0, 0.0], [2.0, 1.0], [1.0, 2.0], [1.0, 1.0], [5.0, 3.0]]);
        let (o, a, b, n, c) = (EventId(0), EventId(1), EventId(2), EventId(3), EventId(4));
        assert!(m.causally_precedes(o, a));
        assert!(!m.causally_precedes(o, b));
        assert!(!m.causally_precedes(a, o));
        assert!(m.chronologically_precedes(o, a));
        assert!(m.causally_precedes(o, n));
        assert!(!m.chronologically_precedes(o, n));
        assert_eq!(m.distance(o, c), ExtendedReal::finite(4.0));
        assert_eq!(m.distance(o, n), ExtendedReal::ZERO);
        assert_eq!(m.distance(c, o), ExtendedReal::ZERO);
    }

    #[test]
    fn near_null_separation_uses_exact_arithmetic() {
        // 0.1 + 0.2 style rounding: coordinates chosen so the float interval is noisy.
        let t = 0.1 + 0.2;
        let m = model(&[[0.0, 0.0], [t, t], [t, 0.3]]);
        assert!(m.causally_precedes(EventId(0), EventId(1)));
        assert!(!m.chronologically_precedes(EventId(0), EventId(1)));
        // 0.1 + 0.2 > 0.3 in binary, so this is barely timelike.
        assert!(m.chronologically_precedes(EventId(0), EventId(2)));
        assert!(m.distance(EventId(0), EventId(2)).as_finite().unwrap() > 0.0);
    }

    #[test]
    fn higher_dimensions() {
        let m = MinkowskiModel::new(2, vec![vec![0.0, 0.0, 0.0], vec![5.0, 3.0, 4.0]]).unwrap();
        assert!(m.causally_precedes(EventId(0), EventId(1)));
        assert!(!m.chronologically_precedes(EventId(0), EventId(1)));
    }

    #[test]
    fn rejects_ragged_coordinates() {
        assert!(MinkowskiModel::new(1, vec![vec![0.0, 0.0], vec![1.0]]).is_err());
        assert!(MinkowskiModel::new(0, vec![]).is_err());
        assert!(MinkowskiModel::new(1, vec![vec![f64::NAN, 0.0]]).is_err());
    }

    #[test]
    fn detects_coincident_events() {
        let m = model(&[[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(m.coincident_pair(), Some((EventId(0), EventId(2))));
        assert!(model(&[[0.0, 0.0], [0.0, 1.0]]).coincident_pair().is_none());
    }
}

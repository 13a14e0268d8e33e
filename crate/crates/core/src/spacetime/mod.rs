//! Finite spacetime models: the causal relation `J+`, the chronological
//! relation `I+`, the horismos `E+ = J+ \ I+`, the Lorentzian distance and
//! the position of a model on the causal ladder.

mod extended;
mod graph;
mod minkowski;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use extended::ExtendedReal;
pub use graph::{CausalGraphModel, Edge, EdgeKind};
pub use minkowski::MinkowskiModel;

/// Index of an event within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub usize);

impl EventId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for EventId {
    fn from(value: usize) -> Self {
        EventId(value)
    }
}

/// Rungs of the causal ladder that a finite model can occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ladder {
    /// Some closed curve carries a timelike edge.
    NonChronological,
    /// Closed causal curves exist, but all of them are null.
    NonCausalChronological,
    /// No closed causal curve.
    Causal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpacetimeModel {
    Minkowski(MinkowskiModel),
    Graph(CausalGraphModel),
}

impl From<MinkowskiModel> for SpacetimeModel {
    fn from(model: MinkowskiModel) -> Self {
        SpacetimeModel::Minkowski(model)
    }
}

impl From<CausalGraphModel> for SpacetimeModel {
    fn from(model: CausalGraphModel) -> Self {
        SpacetimeModel::Graph(model)
    }
}

impl SpacetimeModel {
    pub fn len(&self) -> usize {
        match self {
            SpacetimeModel::Minkowski(m) => m.len(),
            SpacetimeModel::Graph(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.len()).map(EventId)
    }

    pub fn check_event(&self, id: EventId) -> Result<()> {
        if id.index() < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidEvent { id, len: self.len() })
        }
    }

    /// `p ⪯ q`. Panics on ids outside the model; see [`Self::causally_precedes`].
    pub fn precedes(&self, p: EventId, q: EventId) -> bool {
        match self {
            SpacetimeModel::Minkowski(m) => m.causally_precedes(p, q),
            SpacetimeModel::Graph(g) => g.causally_precedes(p, q),
        }
    }

    /// `p ≪ q`. Panics on ids outside the model.
    pub fn chronologically(&self, p: EventId, q: EventId) -> bool {
        match self {
            SpacetimeModel::Minkowski(m) => m.chronologically_precedes(p, q),
            SpacetimeModel::Graph(g) => g.chronologically_precedes(p, q),
        }
    }

    /// Lorentzian distance. Panics on ids outside the model.
    pub fn distance(&self, p: EventId, q: EventId) -> ExtendedReal {
        match self {
            SpacetimeModel::Minkowski(m) => m.distance(p, q),
            SpacetimeModel::Graph(g) => g.distance(p, q),
        }
    }

    pub fn causally_precedes(&self, p: EventId, q: EventId) -> Result<bool> {
        self.check_event(p)?;
        self.check_event(q)?;
        Ok(self.precedes(p, q))
    }

    pub fn chronologically_precedes(&self, p: EventId, q: EventId) -> Result<bool> {
        self.check_event(p)?;
        self.check_event(q)?;
        Ok(self.chronologically(p, q))
    }

    /// `q` lies on the future light cone of `p`: causally but not chronologically related.
    pub fn horismos(&self, p: EventId, q: EventId) -> Result<bool> {
        Ok(self.causally_precedes(p, q)? && !self.chronologically(p, q))
    }

    pub fn lorentz_distance(&self, p: EventId, q: EventId) -> Result<ExtendedReal> {
        self.check_event(p)?;
        self.check_event(q)?;
        Ok(self.distance(p, q))
    }

    /// `J+(K)`: every event some member of `K` causally precedes.
    pub fn future_of<I>(&self, set: I) -> Result<BTreeSet<EventId>>
    where
        I: IntoIterator<Item = EventId>,
    {
        self.cone(set, true)
    }

    /// `J-(K)`.
    pub fn past_of<I>(&self, set: I) -> Result<BTreeSet<EventId>>
    where
        I: IntoIterator<Item = EventId>,
    {
        self.cone(set, false)
    }

    fn cone<I>(&self, set: I, future: bool) -> Result<BTreeSet<EventId>>
    where
        I: IntoIterator<Item = EventId>,
    {
        let set: BTreeSet<EventId> = set.into_iter().collect();
        for &p in &set {
            self.check_event(p)?;
        }
        if let (SpacetimeModel::Graph(g), true) = (self, future) {
            let seen = g.reachable_from(&set);
            return Ok((0..g.len()).filter(|&q| seen[q]).map(EventId).collect());
        }
        Ok(self
            .events()
            .filter(|&q| {
                set.iter().any(|&p| {
                    if future {
                        self.precedes(p, q)
                    } else {
                        self.precedes(q, p)
                    }
                })
            })
            .collect())
    }

    pub fn classify_ladder(&self) -> Ladder {
        match self {
            SpacetimeModel::Minkowski(m) if m.coincident_pair().is_some() => {
                Ladder::NonCausalChronological
            }
            SpacetimeModel::Minkowski(_) => Ladder::Causal,
            SpacetimeModel::Graph(g) => g.classify(),
        }
    }

    /// Events of a closed causal curve, if the model has one.
    pub fn causal_loop(&self) -> Option<Vec<EventId>> {
        match self {
            SpacetimeModel::Minkowski(m) => m.coincident_pair().map(|(a, b)| vec![a, b]),
            SpacetimeModel::Graph(g) => g.causal_loop(),
        }
    }

    /// A labelling `tau` with `p ⪯ q, p != q ⇒ tau(p) < tau(q)`, indexed by event id.
    ///
    /// Ties go to the lowest id. Fails on models that are not causal.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        match self {
            SpacetimeModel::Minkowski(m) => {
                if let Some((a, b)) = m.coincident_pair() {
                    return Err(Error::UnsupportedModel(format!(
                        "events {a} and {b} share coordinates, so the causal relation is not antisymmetric"
                    )));
                }
                let mut ids: Vec<usize> = (0..m.len()).collect();
                ids.sort_by(|&a, &b| {
                    m.time(EventId(a)).total_cmp(&m.time(EventId(b))).then(a.cmp(&b))
                });
                let mut tau = vec![0; m.len()];
                for (rank, id) in ids.into_iter().enumerate() {
                    tau[id] = rank;
                }
                Ok(tau)
            }
            SpacetimeModel::Graph(g) => g.topological_order().ok_or_else(|| {
                Error::UnsupportedModel("causal graph contains a cycle".into())
            }),
        }
    }

    /// Flips the time orientation. Applying it twice gives back the same relation.
    pub fn time_reverse(&self) -> SpacetimeModel {
        match self {
            SpacetimeModel::Minkowski(m) => SpacetimeModel::Minkowski(m.time_reverse()),
            SpacetimeModel::Graph(g) => SpacetimeModel::Graph(g.time_reverse()),
        }
    }

    pub fn as_minkowski(&self) -> Option<&MinkowskiModel> {
        match self {
            SpacetimeModel::Minkowski(m) => Some(m),
            SpacetimeModel::Graph(_) => None,
        }
    }

    pub fn as_graph(&self) -> Option<&CausalGraphModel> {
        match self {
            SpacetimeModel::Graph(g) => Some(g),
            SpacetimeModel::Minkowski(_) => None,
        }
    }
}

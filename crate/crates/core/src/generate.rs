//! Seeded random models and measures for fuzzing and the acceptance suite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::document::Instance;
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::spacetime::{CausalGraphModel, Edge, EventId, MinkowskiModel, SpacetimeModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// DAG on `n` events: each pair `i < j` gets an edge with probability
/// `density`; a quarter of the edges are null, the rest timelike with
/// weight `k/4`, `k` in `1..=8`.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, density: f64) -> CausalGraphModel {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                if rng.gen_bool(0.25) {
                    edges.push(Edge::null(i, j));
                } else {
                    let k: i64 = rng.gen_range(1..=8);
                    edges.push(Edge::timelike(i, j, BigRational::new(k.into(), 4.into())));
                }
            }
        }
    }
    CausalGraphModel::new(n, edges).expect("forward edges with valid weights")
}

/// `n` events uniform in the box `[0, size) x [-size/2, size/2)^d`.
pub fn random_minkowski<R: Rng>(rng: &mut R, n: usize, spatial_dim: usize, size: f64) -> MinkowskiModel {
    let events = (0..n)
        .map(|_| {
            let mut e = vec![rng.gen_range(0.0..size)];
            e.extend((0..spatial_dim).map(|_| rng.gen_range(-size / 2.0..size / 2.0)));
            e
        })
        .collect();
    MinkowskiModel::new(spatial_dim, events).expect("finite coordinates")
}

fn normalize(weights: Vec<(EventId, u64)>) -> DiscreteMeasure {
    let total: u64 = weights.iter().map(|(_, w)| w).sum();
    DiscreteMeasure::new(
        weights
            .into_iter()
            .map(|(p, w)| (p, BigRational::new(BigInt::from(w), BigInt::from(total)))),
    )
    .expect("positive integer weights normalize exactly")
}

/// Measure on `k` distinct events drawn from `candidates`, with integer
/// weights in `1..=4` normalized exactly.
pub fn random_measure<R: Rng>(rng: &mut R, candidates: &[EventId], k: usize) -> DiscreteMeasure {
    let k = k.clamp(1, candidates.len());
    let chosen: Vec<EventId> = candidates.choose_multiple(rng, k).copied().collect();
    normalize(chosen.into_iter().map(|p| (p, rng.gen_range(1..=4))).collect())
}

/// A measure `ν` with `μ ⪯ ν`: each atom's mass is split in random integer
/// proportions among at most `spread` events of its causal future.
pub fn random_successor<R: Rng>(
    rng: &mut R,
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    spread: usize,
) -> DiscreteMeasure {
    let mut out: BTreeMap<EventId, BigRational> = BTreeMap::new();
    for (p, w) in mu.atoms() {
        let future: Vec<EventId> = model.events().filter(|&q| model.precedes(p, q)).collect();
        let targets: Vec<EventId> = future
            .choose_multiple(rng, spread.clamp(1, future.len()))
            .copied()
            .collect();
        let parts: Vec<u64> = targets.iter().map(|_| rng.gen_range(1..=3)).collect();
        let total: u64 = parts.iter().sum();
        for (q, part) in targets.into_iter().zip(parts) {
            *out.entry(q).or_insert_with(BigRational::zero) +=
                w * BigRational::new(part.into(), total.into());
        }
    }
    DiscreteMeasure::new(out).expect("mass is conserved")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Dag,
    Minkowski,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dag" | "graph" => Ok(ModelKind::Dag),
            "minkowski" => Ok(ModelKind::Minkowski),
            other => Err(Error::InvalidParameter(format!(
                "unknown model kind {other:?}, expected dag or minkowski"
            ))),
        }
    }
}

/// Random instance with a causal chain `mu ⪯ nu ⪯ rho`, deterministic per seed.
///
/// DAG edge density is `3/size` clamped to `[0.2, 1]`; Minkowski instances
/// are 1+1 point clouds in a box of size 10.
pub fn generate_instance(kind: ModelKind, size: usize, seed: u64) -> Result<Instance> {
    if size == 0 {
        return Err(Error::InvalidParameter("instance size must be positive".into()));
    }
    let mut rng = rng(seed);
    let model: SpacetimeModel = match kind {
        ModelKind::Dag => random_dag(&mut rng, size, (3.0 / size as f64).clamp(0.2, 1.0)).into(),
        ModelKind::Minkowski => random_minkowski(&mut rng, size, 1, 10.0).into(),
    };
    let events: Vec<EventId> = model.events().collect();
    let k = size.min(4);
    let mu = random_measure(&mut rng, &events, k);
    let nu = random_successor(&mut rng, &model, &mu, 2);
    let rho = random_successor(&mut rng, &model, &nu, 2);
    Instance::new(
        model,
        BTreeMap::from([("mu".into(), mu), ("nu".into(), nu), ("rho".into(), rho)]),
    )
}

/// `1 / 2^k` as an exact rational.
pub(crate) fn power_of_half(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

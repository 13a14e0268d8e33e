//! Ready-made instances: a localized state leaking outside its light cone,
//! the geometric series with unbounded Lorentz-Wasserstein distance, and
//! random point clouds in a causal diamond.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;

use crate::document::Instance;
use crate::error::{Error, Result};
use crate::generate::{power_of_half, rng};
use crate::measure::DiscreteMeasure;
use crate::spacetime::{EventId, MinkowskiModel};

const SLAB: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Events of the localized-state demo.
///
/// Events `0..5` sit at `t = 0`, `x` in `{-1, -1/2, 0, 1/2, 1}`; events
/// `5..10` are the same positions at `t = 1`; event 10 is `(1, 10)`.
/// `mu` is uniform at `t = 0`. `nu` keeps `1 - leak` spread evenly at `t = 1`
/// and puts `leak` on the far event, which no atom of `mu` can reach.
pub fn hegerfeldt(leak: &BigRational) -> Result<Instance> {
    if leak.is_negative() || *leak > BigRational::one() {
        return Err(Error::InvalidParameter(format!("leak {leak} is outside [0, 1]")));
    }
    let mut events: Vec<Vec<f64>> = Vec::new();
    for t in [0.0, 1.0] {
        events.extend(SLAB.iter().map(|&x| vec![t, x]));
    }
    events.push(vec![1.0, 10.0]);
    let model = MinkowskiModel::new(1, events)?;

    let mu = DiscreteMeasure::uniform((0..5).map(EventId))?;
    let share = (BigRational::one() - leak) / BigRational::from_integer(5.into());
    let nu = DiscreteMeasure::new(
        (5..10)
            .map(|i| (EventId(i), share.clone()))
            .chain([(EventId(10), leak.clone())]),
    )?;
    Instance::new(
        model.into(),
        BTreeMap::from([("mu".into(), mu), ("nu".into(), nu)]),
    )
}

/// Truncated geometric series: `mu = δ_(0,0)` and `nu` puts weight
/// `2^-i / (1 - 2^-N)` on `(2^(i/s), 0)` for `i = 1..=N`.
///
/// Every atom of `nu` is at proper time `2^(i/s)` from the origin, so
/// `∫ d^s dω = N / (1 - 2^-N)` for the unique coupling.
pub fn geometric(n: u32, s: f64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidParameter("geometric demo needs N >= 1".into()));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} is outside (0, 1]")));
    }
    let mut events = vec![vec![0.0, 0.0]];
    for i in 1..=n {
        let t = (f64::from(i) / s).exp2();
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "2^({i}/{s}) overflows; lower N or raise s"
            )));
        }
        events.push(vec![t, 0.0]);
    }
    let model = MinkowskiModel::new(1, events)?;
    let norm = BigRational::one() - power_of_half(n);
    let nu = DiscreteMeasure::new((1..=n).map(|i| (EventId(i as usize), power_of_half(i) / &norm)))?;
    Instance::new(
        model.into(),
        BTreeMap::from([("mu".into(), DiscreteMeasure::dirac(EventId(0))), ("nu".into(), nu)]),
    )
}

/// `N / (1 - 2^-N)`, the value of the truncated series.
pub fn geometric_value(n: u32) -> f64 {
    let n = f64::from(n);
    n / (1.0 - (-n).exp2())
}

/// `count` points uniform in the 1+1 causal diamond between `(0, 0)` and
/// `(2, 0)`, ordered by time. `mu` is uniform on the earlier half, `nu` on
/// the later half.
pub fn diamond(count: usize, seed: u64) -> Result<Instance> {
    if count < 2 {
        return Err(Error::InvalidParameter("diamond demo needs at least 2 points".into()));
    }
    let mut rng = rng(seed);
    let mut events: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            // null coordinates u, v in [0, 1)
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            vec![u + v, u - v]
        })
        .collect();
    events.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let model = MinkowskiModel::new(1, events)?;
    let half = count / 2;
    let mu = DiscreteMeasure::uniform((0..half).map(EventId))?;
    let nu = DiscreteMeasure::uniform((half..count).map(EventId))?;
    Instance::new(
        model.into(),
        BTreeMap::from([("mu".into(), mu), ("nu".into(), nu)]),
    )
}

/// Parses a leak such as `"0.01"` or `"1/100"`.
pub fn parse_leak(text: &str) -> Result<BigRational> {
    crate::rational::parse_probability(text)
}

//! Finitely supported probability measures with exact rational weights, and
//! the constructions built from them: pushforwards, products, marginals, the
//! diagonal coupling and the composition of two couplings through a shared
//! marginal (gluing).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::spacetime::{EventId, SpacetimeModel};

/// A probability measure on finitely many events.
///
/// Weights are strictly positive and sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: BTreeMap<EventId, BigRational>,
}

fn check_total(total: &BigRational) -> Result<()> {
    if total.is_one() {
        Ok(())
    } else {
        Err(Error::NotNormalized(total.to_string()))
    }
}

impl DiscreteMeasure {
    /// Builds a measure, dropping zero-weight atoms.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (EventId, BigRational)>,
    {
        let mut map = BTreeMap::new();
        let mut total = BigRational::zero();
        for (id, weight) in atoms {
            if weight.is_negative() {
                return Err(Error::InvalidWeight(format!("atom {id} has negative weight {weight}")));
            }
            total += &weight;
            if map.insert(id, weight).is_some() {
                return Err(Error::DuplicateEvent(id));
            }
        }
        check_total(&total)?;
        map.retain(|_, w| !w.is_zero());
        Ok(DiscreteMeasure { atoms: map })
    }

    pub fn dirac(p: EventId) -> Self {
        DiscreteMeasure {
            atoms: BTreeMap::from([(p, BigRational::one())]),
        }
    }

    /// Equal weight on each listed event.
    pub fn uniform<I: IntoIterator<Item = EventId>>(events: I) -> Result<Self> {
        let events: Vec<EventId> = events.into_iter().collect();
        if events.is_empty() {
            return Err(Error::NotNormalized("0 (empty support)".into()));
        }
        let w = BigRational::new(1.into(), events.len().into());
        Self::new(events.into_iter().map(|e| (e, w.clone())))
    }

    pub fn weight(&self, p: EventId) -> BigRational {
        self.atoms.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (EventId, &BigRational)> + '_ {
        self.atoms.iter().map(|(k, v)| (*k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = EventId> + '_ {
        self.atoms.keys().copied()
    }

    pub fn contains(&self, p: EventId) -> bool {
        self.atoms.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total weight of the atoms accepted by `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(EventId) -> bool) -> BigRational {
        self.atoms
            .iter()
            .filter(|(id, _)| pred(**id))
            .fold(BigRational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Fails if an atom names an event outside `model`.
    pub fn validate_in(&self, model: &SpacetimeModel) -> Result<()> {
        self.support().try_for_each(|id| model.check_event(id))
    }

    pub fn pushforward(&self, f: impl Fn(EventId) -> Option<EventId>) -> Result<DiscreteMeasure> {
        let mut atoms: BTreeMap<EventId, BigRational> = BTreeMap::new();
        for (id, w) in &self.atoms {
            let image = f(*id).ok_or_else(|| {
                Error::InvalidParameter(format!("map is undefined on atom {id}"))
            })?;
            *atoms.entry(image).or_insert_with(BigRational::zero) += w;
        }
        Ok(DiscreteMeasure { atoms })
    }
}

/// `δ_p`, checked against the model.
pub fn dirac(model: &SpacetimeModel, p: EventId) -> Result<DiscreteMeasure> {
    model.check_event(p)?;
    Ok(DiscreteMeasure::dirac(p))
}

pub fn pushforward(
    f: impl Fn(EventId) -> Option<EventId>,
    measure: &DiscreteMeasure,
) -> Result<DiscreteMeasure> {
    measure.pushforward(f)
}

/// A joint probability measure on pairs of events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    entries: BTreeMap<(EventId, EventId), BigRational>,
}

impl Coupling {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((EventId, EventId), BigRational)>,
    {
        let mut map = BTreeMap::new();
        let mut total = BigRational::zero();
        for (pair, weight) in entries {
            if weight.is_negative() {
                return Err(Error::InvalidWeight(format!(
                    "entry ({}, {}) has negative weight {weight}",
                    pair.0, pair.1
                )));
            }
            total += &weight;
            if map.insert(pair, weight).is_some() {
                return Err(Error::DuplicateEvent(pair.0));
            }
        }
        check_total(&total)?;
        map.retain(|_, w| !w.is_zero());
        Ok(Coupling { entries: map })
    }

    pub fn entries(&self) -> impl Iterator<Item = ((EventId, EventId), &BigRational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn weight(&self, p: EventId, q: EventId) -> BigRational {
        self.entries
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass_where(&self, mut pred: impl FnMut(EventId, EventId) -> bool) -> BigRational {
        self.entries
            .iter()
            .filter(|((p, q), _)| pred(*p, *q))
            .fold(BigRational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn first_marginal(&self) -> DiscreteMeasure {
        let mut atoms: BTreeMap<EventId, BigRational> = BTreeMap::new();
        for ((p, _), w) in &self.entries {
            *atoms.entry(*p).or_insert_with(BigRational::zero) += w;
        }
        DiscreteMeasure { atoms }
    }

    pub fn second_marginal(&self) -> DiscreteMeasure {
        let mut atoms: BTreeMap<EventId, BigRational> = BTreeMap::new();
        for ((_, q), w) in &self.entries {
            *atoms.entry(*q).or_insert_with(BigRational::zero) += w;
        }
        DiscreteMeasure { atoms }
    }

    pub fn marginals(&self) -> (DiscreteMeasure, DiscreteMeasure) {
        (self.first_marginal(), self.second_marginal())
    }
}

pub fn product(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Coupling {
    let entries = mu
        .atoms()
        .flat_map(|(p, a)| nu.atoms().map(move |(q, b)| ((p, q), a * b)))
        .collect();
    Coupling { entries }
}

pub fn marginals(coupling: &Coupling) -> (DiscreteMeasure, DiscreteMeasure) {
    coupling.marginals()
}

/// Pushforward of `mu` under `p ↦ (p, p)`.
pub fn diagonal(mu: &DiscreteMeasure) -> Coupling {
    Coupling {
        entries: mu.atoms().map(|(p, w)| ((p, p), w.clone())).collect(),
    }
}

/// A probability measure on triples of events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleMeasure {
    entries: BTreeMap<(EventId, EventId, EventId), BigRational>,
}

impl TripleMeasure {
    pub fn entries(&self) -> impl Iterator<Item = ((EventId, EventId, EventId), &BigRational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    fn project(&self, pick: impl Fn(EventId, EventId, EventId) -> (EventId, EventId)) -> Coupling {
        let mut entries: BTreeMap<(EventId, EventId), BigRational> = BTreeMap::new();
        for ((p, q, r), w) in &self.entries {
            *entries.entry(pick(*p, *q, *r)).or_insert_with(BigRational::zero) += w;
        }
        Coupling { entries }
    }

    pub fn project_12(&self) -> Coupling {
        self.project(|p, q, _| (p, q))
    }

    pub fn project_23(&self) -> Coupling {
        self.project(|_, q, r| (q, r))
    }

    pub fn project_13(&self) -> Coupling {
        self.project(|p, _, r| (p, r))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub triple: TripleMeasure,
    pub composed: Coupling,
}

/// Glues `first` (on X1 × X2) and `second` (on X2 × X3) along their shared
/// X2 marginal `m`, using the conditional product
/// `w(p, q, r) = first(p, q) · second(q, r) / m(q)`.
pub fn glue(first: &Coupling, second: &Coupling) -> Result<Gluing> {
    let middle = first.second_marginal();
    let other = second.first_marginal();
    if middle != other {
        let atom = middle
            .support()
            .chain(other.support())
            .find(|&q| middle.weight(q) != other.weight(q))
            .expect("distinct measures differ at some atom");
        return Err(Error::MarginalMismatch {
            atom,
            left: middle.weight(atom).to_string(),
            right: other.weight(atom).to_string(),
        });
    }

    let mut outgoing: BTreeMap<EventId, Vec<(EventId, &BigRational)>> = BTreeMap::new();
    for ((q, r), w) in &second.entries {
        outgoing.entry(*q).or_default().push((*r, w));
    }
    let mut entries = BTreeMap::new();
    for ((p, q), a) in &first.entries {
        let m = middle.weight(*q);
        for (r, b) in outgoing.get(q).map(Vec::as_slice).unwrap_or_default() {
            entries.insert((*p, *q, *r), a * *b / &m);
        }
    }
    let triple = TripleMeasure { entries };
    let composed = triple.project_13();
    Ok(Gluing { triple, composed })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn e(i: usize) -> EventId {
        EventId(i)
    }

    fn measure(atoms: &[(usize, i64, i64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(atoms.iter().map(|&(i, n, d)| (e(i), q(n, d)))).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            DiscreteMeasure::new([(e(0), q(1, 2))]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new([(e(0), q(1, 2)), (e(0), q(1, 2))]),
            Err(Error::DuplicateEvent(_))
        ));
        assert!(DiscreteMeasure::new([(e(0), q(3, 2)), (e(1), q(-1, 2))]).is_err());
        let pruned = DiscreteMeasure::new([(e(0), q(1, 1)), (e(1), q(0, 1))]).unwrap();
        assert_eq!(pruned.len(), 1);
        assert!(DiscreteMeasure::uniform([]).is_err());
    }

    #[test]
    fn dirac_measures() {
        let d = DiscreteMeasure::dirac(e(3));
        assert_eq!(d.weight(e(3)), q(1, 1));
        assert_eq!(d.len(), 1);
        let (a, b) = marginals(&product(&DiscreteMeasure::dirac(e(1)), &DiscreteMeasure::dirac(e(2))));
        assert_eq!((a, b), (DiscreteMeasure::dirac(e(1)), DiscreteMeasure::dirac(e(2))));
        assert_eq!(pushforward(Some, &d).unwrap(), d);
    }

    #[test]
    fn pushforward_merges_preimages() {
        let mu = measure(&[(0, 1, 2), (1, 1, 2)]);
        let merged = mu.pushforward(|_| Some(e(2))).unwrap();
        assert_eq!(merged, DiscreteMeasure::dirac(e(2)));
        let relabeled = mu.pushforward(|p| Some(e(p.0 + 10))).unwrap();
        assert_eq!(relabeled, measure(&[(10, 1, 2), (11, 1, 2)]));
        assert!(mu.pushforward(|p| (p.0 == 0).then_some(p)).is_err());
    }

    #[test]
    fn products_and_diagonals() {
        let u = measure(&[(0, 1, 2), (1, 1, 2)]);
        let prod = product(&u, &u);
        assert_eq!(prod.len(), 4);
        assert!(prod.entries().all(|(_, w)| *w == q(1, 4)));
        let mu = measure(&[(0, 1, 3), (1, 2, 3)]);
        let diag = diagonal(&mu);
        assert_eq!(diag.weight(e(1), e(1)), q(2, 3));
        assert_eq!(diag.marginals(), (mu.clone(), mu));
        assert_eq!(
            diagonal(&DiscreteMeasure::dirac(e(4))).weight(e(4), e(4)),
            q(1, 1)
        );
    }

    #[test]
    fn gluing_diagonals_and_diracs() {
        let mu = measure(&[(0, 1, 3), (1, 2, 3)]);
        let g = glue(&diagonal(&mu), &diagonal(&mu)).unwrap();
        assert_eq!(g.composed, diagonal(&mu));

        let ab = product(&DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(1)));
        let bc = product(&DiscreteMeasure::dirac(e(1)), &DiscreteMeasure::dirac(e(2)));
        let g = glue(&ab, &bc).unwrap();
        assert_eq!(g.composed.weight(e(0), e(2)), q(1, 1));
        assert_eq!(g.composed.len(), 1);
    }

    #[test]
    fn gluing_reports_mismatched_atom() {
        let ab = product(&DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(1)));
        let cd = product(&DiscreteMeasure::dirac(e(2)), &DiscreteMeasure::dirac(e(3)));
        match glue(&ab, &cd) {
            Err(Error::MarginalMismatch { atom, .. }) => assert_eq!(atom, e(1)),
            other => panic!("{other:?}"),
        }
    }

    /// Random measure on events `0..n` with small integer weights.
    fn arb_measure(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
        prop::collection::vec(0u32..4, n).prop_filter_map("all-zero weights", |raw| {
            let total: u32 = raw.iter().sum();
            (total > 0).then(|| {
                DiscreteMeasure::new(
                    raw.iter()
                        .enumerate()
                        .map(|(i, &w)| (e(i), BigRational::new(w.into(), total.into()))),
                )
                .unwrap()
            })
        })
    }

    /// Random coupling on `0..n × 0..n`.
    fn arb_coupling(n: usize) -> impl Strategy<Value = Coupling> {
        prop::collection::vec(0u32..3, n * n).prop_filter_map("all-zero weights", move |raw| {
            let total: u32 = raw.iter().sum();
            (total > 0).then(|| {
                Coupling::new(raw.iter().enumerate().map(|(k, &w)| {
                    ((e(k / n), e(k % n)), BigRational::new(w.into(), total.into()))
                }))
                .unwrap()
            })
        })
    }

    /// Summation over the triple support, independent of `TripleMeasure::project_*`.
    fn brute_pair_sum(g: &Gluing, left: bool, a: EventId, b: EventId) -> BigRational {
        g.triple
            .entries()
            .filter(|((p, q, r), _)| if left { *p == a && *q == b } else { *q == a && *r == b })
            .fold(BigRational::zero(), |acc, (_, w)| acc + w)
    }

    proptest! {
        #[test]
        fn product_marginals_roundtrip(mu in arb_measure(4), nu in arb_measure(3)) {
            let prod = product(&mu, &nu);
            prop_assert_eq!(prod.marginals(), (mu.clone(), nu.clone()));
            let mut total = BigRational::zero();
            for (p, a) in mu.atoms() {
                for (q, b) in nu.atoms() {
                    prop_assert_eq!(prod.weight(p, q), a * b);
                    total += a * b;
                }
            }
            prop_assert!(total.is_one());
        }

        #[test]
        fn glue_reproduces_both_couplings(first in arb_coupling(4), seed in any::<u64>()) {
            // Second coupling: reshuffle the middle marginal with a deterministic kernel.
            let middle = first.second_marginal();
            let mut entries = Vec::new();
            for (q, w) in middle.atoms() {
                let r1 = e((q.0 as u64 ^ seed) as usize % 5);
                let r2 = e((q.0 as u64 + seed) as usize % 5);
                if r1 == r2 {
                    entries.push(((q, r1), w.clone()));
                } else {
                    entries.push(((q, r1), w / BigRational::from_integer(3.into())));
                    entries.push(((q, r2), w * q23()));
                }
            }
            let second = Coupling::new(entries).unwrap();
            let g = glue(&first, &second).unwrap();
            for ((p, q), w) in first.entries() {
                prop_assert_eq!(&brute_pair_sum(&g, true, p, q), w);
            }
            for ((q, r), w) in second.entries() {
                prop_assert_eq!(&brute_pair_sum(&g, false, q, r), w);
            }
            prop_assert_eq!(g.triple.project_12(), first.clone());
            prop_assert_eq!(g.triple.project_23(), second.clone());
            prop_assert_eq!(g.composed.first_marginal(), first.first_marginal());
            prop_assert_eq!(g.composed.second_marginal(), second.second_marginal());
        }

        #[test]
        fn coupling_mass_on_product_of_supports(w in arb_coupling(4), mask_a in 0u8..16, mask_b in 0u8..16) {
            let (mu, nu) = w.marginals();
            let in_a = |p: EventId| mask_a >> p.0 & 1 == 1;
            let in_b = |q: EventId| mask_b >> q.0 & 1 == 1;
            let mass = w.mass_where(|p, q| in_a(p) && in_b(q));
            // full-measure sets carry the full coupling mass, and conversely
            let full = mu.mass_where(in_a).is_one() && nu.mass_where(in_b).is_one();
            prop_assert_eq!(full, mass.is_one());
            // a null factor kills the product set
            if mu.mass_where(in_a).is_zero() || nu.mass_where(in_b).is_zero() {
                prop_assert!(mass.is_zero());
            }
        }
    }

    fn q23() -> BigRational {
        BigRational::new(2.into(), 3.into())
    }
}

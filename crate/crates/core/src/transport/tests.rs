use proptest::prelude::*;

use super::*;
use crate::measure::{diagonal, product};
use crate::spacetime::{CausalGraphModel, Edge, MinkowskiModel};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn e(i: usize) -> EventId {
    EventId(i)
}

fn mink(points: &[[f64; 2]]) -> SpacetimeModel {
    MinkowskiModel::new(1, points.iter().map(|p| p.to_vec()).collect())
        .unwrap()
        .into()
}

fn measure(atoms: &[(usize, i64, i64)]) -> DiscreteMeasure {
    DiscreteMeasure::new(atoms.iter().map(|&(i, n, d)| (e(i), q(n, d)))).unwrap()
}

fn two_cycle() -> SpacetimeModel {
    CausalGraphModel::new(
        2,
        vec![Edge::timelike(0, 1, q(1, 1)), Edge::timelike(1, 0, q(1, 1))],
    )
    .unwrap()
    .into()
}

fn diamond() -> SpacetimeModel {
    CausalGraphModel::new(
        4,
        vec![
            Edge::timelike(0, 1, q(1, 1)),
            Edge::timelike(0, 2, q(2, 1)),
            Edge::timelike(1, 3, q(3, 1)),
            Edge::null(2, 3),
        ],
    )
    .unwrap()
    .into()
}

/// Every up-set of the support union, by subset filtering.
fn brute_force_violation(
    model: &SpacetimeModel,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Option<Vec<EventId>> {
    let ground: Vec<EventId> = mu.support().chain(nu.support()).collect::<BTreeSet<_>>().into_iter().collect();
    for mask in 0u32..(1 << ground.len()) {
        let inside = |k: usize| mask >> k & 1 == 1;
        let upward = (0..ground.len()).all(|a| {
            !inside(a) || (0..ground.len()).all(|b| !model.precedes(ground[a], ground[b]) || inside(b))
        });
        if !upward {
            continue;
        }
        let set: Vec<EventId> = (0..ground.len()).filter(|&k| inside(k)).map(|k| ground[k]).collect();
        let mu_f = mu.mass_where(|p| set.contains(&p));
        let nu_f = nu.mass_where(|p| set.contains(&p));
        if mu_f > nu_f {
            return Some(set);
        }
    }
    None
}

#[test]
fn dirac_pairs_follow_the_event_relation() {
    let m = mink(&[[0.0, 0.0], [2.0, 1.0], [1.0, 2.0]]);
    let res = check_precedence(&m, &DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(1))).unwrap();
    assert_eq!(res.coupling().unwrap().weight(e(0), e(1)), q(1, 1));
    let res = check_precedence(&m, &DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(2))).unwrap();
    assert!(!res.is_feasible());
}

#[test]
fn equal_measures_are_related() {
    let m = diamond();
    let mu = measure(&[(0, 1, 4), (1, 1, 4), (3, 1, 2)]);
    let res = check_precedence(&m, &mu, &mu).unwrap();
    assert!(verify_coupling(&m, res.coupling().unwrap(), &mu, &mu));
    assert!(verify_coupling(&m, &diagonal(&mu), &mu, &mu));
}

#[test]
fn minkowski_certificate() {
    let m = mink(&[[0.0, 0.0], [1.0, 0.0], [1.0, 5.0]]);
    let mu = DiscreteMeasure::dirac(e(0));
    let nu = measure(&[(1, 1, 2), (2, 1, 2)]);
    let res = check_precedence(&m, &mu, &nu).unwrap();
    let cert = res.certificate().expect("infeasible");
    assert_eq!(cert.generator(), &[e(0)]);
    assert_eq!(cert.violating_set(), &[e(0), e(1)]);
    assert_eq!(cert.mu_mass(), &q(1, 1));
    assert_eq!(cert.nu_mass(), &q(1, 2));
    assert!(cert.verify(&m, &mu, &nu));
    assert_eq!(brute_force_violation(&m, &mu, &nu), Some(vec![e(0), e(1)]));
}

#[test]
fn tampered_certificates_fail_verification() {
    let m = mink(&[[0.0, 0.0], [1.0, 0.0], [1.0, 5.0]]);
    let mu = DiscreteMeasure::dirac(e(0));
    let nu = measure(&[(1, 1, 2), (2, 1, 2)]);
    let good = Certificate::new(vec![e(0)], vec![e(0), e(1)], q(1, 1), q(1, 2));
    assert!(good.verify(&m, &mu, &nu));
    // not a future set
    assert!(!Certificate::new(vec![e(0)], vec![e(0)], q(1, 1), q(0, 1)).verify(&m, &mu, &nu));
    // wrong masses
    assert!(!Certificate::new(vec![e(0)], vec![e(0), e(1)], q(1, 1), q(1, 3)).verify(&m, &mu, &nu));
    // not violating
    let all = Certificate::new(vec![e(0), e(2)], vec![e(0), e(1), e(2)], q(1, 1), q(1, 1));
    assert!(!all.verify(&m, &mu, &nu));
    // out-of-range ids
    assert!(!Certificate::new(vec![e(9)], vec![e(9)], q(1, 1), q(0, 1)).verify(&m, &mu, &nu));
}

#[test]
fn invalid_events_are_rejected() {
    let m = diamond();
    let bad = DiscreteMeasure::dirac(e(10));
    assert!(matches!(
        check_precedence(&m, &bad, &bad),
        Err(Error::InvalidEvent { .. })
    ));
    assert!(lorentz_wasserstein(&m, &bad, &bad, 1.0).is_err());
    assert!(max_violation(&m, &bad).is_err());
}

#[test]
fn verify_coupling_checks_support_and_marginals() {
    let m = mink(&[[0.0, 0.0], [1.0, 2.0]]);
    let (a, b) = (DiscreteMeasure::dirac(e(0)), DiscreteMeasure::dirac(e(1)));
    assert!(!verify_coupling(&m, &product(&a, &b), &a, &b));
    assert!(verify_coupling(&m, &diagonal(&a), &a, &a));
    assert!(!verify_coupling(&m, &diagonal(&a), &a, &b));
}

#[test]
fn lw_of_diracs_is_the_distance() {
    let m = mink(&[[0.0, 0.0], [5.0, 3.0], [1.0, 2.0]]);
    for s in [1.0, 0.5, 0.1] {
        let lw = lorentz_wasserstein(&m, &DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(1)), s).unwrap();
        assert!((lw.value.as_finite().unwrap() - 4.0).abs() < 1e-12, "s = {s}");
    }
    let lw = lorentz_wasserstein(&m, &DiscreteMeasure::dirac(e(0)), &DiscreteMeasure::dirac(e(2)), 1.0).unwrap();
    assert_eq!(lw.value, ExtendedReal::ZERO);
    assert!(lw.optimal_coupling.is_none());
}

#[test]
fn lw_rejects_bad_exponents() {
    let m = diamond();
    let mu = DiscreteMeasure::dirac(e(0));
    for s in [0.0, -1.0, 1.5, f64::NAN] {
        assert!(matches!(
            lorentz_wasserstein(&m, &mu, &mu, s),
            Err(Error::InvalidParameter(_))
        ));
    }
}

#[test]
fn truncated_geometric_series() {
    // μ = δ_(0,0), ν ∝ Σ 2^-i δ_(2^i, 0) for i = 1..3
    let m = mink(&[[0.0, 0.0], [2.0, 0.0], [4.0, 0.0], [8.0, 0.0]]);
    let mu = DiscreteMeasure::dirac(e(0));
    let nu = measure(&[(1, 4, 7), (2, 2, 7), (3, 1, 7)]);
    let lw = lorentz_wasserstein(&m, &mu, &nu, 1.0).unwrap();
    assert!((lw.value.as_finite().unwrap() - 24.0 / 7.0).abs() < 1e-12);
}

#[test]
fn self_distance() {
    let m = diamond();
    let mu = measure(&[(0, 1, 3), (1, 1, 3), (3, 1, 3)]);
    assert_eq!(lorentz_wasserstein(&m, &mu, &mu, 1.0).unwrap().value, ExtendedReal::ZERO);
    let cyc = two_cycle();
    let u = measure(&[(0, 1, 2), (1, 1, 2)]);
    let lw = lorentz_wasserstein(&cyc, &u, &u, 1.0).unwrap();
    assert!(lw.value.is_infinite());
    let witness = lw.optimal_coupling.unwrap();
    assert!(verify_coupling(&cyc, &witness, &u, &u));
}

#[test]
fn infinite_probe_reroutes_mass() {
    // 0 -> 1 -> 2 <-> 3 (timelike loop), plus 0 -> 4. μ on {0, 1}, ν on {4, 2}.
    // The max flow may send 0 -> 2 and 1 -> 4 is impossible, so check both orders.
    let m: SpacetimeModel = CausalGraphModel::new(
        5,
        vec![
            Edge::timelike(0, 1, q(1, 1)),
            Edge::timelike(1, 2, q(1, 1)),
            Edge::timelike(2, 3, q(1, 1)),
            Edge::timelike(3, 2, q(1, 1)),
            Edge::timelike(0, 4, q(1, 1)),
        ],
    )
    .unwrap()
    .into();
    let mu = measure(&[(0, 1, 2), (1, 1, 2)]);
    let nu = measure(&[(4, 1, 2), (2, 1, 2)]);
    let lw = lorentz_wasserstein(&m, &mu, &nu, 1.0).unwrap();
    assert!(lw.value.is_infinite());
    // Only δ_0 reaches 4, so the single coupling is {(0,4), (1,2)} and (1,2) is infinite.
    let nu2 = measure(&[(4, 1, 2), (1, 1, 2)]);
    let mu2 = measure(&[(0, 1, 1)]);
    let lw = lorentz_wasserstein(&m, &mu2, &nu2, 1.0).unwrap();
    assert_eq!(lw.value, ExtendedReal::finite(1.0));
}

#[test]
fn max_violation_examples() {
    let m = diamond();
    assert_eq!(max_violation(&m, &measure(&[(0, 1, 2), (3, 1, 2)])).unwrap(), q(0, 1));
    assert_eq!(max_violation(&m, &DiscreteMeasure::dirac(e(2))).unwrap(), q(0, 1));
    assert_eq!(max_violation(&two_cycle(), &measure(&[(0, 1, 2), (1, 1, 2)])).unwrap(), q(1, 1));
}

/// Optimum of a small transportation LP by enumerating every basic solution:
/// each subset of cells whose columns are independent is solved directly.
fn vertex_enumeration(supply: &[f64], demand: &[f64], cells: &[(usize, usize)], cost: &[f64]) -> Option<f64> {
    let (m, n) = (supply.len(), demand.len());
    let rhs: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << cells.len()) {
        let chosen: Vec<usize> = (0..cells.len()).filter(|&k| mask >> k & 1 == 1).collect();
        if chosen.len() > m + n - 1 {
            continue;
        }
        // Augmented matrix (m + n) x (|S| + 1), Gauss-Jordan with partial pivoting.
        let mut a: Vec<Vec<f64>> = (0..m + n)
            .map(|r| {
                let mut row: Vec<f64> = chosen
                    .iter()
                    .map(|&k| {
                        let (i, j) = cells[k];
                        if r == i || r == m + j { 1.0 } else { 0.0 }
                    })
                    .collect();
                row.push(rhs[r]);
                row
            })
            .collect();
        let cols = chosen.len();
        let mut pivot_row = 0;
        let mut independent = true;
        for c in 0..cols {
            let Some(p) = (pivot_row..m + n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())) else {
                independent = false;
                break;
            };
            if a[p][c].abs() < 1e-12 {
                independent = false;
                break;
            }
            a.swap(pivot_row, p);
            let div = a[pivot_row][c];
            for v in a[pivot_row].iter_mut() {
                *v /= div;
            }
            let pivot = a[pivot_row].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != pivot_row && row[c] != 0.0 {
                    let f = row[c];
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x -= f * y;
                    }
                }
            }
            pivot_row += 1;
        }
        if !independent || (pivot_row..m + n).any(|r| a[r][cols].abs() > 1e-9) {
            continue;
        }
        let x: Vec<f64> = (0..cols).map(|r| a[r][cols]).collect();
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let value: f64 = chosen.iter().zip(&x).map(|(&k, v)| cost[k] * v).sum();
        best = Some(best.map_or(value, |b: f64| b.max(value)));
    }
    best
}

#[test]
fn vertex_oracle_sanity() {
    let v = vertex_enumeration(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0], &[(0, 0), (0, 1), (1, 0), (1, 1)], &[1.0, 5.0, 4.0, 2.0]);
    assert!((v.unwrap() - (2.5 + 4.0 / 3.0 + 1.0 / 3.0)).abs() < 1e-12);
}

/// Random DAG on `n` events: edge i -> j (i < j) with weight k/2, kind by parity.
fn arb_dag(n: usize) -> impl Strategy<Value = SpacetimeModel> {
    prop::collection::vec((0u8..4, 1i64..6), n * (n - 1) / 2).prop_map(move |raw| {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let (pick, w) = raw[k];
                k += 1;
                match pick {
                    0 => edges.push(Edge::null(i, j)),
                    1 | 2 => edges.push(Edge::timelike(i, j, q(w, 2))),
                    _ => {}
                }
            }
        }
        CausalGraphModel::new(n, edges).unwrap().into()
    })
}

fn arb_weights(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..4, n).prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
}

fn to_measure(weights: &[u32], offset: usize) -> DiscreteMeasure {
    let total: u32 = weights.iter().sum();
    DiscreteMeasure::new(
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (e(i + offset), BigRational::new(w.into(), total.into()))),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn precedence_agrees_with_up_set_scan(
        model in arb_dag(6),
        a in arb_weights(3),
        b in arb_weights(3),
    ) {
        let mu = to_measure(&a, 0);
        let nu = to_measure(&b, 3);
        let res = check_precedence(&model, &mu, &nu).unwrap();
        let brute = brute_force_violation(&model, &mu, &nu);
        prop_assert_eq!(res.is_feasible(), brute.is_none());
        match res {
            Precedence::Feasible(c) => prop_assert!(verify_coupling(&model, &c, &mu, &nu)),
            Precedence::Infeasible(cert) => prop_assert!(cert.verify(&model, &mu, &nu)),
        }
    }

    #[test]
    fn lw_matches_vertex_enumeration(
        model in arb_dag(6),
        a in arb_weights(3),
        b in arb_weights(3),
        s in prop::sample::select(vec![1.0, 0.5, 0.25]),
    ) {
        let mu = to_measure(&a, 0);
        let nu = to_measure(&b, 3);
        let lw = lorentz_wasserstein(&model, &mu, &nu, s).unwrap();
        let left: Vec<_> = mu.atoms().collect();
        let right: Vec<_> = nu.atoms().collect();
        let mut cells = Vec::new();
        let mut cost = Vec::new();
        for (i, (p, _)) in left.iter().enumerate() {
            for (j, (r, _)) in right.iter().enumerate() {
                if model.precedes(*p, *r) {
                    cells.push((i, j));
                    cost.push(model.distance(*p, *r).powf(s).to_f64());
                }
            }
        }
        let supply: Vec<f64> = left.iter().map(|(_, w)| to_f64(w)).collect();
        let demand: Vec<f64> = right.iter().map(|(_, w)| to_f64(w)).collect();
        match vertex_enumeration(&supply, &demand, &cells, &cost) {
            None => prop_assert_eq!(lw.value, ExtendedReal::ZERO),
            Some(best) => {
                let expected = best.powf(1.0 / s);
                let got = lw.value.as_finite().unwrap();
                prop_assert!((got - expected).abs() <= 1e-9 * expected.max(1.0), "{} vs {}", got, expected);
                let c = lw.optimal_coupling.unwrap();
                prop_assert!(verify_coupling(&model, &c, &mu, &nu));
            }
        }
    }

    #[test]
    fn extra_cells_never_lower_the_optimum(
        model in arb_dag(5),
        a in arb_weights(2),
        b in arb_weights(3),
        extra in prop::collection::vec((0usize..2, 2usize..5, 0.0f64..5.0), 1..4),
    ) {
        let mu = to_measure(&a, 0);
        let nu = to_measure(&b, 2);
        let base: Vec<(EventId, EventId, f64)> = mu
            .support()
            .flat_map(|p| nu.support().map(move |r| (p, r)))
            .filter(|&(p, r)| model.precedes(p, r))
            .map(|(p, r)| (p, r, model.distance(p, r).to_f64()))
            .collect();
        let mut relaxed = base.clone();
        for (p, r, c) in extra {
            if !base.iter().any(|&(x, y, _)| x == e(p) && y == e(r)) {
                relaxed.push((e(p), e(r), c));
            }
        }
        let tight = max_cost_coupling(&mu, &nu, &base).unwrap();
        let loose = max_cost_coupling(&mu, &nu, &relaxed).unwrap();
        if let Some((v, _)) = tight {
            let (w, _) = loose.expect("relaxing keeps feasibility");
            prop_assert!(w >= v - 1e-9);
        }
    }

    #[test]
    fn certificate_deficiency_is_the_flow_gap(
        model in arb_dag(5),
        a in arb_weights(3),
        b in arb_weights(2),
    ) {
        let mu = to_measure(&a, 0);
        let nu = to_measure(&b, 3);
        if let Precedence::Infeasible(cert) = check_precedence(&model, &mu, &nu).unwrap() {
            // No future set can beat the certificate: it has maximal deficiency.
            let ground: Vec<EventId> = model.events().collect();
            for mask in 0u32..(1 << ground.len()) {
                let set: BTreeSet<EventId> = (0..ground.len()).filter(|&k| mask >> k & 1 == 1).map(|k| ground[k]).collect();
                if model.future_of(set.iter().copied()).unwrap() == set {
                    let d = mu.mass_where(|p| set.contains(&p)) - nu.mass_where(|p| set.contains(&p));
                    prop_assert!(d <= cert.deficiency());
                }
            }
        }
    }
}

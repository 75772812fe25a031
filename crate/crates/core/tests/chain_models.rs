use std::sync::Arc;

use locstat::chain_models::{
    dobrushin_tv, dobrushin_vnorm, doeblin_certificate, finite_dim_law, finite_dim_law_inhom,
    inhomogeneous_product, marginal_law, marginal_laws, mouli_certificate, stationary_at,
    stationary_distribution, ApproxConstants, CountableKernelFamily, DriftSpec, FiniteKernelFamily,
    KernelFamily, StochasticMatrix,
};
use locstat::coef::{constant, uniform_grid};
use locstat::metrics::{tv_dense, DiscreteMeasure};
use locstat::Error;
use proptest::prelude::*;

fn m(rows: &[&[f64]]) -> StochasticMatrix {
    StochasticMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn two_state_affine() -> FiniteKernelFamily {
    FiniteKernelFamily::affine(
        &m(&[&[0.6, 0.4], &[0.3, 0.7]]),
        &m(&[&[0.8, 0.2], &[0.3, 0.7]]),
        "two-state",
    )
    .unwrap()
}

fn three_state_affine() -> FiniteKernelFamily {
    FiniteKernelFamily::affine(
        &m(&[&[0.6, 0.3, 0.1], &[0.2, 0.6, 0.2], &[0.1, 0.3, 0.6]]),
        &m(&[&[0.3, 0.4, 0.3], &[0.1, 0.5, 0.4], &[0.3, 0.2, 0.5]]),
        "three-state",
    )
    .unwrap()
}

#[test]
fn transition_matrix_examples() {
    let p = m(&[&[0.7, 0.3], &[0.4, 0.6]]);
    let fam = FiniteKernelFamily::constant(&p, "c").unwrap();
    assert_eq!(fam.transition_matrix(0.3).unwrap(), p);

    let aff = two_state_affine();
    assert_eq!(
        aff.transition_matrix(-0.2).unwrap(),
        aff.transition_matrix(0.0).unwrap()
    );
    let mid = aff.transition_matrix(0.5).unwrap();
    assert!(mid.max_abs_diff(&m(&[&[0.7, 0.3], &[0.3, 0.7]])) < 1e-15);
}

#[test]
fn stationary_examples() {
    let half = stationary_distribution(&m(&[&[0.5, 0.5], &[0.5, 0.5]]), 1e-12).unwrap();
    assert!((half.weights()[0] - 0.5).abs() < 1e-12);
    let pi = stationary_distribution(&m(&[&[0.7, 0.3], &[0.4, 0.6]]), 1e-12).unwrap();
    assert!((pi.weights()[0] - 4.0 / 7.0).abs() < 1e-12);
    assert!((pi.weights()[1] - 3.0 / 7.0).abs() < 1e-12);
    assert!(matches!(
        stationary_distribution(&StochasticMatrix::identity(3), 1e-12),
        Err(Error::NonErgodic { .. })
    ));
}

#[test]
fn product_examples() {
    let p = m(&[&[0.7, 0.3], &[0.4, 0.6]]);
    let fam = FiniteKernelFamily::constant(&p, "c").unwrap();
    let prod = inhomogeneous_product(&fam, 10, 3, 7).unwrap();
    assert!(prod.max_abs_diff(&p.pow(5)) < 1e-15);

    let aff = two_state_affine();
    let single = inhomogeneous_product(&aff, 10, 4, 4).unwrap();
    assert_eq!(single, aff.transition_matrix(0.4).unwrap());
    let past = inhomogeneous_product(&aff, 10, -3, 0).unwrap();
    assert!(past.max_abs_diff(&aff.transition_matrix(0.0).unwrap().pow(4)) < 1e-15);
}

#[test]
fn marginal_examples() {
    let p = m(&[&[0.7, 0.3], &[0.4, 0.6]]);
    let fam = FiniteKernelFamily::constant(&p, "c").unwrap();
    for k in [-5, 0, 7, 20] {
        let law = marginal_law(&fam, 20, k).unwrap();
        assert!((law.weights()[0] - 4.0 / 7.0).abs() < 1e-12);
    }

    let aff = two_state_affine();
    let pi0 = stationary_at(&aff, 0.0).unwrap();
    assert_eq!(marginal_law(&aff, 100, 0).unwrap().weights(), &pi0[..]);
    let c = ApproxConstants::certify(&aff, &uniform_grid(201), 10).unwrap();
    let d = tv_dense(
        marginal_law(&aff, 100, 50).unwrap().weights(),
        &stationary_at(&aff, 0.5).unwrap(),
    );
    assert!(d <= c.bound(100, 50, 1, 0.5));
    assert!(d > 0.0);
}

#[test]
fn finite_dim_examples() {
    let sym = FiniteKernelFamily::constant(&m(&[&[0.75, 0.25], &[0.25, 0.75]]), "sym").unwrap();
    assert!((finite_dim_law(&sym, 0.4, 2).unwrap().weight(&[0, 0]) - 0.375).abs() < 1e-12);

    let aff = three_state_affine();
    let one = finite_dim_law(&aff, 0.3, 1).unwrap();
    assert!(tv_dense(one.weights(), &stationary_at(&aff, 0.3).unwrap()) < 1e-14);
    let three = finite_dim_law(&aff, 0.3, 3).unwrap();
    let two = finite_dim_law(&aff, 0.3, 2).unwrap();
    assert!(three.marginalize_last().unwrap().tv_distance(&two) < 1e-14);
}

#[test]
fn dobrushin_examples() {
    assert_eq!(dobrushin_tv(&m(&[&[0.2, 0.8], &[0.2, 0.8]])), 0.0);
    assert_eq!(dobrushin_tv(&StochasticMatrix::identity(3)), 1.0);
    assert!((dobrushin_tv(&m(&[&[0.9, 0.1], &[0.2, 0.8]])) - 0.7).abs() < 1e-15);
}

#[test]
fn doeblin_examples() {
    let half = FiniteKernelFamily::constant(&m(&[&[0.5, 0.5], &[0.5, 0.5]]), "h").unwrap();
    let c = doeblin_certificate(&half, 1, &uniform_grid(5)).unwrap();
    assert_eq!((c.epsilon, c.r_bound), (1.0, 0.0));

    let id = FiniteKernelFamily::constant(&StochasticMatrix::identity(2), "id").unwrap();
    for k in 1..4 {
        assert!(matches!(
            doeblin_certificate(&id, k, &uniform_grid(5)),
            Err(Error::CertificateNotFound(_))
        ));
    }

    let pos = FiniteKernelFamily::constant(&m(&[&[0.1, 0.9], &[0.35, 0.65]]), "p").unwrap();
    assert!(
        doeblin_certificate(&pos, 1, &uniform_grid(5))
            .unwrap()
            .epsilon
            >= 0.2 - 1e-15
    );
}

fn unit_drift() -> DriftSpec {
    DriftSpec::new(
        Arc::new(|_| 1.0),
        1,
        0.5,
        0.5,
        1.0,
        0.1,
        3.0,
        0.1,
        DiscreteMeasure::dirac(0.0),
    )
    .unwrap()
}

#[test]
fn vnorm_examples() {
    let p = m(&[&[0.9, 0.05, 0.05], &[0.2, 0.5, 0.3], &[0.1, 0.1, 0.8]]);
    let d = unit_drift();
    assert!((dobrushin_vnorm(&p, &d, 1.0).unwrap() - dobrushin_tv(&p)).abs() < 1e-14);
    let rank_one = m(&[&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]]);
    assert_eq!(dobrushin_vnorm(&rank_one, &d, 0.4).unwrap(), 0.0);
}

#[test]
fn walk_certificate_contracts() {
    let (p, q, r) = (constant(0.2), constant(0.5), constant(0.3));
    let fam = CountableKernelFamily::random_walk(p.clone(), q.clone(), r.clone(), 60);
    let grid = uniform_grid(5);
    let drift = DriftSpec::random_walk(&p, &q, &r, 1.3, &grid, 0.1).unwrap();
    let cert = mouli_certificate(&fam, &drift, &grid).unwrap();
    assert!(cert.gamma < 1.0);
    let pm = fam.transition_matrix(0.5).unwrap().pow(drift.m);
    assert!(dobrushin_vnorm(&pm, &drift, cert.delta).unwrap() <= cert.gamma + 1e-12);
}

#[test]
fn unit_drift_certificate_reduces_to_tv() {
    let p = m(&[&[0.6, 0.3, 0.1], &[0.2, 0.6, 0.2], &[0.1, 0.3, 0.6]]);
    let fam = FiniteKernelFamily::constant(&p, "c").unwrap();
    let grid = uniform_grid(3);
    let cert = mouli_certificate(&fam, &unit_drift(), &grid).unwrap();
    let r = doeblin_certificate(&fam, 1, &grid).unwrap().r_bound;
    assert!(cert.gamma <= r + 1e-12);
}

#[test]
fn zero_eta_is_a_precondition_error() {
    let (p, q, r) = (constant(0.2), constant(0.5), constant(0.3));
    let fam = CountableKernelFamily::random_walk(p.clone(), q.clone(), r.clone(), 40);
    let mut drift = DriftSpec::random_walk(&p, &q, &r, 1.3, &uniform_grid(3), 0.1).unwrap();
    drift.eta = 0.0;
    assert!(matches!(
        mouli_certificate(&fam, &drift, &uniform_grid(3)),
        Err(Error::Precondition(_))
    ));
}

/// `‖δ_x Q_u^j − π_u‖_V ≤ δ^{-1} K^s γ^g (V(x) + π_u V)` for `j = mg + s`.
#[test]
fn geometric_vnorm_ergodicity() {
    let (p, q, r) = (constant(0.2), constant(0.5), constant(0.3));
    let fam = CountableKernelFamily::random_walk(p.clone(), q.clone(), r.clone(), 60);
    let grid = uniform_grid(5);
    let drift = DriftSpec::random_walk(&p, &q, &r, 1.3, &grid, 0.1).unwrap();
    let cert = mouli_certificate(&fam, &drift, &grid).unwrap();
    let v = drift.v_values(fam.state_count()).unwrap();
    let qu = fam.transition_matrix(0.5).unwrap();
    let pi = stationary_at(&fam, 0.5).unwrap();
    let pi_v: f64 = pi.iter().zip(&v).map(|(a, b)| a * b).sum();
    let mut power = StochasticMatrix::identity(fam.state_count());
    for j in 1..=60 {
        power = power.mul(&qu);
        let (g, s) = (j / drift.m, j % drift.m);
        let env = drift.k_const.powi(s as i32) * cert.gamma.powi(g as i32) / cert.delta;
        for x in [0usize, 5, 20] {
            let d: f64 = power
                .row(x)
                .iter()
                .zip(&pi)
                .zip(&v)
                .map(|((a, b), w)| w * (a - b).abs())
                .sum();
            assert!(
                d <= env * (v[x] + pi_v) + 1e-10,
                "j={j} x={x}: {d} > {}",
                env * (v[x] + pi_v)
            );
        }
    }
}

/// The approximation bound for joint laws of `j ≤ 3` consecutive states.
#[test]
fn joint_law_bound_holds() {
    let fam = three_state_affine();
    let c = ApproxConstants::certify(&fam, &uniform_grid(201), 10).unwrap();
    let n = 60;
    for j in 1..=3 {
        for k in 1..=(n - j + 1) as i64 {
            let law = finite_dim_law_inhom(&fam, n, k, j).unwrap();
            for u in [0.0, 0.25, k as f64 / n as f64, 0.9] {
                let frozen = finite_dim_law(&fam, u, j).unwrap();
                let d = law.tv_distance(&frozen);
                assert!(d <= c.bound(n, k, j, u) + 1e-12, "j={j} k={k} u={u}");
            }
        }
    }
}

#[test]
fn truncated_inar_is_a_valid_family() {
    let fam = CountableKernelFamily::inar1(constant(0.5), constant(1.0), 60);
    let pi = stationary_at(&fam, 0.5).unwrap();
    let mean: f64 = pi.iter().enumerate().map(|(x, w)| x as f64 * w).sum();
    assert!((mean - 2.0).abs() < 1e-8);
}

fn stochastic(size: usize) -> impl Strategy<Value = StochasticMatrix> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, size), size).prop_map(|rows| {
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|r| {
                let t: f64 = r.iter().sum();
                r.into_iter().map(|v| v / t).collect()
            })
            .collect();
        StochasticMatrix::from_rows(&rows).unwrap()
    })
}

fn pair(max: usize) -> impl Strategy<Value = (StochasticMatrix, StochasticMatrix)> {
    (2..=max).prop_flat_map(|s| (stochastic(s), stochastic(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dobrushin_is_submultiplicative((p, q) in pair(6)) {
        let c = dobrushin_tv(&p.mul(&q));
        prop_assert!(c <= dobrushin_tv(&p) * dobrushin_tv(&q) + 1e-12);
        prop_assert!((0.0..=1.0).contains(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stationary_law_is_a_fixed_point(p in (2usize..=6).prop_flat_map(stochastic)) {
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        let mut cur = pi.weights().to_vec();
        for _ in 0..10 {
            cur = p.left_mul(&cur);
            let res: f64 = cur.iter().zip(pi.weights()).map(|(a, b)| (a - b).abs()).sum();
            prop_assert!(res < 1e-10);
        }
    }

    #[test]
    fn continuity_of_frozen_laws((a, b) in pair(4)) {
        let fam = FiniteKernelFamily::affine(&a, &b, "rand").unwrap();
        let grid = uniform_grid(21);
        let c = ApproxConstants::certify(&fam, &grid, 4).unwrap();
        let pis: Vec<Vec<f64>> = grid.iter().map(|&u| stationary_at(&fam, u).unwrap()).collect();
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let d = tv_dense(&pis[i], &pis[j]);
                prop_assert!(d <= c.continuity_constant() * (grid[j] - grid[i]) + 1e-12);
            }
        }
    }

    #[test]
    fn marginal_laws_agree((a, b) in pair(4), k in 0i64..=30) {
        let fam = FiniteKernelFamily::affine(&a, &b, "rand").unwrap();
        let all = marginal_laws(&fam, 30).unwrap();
        let one = marginal_law(&fam, 30, k).unwrap();
        prop_assert!(tv_dense(&all[k as usize], one.weights()) < 1e-14);
        let total: f64 = one.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}

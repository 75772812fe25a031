use locstat::metrics::{
    transport_oracle, tv_distance, vnorm_distance, wasserstein_power_metric,
    wasserstein_power_paths, wasserstein_real, CostMatrix, DiscreteMeasure,
};
use locstat::Error;
use proptest::prelude::*;
use statrs::distribution::{Discrete, Poisson};

fn dm(s: &[f64], w: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::new(s.to_vec(), w.to_vec()).unwrap()
}

fn truncated_poisson(lambda: f64, n: usize) -> DiscreteMeasure {
    let p = Poisson::new(lambda).unwrap();
    let w: Vec<f64> = (0..=n as u64).map(|x| p.pmf(x)).collect();
    let t: f64 = w.iter().sum();
    DiscreteMeasure::on_states(w.into_iter().map(|v| v / t).collect()).unwrap()
}

#[test]
fn tv_examples() {
    let a = dm(&[0.0, 1.0], &[0.5, 0.5]);
    assert_eq!(tv_distance(&a, &a), 0.0);
    assert_eq!(
        tv_distance(&DiscreteMeasure::dirac(0.0), &DiscreteMeasure::dirac(1.0)),
        1.0
    );
    assert!((tv_distance(&a, &dm(&[0.0, 1.0], &[0.8, 0.2])) - 0.3).abs() < 1e-15);
}

#[test]
fn wasserstein_examples() {
    for p in [1.0, 1.5, 2.0, 3.0] {
        let w = wasserstein_real(
            &DiscreteMeasure::dirac(0.0),
            &DiscreteMeasure::dirac(1.0),
            p,
        )
        .unwrap();
        assert!((w - 1.0).abs() < 1e-15);
    }
    let bern = |a: f64| dm(&[0.0, 1.0], &[1.0 - a, a]);
    assert!((wasserstein_real(&bern(0.3), &bern(0.55), 1.0).unwrap() - 0.25).abs() < 1e-15);
    let w = wasserstein_real(
        &truncated_poisson(1.0, 60),
        &truncated_poisson(1.2, 60),
        1.0,
    )
    .unwrap();
    assert!((w - 0.2).abs() < 1e-8);
}

#[test]
fn oracle_examples() {
    let a = dm(&[0.0, 1.0, 3.0], &[0.2, 0.3, 0.5]);
    let zero = CostMatrix::from_fn(a.support(), a.support(), |x, y| (x - y).abs()).unwrap();
    let (v, plan) = transport_oracle(&a, &a, &zero).unwrap();
    assert!(v.abs() < 1e-15);
    plan.check_marginals(&a, &a, 1e-10).unwrap();

    // Couplings of (0.6, 0.4) and (0.3, 0.7) form the segment γ11 = t ∈ [0, 0.3].
    let mu = dm(&[0.0, 1.0], &[0.6, 0.4]);
    let nu = dm(&[0.0, 1.0], &[0.3, 0.7]);
    let c = CostMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
    let lp = (0..=3000)
        .map(|i| {
            let t = 0.3 * i as f64 / 3000.0;
            let (g11, g12, g21) = (t, 0.6 - t, 0.3 - t);
            let g22 = 0.4 - g21;
            2.0 * g11 + g12 + g21 + 3.0 * g22
        })
        .fold(f64::INFINITY, f64::min);
    let (v, plan) = transport_oracle(&mu, &nu, &c).unwrap();
    assert!((v - lp).abs() < 1e-12);
    plan.check_marginals(&mu, &nu, 1e-10).unwrap();
}

#[test]
fn oracle_size_cap() {
    let w = vec![1.0 / 65.0; 65];
    let big = DiscreteMeasure::on_states(w).unwrap();
    let c = CostMatrix::from_fn(big.support(), big.support(), |x, y| (x - y).abs()).unwrap();
    assert!(matches!(
        transport_oracle(&big, &big, &c),
        Err(Error::SizeCap { .. })
    ));
}

#[test]
fn vnorm_examples() {
    let a = dm(&[0.0, 1.0, 2.0], &[0.2, 0.5, 0.3]);
    let b = dm(&[0.0, 1.0, 2.0], &[0.4, 0.4, 0.2]);
    assert!((vnorm_distance(&a, &b, |_| 1.0) - 2.0 * tv_distance(&a, &b)).abs() < 1e-15);
    let d = vnorm_distance(
        &DiscreteMeasure::dirac(0.0),
        &DiscreteMeasure::dirac(1.0),
        |x| 1.0 + x * x,
    );
    assert_eq!(d, 3.0);
    assert_eq!(vnorm_distance(&a, &a, |x| 1.0 + x * x), 0.0);
}

#[test]
fn power_metric_examples() {
    let a = dm(&[0.0, 2.0], &[0.5, 0.5]);
    assert!(wasserstein_power_metric(&a, &a, 0.5).unwrap().abs() < 1e-15);
    for s in [0.2, 0.5, 0.9] {
        let d = wasserstein_power_metric(
            &DiscreteMeasure::dirac(0.0),
            &DiscreteMeasure::dirac(1.0),
            s,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }
    let d = wasserstein_power_metric(
        &DiscreteMeasure::dirac(0.0),
        &DiscreteMeasure::dirac(4.0),
        0.5,
    )
    .unwrap();
    assert!((d - 2.0).abs() < 1e-15);
}

#[test]
fn concave_cost_disagreement_is_diagnosed() {
    // Leaving the shared atom in place and moving 0 → 2 costs 2^s / 2 < 1.
    let a = dm(&[0.0, 1.0], &[0.5, 0.5]);
    let b = dm(&[1.0, 2.0], &[0.5, 0.5]);
    let paths = wasserstein_power_paths(&a, &b, 0.5).unwrap();
    assert!((paths.monotone - 1.0).abs() < 1e-15);
    assert!((paths.oracle - 0.5 * 2f64.sqrt()).abs() < 1e-12);
    assert!(matches!(
        wasserstein_power_metric(&a, &b, 0.5),
        Err(Error::Diagnostic(_))
    ));
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-10.0f64..10.0, 0.01f64..1.0), 1..8).prop_map(|atoms| {
        let t: f64 = atoms.iter().map(|a| a.1).sum();
        let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(x, w)| (x, w / t)).collect();
        DiscreteMeasure::from_atoms(&atoms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tv_is_a_metric(a in measure(), b in measure(), c in measure()) {
        prop_assert_eq!(tv_distance(&a, &b), tv_distance(&b, &a));
        prop_assert!(tv_distance(&a, &a) < 1e-15);
        prop_assert!(tv_distance(&a, &c) <= tv_distance(&a, &b) + tv_distance(&b, &c) + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&tv_distance(&a, &b)));
    }

    #[test]
    fn wasserstein_is_a_metric(a in measure(), b in measure(), c in measure(), p in 1.0f64..3.0) {
        let w = |x: &DiscreteMeasure, y: &DiscreteMeasure| wasserstein_real(x, y, p).unwrap();
        prop_assert_eq!(w(&a, &b), w(&b, &a));
        prop_assert!(w(&a, &a) < 1e-12);
        prop_assert!(w(&a, &c) <= w(&a, &b) + w(&b, &c) + 1e-12);
    }

    #[test]
    fn wasserstein_matches_oracle(a in measure(), b in measure(), p in 1.0f64..3.0) {
        let cost = CostMatrix::from_fn(a.support(), b.support(), |x, y| (x - y).abs().powf(p)).unwrap();
        let (v, plan) = transport_oracle(&a, &b, &cost).unwrap();
        plan.check_marginals(&a, &b, 1e-10).unwrap();
        let w = wasserstein_real(&a, &b, p).unwrap();
        prop_assert!((w - v.max(0.0).powf(1.0 / p)).abs() < 1e-9);
    }

    #[test]
    fn wasserstein_is_monotone_in_p(a in measure(), b in measure()) {
        let w1 = wasserstein_real(&a, &b, 1.0).unwrap();
        let w2 = wasserstein_real(&a, &b, 2.0).unwrap();
        prop_assert!(w1 <= w2 + 1e-12);
    }

    #[test]
    fn power_metric_paths_are_consistent(a in measure(), b in measure(), s in 0.1f64..0.95) {
        let paths = wasserstein_power_paths(&a, &b, s).unwrap();
        prop_assert!(paths.oracle >= -1e-12);
        prop_assert!(paths.oracle <= paths.monotone + 1e-9);
        prop_assert!(paths.oracle <= wasserstein_real(&a, &b, 1.0).unwrap().powf(s) + 1e-9);
        match wasserstein_power_metric(&a, &b, s) {
            Ok(d) => prop_assert!((d - paths.oracle).abs() < 1e-15),
            Err(e) => prop_assert!(matches!(e, Error::Diagnostic(_)) && !paths.agree(1e-9)),
        }
    }
}

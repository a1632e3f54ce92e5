use std::f64::consts::PI;

use lcr_core::analytic::{
    group_eigenvalues, lcr_direct_exact, lcr_direct_stable, lcr_numeric_cf_weighted, lcr_ris, mean_snr_speed_direct,
    mean_snr_speed_ris, omega_sq, y_moments, CfOptions, GroupingPolicy, RisLcrParams,
};
use lcr_core::channel::CorrelationMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn two_branch_exact_matches_cf() {
    let cf = CfOptions::default();
    let want = lcr_numeric_cf_weighted(1.0, &[(2.0, 1), (1.0, 1)], &cf).unwrap();
    let got = lcr_direct_exact(1.0, &[2.0, 1.0]).unwrap();
    assert!(rel(got.value, want) < 1e-6, "{} vs {want}", got.value);
    assert!(got.is_reliable());
}

#[test]
fn equal_branches_reduce_to_iid_mrc() {
    // M i.i.d. branches: √(2π)(T/λ)^{M-1/2} e^{-T/λ} / (M-1)!
    for m in [2usize, 3, 5] {
        let theta = vec![1.5; m];
        let gs = group_eigenvalues(&theta, GroupingPolicy::Fixed(0)).unwrap();
        for t in [0.3, 1.0, 2.5, 7.0] {
            let x: f64 = t / 1.5;
            let want = ((2.0 * PI).sqrt().ln() + (m as f64 - 0.5) * x.ln() - x - ln_factorial(m - 1)).exp();
            assert!(rel(lcr_direct_stable(t, &gs).unwrap(), want) < 1e-12, "M={m} T={t}");
        }
    }
}

#[test]
fn grouped_tail_tracks_exact_where_conditioned() {
    let theta = [8.0, 4.0, 2.0, 1.0];
    let gs = group_eigenvalues(&theta, GroupingPolicy::Fixed(2)).unwrap();
    assert_eq!(gs.lead(), &[8.0, 4.0]);
    assert_eq!(gs.tail_value(), 1.5);
    let ts: Vec<f64> = (0..60).map(|i| 15.0 * 10f64.powf(-2.0 + i as f64 * 0.05)).collect();
    let exact: Vec<_> = ts.iter().map(|&t| lcr_direct_exact(t, &theta).unwrap()).collect();
    let peak = exact.iter().map(|e| e.value).fold(0.0, f64::max);
    // Small-T limit of the ratio: the density scales as 1/Πθ.
    let floor = 64.0 / 72.0 - 1.0;
    let mut prev = f64::NEG_INFINITY;
    for (&t, e) in ts.iter().zip(&exact) {
        assert!(e.is_reliable());
        let err = lcr_direct_stable(t, &gs).unwrap() / e.value - 1.0;
        if e.value >= 0.5 * peak {
            assert!(err.abs() < 0.02, "T={t}: {err}");
        }
        if t < 7.5 {
            // Well below the mean the deviation moves monotonically toward the limit.
            assert!(err > floor - 1e-9 && err >= prev - 1e-9, "T={t}: {err}");
            prev = err;
        }
    }
}

#[test]
fn single_element_ris_quantities() {
    let id1 = CorrelationMatrix::identity(1).unwrap();
    assert!(rel(omega_sq(&id1, 1.0, 1.0).unwrap(), PI * PI) < 1e-12);
    let (m, v) = y_moments(&id1, 1.0).unwrap();
    assert!(rel(m, PI.sqrt() / 2.0) < 1e-12);
    assert!(rel(v, 1.0 - PI / 4.0) < 1e-12);
    let p = RisLcrParams::new(&id1, 1.0, 1.0, 1, 1.0, 1.0).unwrap();
    let oracle = (2.0 * PI).sqrt() * (-1.0f64).exp();
    assert!(rel(lcr_ris(1.0, &p).unwrap(), oracle) < 0.05);
}

#[test]
fn two_element_ris_extremes() {
    let id2 = CorrelationMatrix::identity(2).unwrap();
    let full = CorrelationMatrix::new(DMatrix::from_element(2, 2, 1.0)).unwrap();
    assert!(rel(omega_sq(&id2, 1.0, 1.0).unwrap(), 2.0 * PI * PI) < 1e-12);
    assert!(rel(omega_sq(&full, 1.0, 1.0).unwrap(), 4.0 * PI * PI) < 1e-12);
    let (m, v) = y_moments(&id2, 1.0).unwrap();
    assert!(rel(m, PI.sqrt()) < 1e-12 && rel(v, 2.0 * (1.0 - PI / 4.0)) < 1e-12);
    let (m, v) = y_moments(&full, 3.0).unwrap();
    assert!(rel(m, PI.sqrt() * 3f64.sqrt()) < 1e-12);
    assert!(rel(v, 12.0 * (1.0 - PI / 4.0)) < 1e-10);
}

#[test]
fn mean_speed_single_branch() {
    let want = PI * 2f64.sqrt();
    assert!(rel(mean_snr_speed_direct(1, 1.0, 1.0, 1.0).unwrap(), want) < 1e-12);
    assert!(rel(mean_snr_speed_ris(1, 1, 1.0, 1.0, 1.0, 1.0), want) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_tail_grouping_matches_cf(
        leads in prop::collection::btree_set(4u32..40, 1..3),
        tail_count in 1usize..4,
        t_db in -6.0f64..4.0,
    ) {
        // Leads on a 0.5 grid above a unit tail: distinct and well separated.
        let mut theta: Vec<f64> = leads.iter().rev().map(|&k| k as f64 * 0.5).collect();
        let l = theta.len();
        theta.extend(std::iter::repeat(1.0).take(tail_count));
        let gs = group_eigenvalues(&theta, GroupingPolicy::Fixed(l)).unwrap();
        let t = theta.iter().sum::<f64>() * 10f64.powf(t_db / 10.0);
        if let Ok(want) = lcr_numeric_cf_weighted(t, &gs.weighted(), &CfOptions::default()) {
            let got = lcr_direct_stable(t, &gs).unwrap();
            prop_assert!(rel(got, want) < 1e-6, "theta={theta:?} T={t}: {got} vs {want}");
        }
    }

    #[test]
    fn ris_lcr_is_finite_and_nonnegative(n in 1usize..20, rho in 0.0f64..0.95, t_db in -30.0f64..20.0) {
        let r = CorrelationMatrix::new(DMatrix::from_fn(n, n, |i, j| rho.powi((i as i32 - j as i32).abs()))).unwrap();
        let p = RisLcrParams::new(&r, 1.0, 1.0, 4, 1.0, 1.0).unwrap();
        let v = lcr_ris(10f64.powf(t_db / 10.0) * p.mean_snr(), &p).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0);
    }
}

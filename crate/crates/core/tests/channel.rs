use std::f64::consts::PI;

use lcr_core::channel::{
    layout_gains, path_gain, scaled_eigenvalues, spatial_correlation, steering_vector, ArrayGeometry, Layout,
    LayoutPreset,
};
use proptest::prelude::*;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

#[test]
fn correlation_follows_the_sinc_model() {
    let geo = ArrayGeometry::new(4, 3, 0.25).unwrap();
    let r = spatial_correlation(&geo).unwrap();
    for i in 0..geo.len() {
        for j in 0..geo.len() {
            let (xi, zi) = geo.position(i);
            let (xj, zj) = geo.position(j);
            let d = ((xi - xj).powi(2) + (zi - zj).powi(2)).sqrt();
            assert!((r.get(i, j) - sinc(2.0 * d)).abs() < 1e-14);
        }
    }
    assert!((r.get(0, 1) - 2.0 / PI).abs() < 1e-14);
}

#[test]
fn layout_a_spectrum_has_trace_m_beta() {
    let gains = layout_gains(&Layout::preset(LayoutPreset::A)).unwrap();
    let r = spatial_correlation(&ArrayGeometry::new(8, 4, 0.5).unwrap()).unwrap();
    let theta = scaled_eigenvalues(&r, gains.beta_d, 1e9).unwrap();
    let want = 32.0 * gains.beta_d * 1e9;
    assert!((theta.iter().sum::<f64>() / want - 1.0).abs() < 1e-12);
    assert!(theta.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn layout_distances() {
    for (p, dx) in [(LayoutPreset::A, 29.0), (LayoutPreset::B, 20.0), (LayoutPreset::C, 35.0)] {
        let l = Layout::preset(p);
        assert_eq!(l.d_x, dx);
        assert!((l.ue_bs_distance() - (dx * dx + 25.0f64).sqrt()).abs() < 1e-12);
    }
    assert!((path_gain(40.0, 2.0, -30.0, 1.0).unwrap() - 6.25e-7).abs() < 1e-20);
}

proptest! {
    #[test]
    fn correlation_is_a_valid_covariance(nx in 1usize..7, nz in 1usize..7, spacing in 0.05f64..1.5) {
        let r = spatial_correlation(&ArrayGeometry::new(nx, nz, spacing).unwrap()).unwrap();
        let n = nx * nz;
        let ev = r.eigenvalues();
        prop_assert!(ev.iter().all(|&l| l > -1e-10));
        prop_assert!((ev.iter().sum::<f64>() - n as f64).abs() < 1e-9 * n as f64);
        for i in 0..n {
            prop_assert_eq!(r.get(i, i), 1.0);
            for j in 0..n {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
            }
        }
    }

    #[test]
    fn steering_vectors_are_unit_modulus(nx in 1usize..9, nz in 1usize..9, th in 0.0f64..PI, ph in 0.0f64..(2.0 * PI)) {
        let a = steering_vector(&ArrayGeometry::new(nx, nz, 0.5).unwrap(), th, ph).unwrap();
        prop_assert_eq!(a.len(), nx * nz);
        prop_assert!(a.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
    }
}

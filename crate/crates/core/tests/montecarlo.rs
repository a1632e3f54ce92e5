use std::f64::consts::PI;

use lcr_core::analytic::y_moments;
use lcr_core::channel::{spatial_correlation, steering_vector, ArrayGeometry, CorrelationMatrix};
use lcr_core::montecarlo::{
    empirical_lcr, empirical_moments, gen_correlated_fading, ris_phase_cascade, snr_closed_form, snr_explicit,
    snr_series, FadingProcessConfig,
};
use lcr_core::specfun::bessel_j0;
use lcr_core::db_to_linear;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(n: usize, rate: f64, seed: u64) -> FadingProcessConfig {
    FadingProcessConfig { doppler: 1.0, sample_rate: rate, n_samples: n, n_sinusoids: 64, seed }
}

#[test]
fn autocorrelation_follows_j0() {
    let s = gen_correlated_fading(&CorrelationMatrix::identity(1).unwrap(), 1.0, &cfg(1_000_000, 128.0, 3), 0).unwrap();
    let h: Vec<Complex64> = s.samples.row(0).iter().copied().collect();
    let power = h.iter().map(|v| v.norm_sqr()).sum::<f64>() / h.len() as f64;
    let acf = |lag: usize| {
        let n = h.len() - lag;
        (0..n).map(|i| (h[i + lag] * h[i].conj()).re).sum::<f64>() / n as f64 / power
    };
    // f·τ = 49/128 sits next to the first zero of J0.
    assert!(acf(49).abs() < 0.02, "{}", acf(49));
    for lag in [8usize, 16, 32, 64, 100] {
        let want = bessel_j0(2.0 * PI * lag as f64 / 128.0).unwrap();
        assert!((acf(lag) - want).abs() < 0.02, "lag {lag}: {} vs {want}", acf(lag));
    }
}

#[test]
fn equal_time_covariance_matches_beta_r() {
    let r = spatial_correlation(&ArrayGeometry::new(3, 2, 0.25).unwrap()).unwrap();
    // The time-averaged power of a J0-correlated process converges slowly
    // (about 1% spread over 15k Doppler cycles), so spread the 10^6 samples
    // over twice as many cycles.
    let s = gen_correlated_fading(&r, 1.0, &cfg(1_000_000, 32.0, 5), 1).unwrap();
    let n = s.n_samples() as f64;
    let cov = &s.samples * s.samples.adjoint() / Complex64::new(n, 0.0);
    for i in 0..r.dim() {
        for j in 0..r.dim() {
            let err = (cov[(i, j)] - Complex64::new(r.get(i, j), 0.0)).norm();
            assert!(err < 0.02, "({i},{j}): {}", cov[(i, j)]);
        }
    }
}

#[test]
fn series_are_reproducible_per_seed_and_stream() {
    let r = CorrelationMatrix::identity(3).unwrap();
    let c = cfg(20_000, 64.0, 11);
    let a = gen_correlated_fading(&r, 2.0, &c, 4).unwrap();
    assert_eq!(a.samples, gen_correlated_fading(&r, 2.0, &c, 4).unwrap().samples);
    assert_ne!(a.samples, gen_correlated_fading(&r, 2.0, &c, 5).unwrap().samples);
    assert_ne!(a.samples, gen_correlated_fading(&r, 2.0, &cfg(20_000, 64.0, 12), 4).unwrap().samples);
}

fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

#[test]
fn explicit_phase_matrix_equals_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a_b = steering_vector(&ArrayGeometry::new(4, 2, 0.5).unwrap(), PI / 2.0, PI / 4.0).unwrap();
    let a_r = steering_vector(&ArrayGeometry::new(4, 2, 0.2).unwrap(), PI / 2.0, 1.25 * PI).unwrap();
    for _ in 0..200 {
        let hd: Vec<Complex64> = (0..8).map(|_| cn(&mut rng)).collect();
        let hur: Vec<Complex64> = (0..8).map(|_| cn(&mut rng)).collect();
        let beta_rb = rng.random_range(0.01..3.0);
        let closed = snr_closed_form(&hd, ris_phase_cascade(&hur, &a_r).unwrap(), beta_rb, &a_b, 7.0).unwrap();
        let explicit = snr_explicit(&hd, &hur, beta_rb, &a_b, &a_r, 7.0).unwrap();
        assert!(((explicit - closed) / closed).abs() < 1e-10);
    }
}

#[test]
fn snr_series_collapses_to_single_links() {
    let c = cfg(10_000, 64.0, 2);
    let geo = ArrayGeometry::new(2, 2, 0.5).unwrap();
    let a = steering_vector(&geo, PI / 2.0, PI / 4.0).unwrap();
    let hd = gen_correlated_fading(&CorrelationMatrix::identity(4).unwrap(), 1.0, &c, 0).unwrap();
    let hur = gen_correlated_fading(&CorrelationMatrix::identity(4).unwrap(), 1.0, &c, 1).unwrap();
    let direct = snr_series(Some(&hd), Some(&hur), 0.0, &a, &a, 3.0).unwrap();
    let ris = snr_series(None, Some(&hur), 0.5, &a, &a, 3.0).unwrap();
    for i in (0..10_000).step_by(97) {
        let norm: f64 = hd.at(i).iter().map(|v| v.norm_sqr()).sum();
        assert!((direct.values[i] - 3.0 * norm).abs() < 1e-12 * direct.values[i]);
        let y: f64 = hur.at(i).iter().map(|v| v.norm()).sum();
        assert!((ris.values[i] - 3.0 * 4.0 * 0.5 * y * y).abs() < 1e-12 * ris.values[i]);
    }
}

#[test]
fn rayleigh_envelope_lcr_in_the_bulk() {
    let s = gen_correlated_fading(&CorrelationMatrix::identity(1).unwrap(), 1.0, &cfg(1_000_000, 64.0, 1), 0).unwrap();
    let a = steering_vector(&ArrayGeometry::new(1, 1, 0.5).unwrap(), PI / 2.0, PI / 4.0).unwrap();
    let snr = snr_series(None, Some(&s), 1.0, &a, &a, 1.0).unwrap();
    let grid: Vec<f64> = (-10..=5).map(|d| d as f64).collect();
    let lcr = empirical_lcr(&snr, &grid).unwrap();
    for (j, &db) in grid.iter().enumerate() {
        let t = db_to_linear(db);
        let want = (2.0 * PI * t).sqrt() * (-t).exp();
        assert!(((lcr.curve.values[j] - want) / want).abs() < 0.05, "{db} dB: {} vs {want}", lcr.curve.values[j]);
    }
}

#[test]
fn envelope_sum_moments() {
    let r = spatial_correlation(&ArrayGeometry::new(4, 4, 0.1).unwrap()).unwrap();
    let s = gen_correlated_fading(&r, 1.0, &cfg(1_000_000, 64.0, 8), 0).unwrap();
    let y: Vec<f64> = s.samples.column_iter().map(|c| c.iter().map(|v| v.norm()).sum()).collect();
    let (m, v) = empirical_moments(&y).unwrap();
    let (mw, vw) = y_moments(&r, 1.0).unwrap();
    assert!(((m - mw) / mw).abs() < 0.01);
    assert!(((v - vw) / vw).abs() < 0.03);
}

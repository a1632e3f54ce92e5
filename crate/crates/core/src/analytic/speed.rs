//! Mean SNR speed `E|d SNR/dt|` for independent (identity-correlated)
//! channels. With correlated channels these are only approximations.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::specfun::ln_gamma;

/// `π f γ Γ(M + ½)/Γ(M) · 2√2/√π` with `γ = β_d E_s/σ²`.
pub fn mean_snr_speed_direct(m: usize, beta_d: f64, snr_scale: f64, f_d: f64) -> Result<f64> {
    if m == 0 {
        return domain("mean_snr_speed_direct: M must be at least 1");
    }
    let mf = m as f64;
    let ratio = (ln_gamma(mf + 0.5)? - ln_gamma(mf)?).exp();
    Ok(PI * f_d * beta_d * snr_scale * ratio * 2.0 * 2f64.sqrt() / PI.sqrt())
}

/// Large-M form `π f γ √(8M/π)`.
pub fn mean_snr_speed_direct_asymptotic(m: usize, beta_d: f64, snr_scale: f64, f_d: f64) -> f64 {
    PI * f_d * beta_d * snr_scale * (8.0 * m as f64 / PI).sqrt()
}

/// `π f β_rb β_ur (E_s/σ²) M N^{3/2} √2`.
pub fn mean_snr_speed_ris(m: usize, n: usize, beta_rb: f64, beta_ur: f64, snr_scale: f64, f_ur: f64) -> f64 {
    PI * f_ur * beta_rb * beta_ur * snr_scale * m as f64 * (n as f64).powf(1.5) * 2f64.sqrt()
}

/// Written as `π f √M N^{3/2} β_rb β_ur (E_s/σ²) √(2M)`; equal to
/// [`mean_snr_speed_ris`].
pub fn mean_snr_speed_ris_asymptotic(
    m: usize,
    n: usize,
    beta_rb: f64,
    beta_ur: f64,
    snr_scale: f64,
    f_ur: f64,
) -> f64 {
    let mf = m as f64;
    PI * f_ur * mf.sqrt() * (n as f64).powf(1.5) * beta_rb * beta_ur * snr_scale * (2.0 * mf).sqrt()
}

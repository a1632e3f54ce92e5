//! Level crossing rate (LCR) analysis for single-user RIS-aided uplinks.
//!
//! The crate is split into five layers:
//!
//! - [`specfun`]: the special functions the closed forms need (J0, ln Γ,
//!   complete elliptic integrals, ₁F₁ and a ₂F₁ specialisation).
//! - [`channel`]: array geometry, path loss, sinc spatial correlation and
//!   steering vectors.
//! - [`analytic`]: closed-form LCR of the RIS-only link (gamma approximation
//!   and exact form), the direct link (exact eigenvalue form and the stable
//!   grouped-eigenvalue form), a characteristic-function inversion oracle and
//!   mean SNR speed formulas.
//! - [`montecarlo`]: spatio-temporally correlated Rayleigh trajectories,
//!   optimal RIS phases, SNR series and empirical estimators.
//!
//! All public LCR values are normalised by the relevant Doppler frequency,
//! i.e. they count upward crossings per Doppler cycle.

pub mod analytic;
pub mod channel;
mod error;
pub mod montecarlo;
pub mod specfun;

pub use error::{LcrError, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

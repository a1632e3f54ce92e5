//! Special functions used by the closed-form LCR expressions.
//!
//! Everything here is a pure function of real scalars. Accuracy targets are
//! set so that formula error, not function error, dominates the residuals of
//! the analytic layer.

mod bessel;
mod elliptic;
mod gamma;
mod hypergeometric;

pub use bessel::bessel_j0;
pub use elliptic::{elliptic_e, elliptic_k};
pub use gamma::ln_gamma;
pub use hypergeometric::{hyp1f1, hyp2f1_corr, ln_hyp1f1};

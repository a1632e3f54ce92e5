use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grouping::GroupedSpectrum;
use super::theorem2::Theorem2Workspace;
use crate::error::{domain, LcrError, Result};
use crate::specfun::hyp1f1;

/// Result of the classical eigenvalue-expansion LCR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactLcr {
    /// Normalised LCR; meaningless when `condition` is large.
    pub value: f64,
    /// Largest summand magnitude over the result magnitude, roughly the
    /// factor by which rounding error is amplified.
    pub condition: f64,
}

impl ExactLcr {
    /// Whether the value can be trusted at double precision.
    pub fn is_reliable(&self) -> bool {
        self.value.is_finite() && self.value >= 0.0 && self.condition < 1e12
    }
}

/// Direct-link LCR from the unequal-branch MRC expansion, summed naively so
/// its cancellation is visible through [`ExactLcr::condition`].
pub fn lcr_direct_exact(t: f64, theta: &[f64]) -> Result<ExactLcr> {
    let m = theta.len();
    if m < 2 {
        return Err(LcrError::Unsupported(format!(
            "lcr_direct_exact needs at least two eigenvalues, got {m}; the single-branch case is not covered"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("lcr_direct_exact: threshold must be positive, got {t}"));
    }
    if theta.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return domain("lcr_direct_exact: eigenvalues must be positive and finite");
    }
    for i in 0..m {
        for j in 0..i {
            if theta[i] == theta[j] {
                return domain(format!(
                    "lcr_direct_exact: repeated eigenvalue {}; use the grouped stable form",
                    theta[i]
                ));
            }
        }
    }

    let prefactor = PI.sqrt() / 3.0 * (2.0 * t).powf(1.5);
    let mut sum = 0.0f64;
    let mut largest = 0.0f64;
    for n in 0..m {
        let tn = theta[n];
        let outer = (-t / tn).exp();
        for l in (0..m).filter(|&l| l != n) {
            let tl = theta[l];
            let mut term = tn.sqrt() / (tl * (tn - tl)) * hyp1f1(1.0, 2.5, -t / tl)?;
            for q in (0..m).filter(|&q| q != n && q != l) {
                term *= tl * tn / ((tl - theta[q]) * (tn - theta[q]));
            }
            let summand = prefactor * outer * term;
            largest = largest.max(summand.abs());
            sum += summand;
        }
    }
    Ok(ExactLcr { value: sum, condition: largest / sum.abs() })
}

/// Direct-link LCR of the grouped spectrum, normalised by `f_d`.
///
/// Build a [`Theorem2Workspace`] once when sweeping many thresholds.
pub fn lcr_direct_stable(t: f64, spectrum: &GroupedSpectrum) -> Result<f64> {
    Theorem2Workspace::new(spectrum)?.evaluate(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::theorem2::chi_square_lcr;

    #[test]
    fn rejects_unsupported_inputs() {
        assert!(matches!(lcr_direct_exact(1.0, &[1.0]), Err(LcrError::Unsupported(_))));
        assert!(lcr_direct_exact(1.0, &[2.0, 2.0]).is_err());
        assert!(lcr_direct_exact(0.0, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn nearly_equal_pair_approaches_two_branch_result() {
        let got = lcr_direct_exact(1.0, &[1.0 + 1e-4, 1.0 - 1e-4]).unwrap();
        let want = chi_square_lcr(1.0, 1.0, 2).unwrap();
        assert!((got.value - want).abs() < 1e-4 * want, "{} vs {want}", got.value);
    }
}

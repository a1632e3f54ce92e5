use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::CorrelationMatrix;
use crate::error::{domain, numeric, Result};
use crate::specfun::{elliptic_e, elliptic_k, hyp2f1_corr, ln_gamma};

// E(k) − (1 − k²)K(k), evaluated at the correlation magnitude.
fn envelope_kernel(rho: f64) -> Result<f64> {
    let k = rho.abs().min(1.0);
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(elliptic_e(k)? - (1.0 - k * k) * elliptic_k(k)?)
}

/// Variance of `Ẏ(t)` for `Y(t) = Σ_k |h_ur,k(t)|` under Clarke fading:
/// `π² f² β Σ_k Σ_l g(|R_kl|)` with `g(k) = E(k) − (1 − k²)K(k)`.
pub fn omega_sq(r_ur: &CorrelationMatrix, beta_ur: f64, f_ur: f64) -> Result<f64> {
    if !(beta_ur > 0.0 && f_ur > 0.0) {
        return domain(format!("omega_sq: need beta_ur > 0 and f_ur > 0, got {beta_ur}, {f_ur}"));
    }
    let n = r_ur.dim();
    let mut total = n as f64;
    for i in 0..n {
        for j in 0..i {
            total += 2.0 * envelope_kernel(r_ur.get(i, j))?;
        }
    }
    Ok(PI * PI * f_ur * f_ur * beta_ur * total)
}

/// Mean and variance of `Y = Σ_k |h_ur,k|`.
pub fn y_moments(r_ur: &CorrelationMatrix, beta_ur: f64) -> Result<(f64, f64)> {
    if !(beta_ur > 0.0) {
        return domain(format!("y_moments: beta_ur must be positive, got {beta_ur}"));
    }
    let n = r_ur.dim() as f64;
    let mean = 0.5 * n * (PI * beta_ur).sqrt();
    let var = beta_ur * (n + f_term(r_ur)?) - n * n * PI * beta_ur / 4.0;
    if !(var > 0.0) {
        return numeric(format!("y_moments: non-positive variance {var:e}"));
    }
    Ok((mean, var))
}

// (π/4) Σ_i Σ_{j≠i} ₂F₁(−½, −½; 1; |R_ij|²)
fn f_term(r_ur: &CorrelationMatrix) -> Result<f64> {
    let n = r_ur.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..i {
            let x = r_ur.get(i, j).powi(2).min(1.0);
            sum += 2.0 * hyp2f1_corr(x)?;
        }
    }
    Ok(PI / 4.0 * sum)
}

/// Everything the RIS-only LCR needs, derived from the scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisLcrParams {
    /// `E_s M β_rb / σ²`, so that `SNR_R = c Y²`.
    pub c: f64,
    /// `Var(Ẏ)` at the configured Doppler.
    pub omega_sq: f64,
    pub gamma_rate: f64,
    pub gamma_shape: f64,
    pub mean_y: f64,
    pub var_y: f64,
    pub f_term: f64,
    pub doppler: f64,
}

impl RisLcrParams {
    pub fn new(
        r_ur: &CorrelationMatrix,
        beta_ur: f64,
        beta_rb: f64,
        m: usize,
        snr_scale: f64,
        f_ur: f64,
    ) -> Result<Self> {
        let c = snr_scale * m as f64 * beta_rb;
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("RIS SNR scale c must be positive, got {c}"));
        }
        let (mean_y, var_y) = y_moments(r_ur, beta_ur)?;
        let gamma_rate = mean_y / var_y;
        Ok(RisLcrParams {
            c,
            omega_sq: omega_sq(r_ur, beta_ur, f_ur)?,
            gamma_rate,
            gamma_shape: gamma_rate * mean_y,
            mean_y,
            var_y,
            f_term: f_term(r_ur)?,
            doppler: f_ur,
        })
    }

    /// Mean RIS-only SNR, `c E[Y²]`.
    pub fn mean_snr(&self) -> f64 {
        self.c * (self.var_y + self.mean_y * self.mean_y)
    }

    /// Gamma-approximated density of `SNR_R` at `t`.
    pub fn gamma_pdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return domain(format!("gamma_pdf: threshold must be positive, got {t}"));
        }
        let (r, th) = (self.gamma_shape, self.gamma_rate);
        let y = (t / self.c).sqrt();
        let ln = r * th.ln() + (r - 1.0) * y.ln() - th * y - ln_gamma(r)? - (2.0 * self.c * y).ln();
        Ok(ln.exp())
    }
}

/// RIS-only LCR under the gamma approximation of `Y`, normalised by `f_ur`.
///
/// Evaluated in log space since `θ^r` and `Γ(r)` overflow for large N.
pub fn lcr_ris(t: f64, params: &RisLcrParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("lcr_ris: threshold must be positive, got {t}"));
    }
    let (r, th) = (params.gamma_shape, params.gamma_rate);
    let y = (t / params.c).sqrt();
    let ln = -ln_gamma(r)? + 0.5 * (params.omega_sq / (2.0 * PI)).ln() + r * th.ln() + (r - 1.0) * y.ln()
        - th * y;
    Ok(ln.exp() / params.doppler)
}

/// Exact RIS-only LCR form `√((2/π) c T ω²) · p(T)` for a caller-supplied
/// density value. With `omega_sq` taken at unit Doppler the result is
/// normalised; otherwise it is in crossings per second.
pub fn lcr_ris_exact_form(t: f64, c: f64, omega_sq: f64, pdf_at_t: f64) -> Result<f64> {
    if pdf_at_t < 0.0 || !pdf_at_t.is_finite() {
        return domain(format!("lcr_ris_exact_form: density must be non-negative, got {pdf_at_t}"));
    }
    if !(t >= 0.0 && c > 0.0 && omega_sq > 0.0) {
        return domain(format!("lcr_ris_exact_form: bad arguments T={t}, c={c}, ω²={omega_sq}"));
    }
    Ok((2.0 / PI * c * t * omega_sq).sqrt() * pdf_at_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn full(n: usize) -> CorrelationMatrix {
        CorrelationMatrix::new(DMatrix::from_element(n, n, 1.0)).unwrap()
    }

    #[test]
    fn omega_sq_limits() {
        let id1 = CorrelationMatrix::identity(1).unwrap();
        assert!((omega_sq(&id1, 1.0, 1.0).unwrap() - PI * PI).abs() < 1e-12);
        let id2 = CorrelationMatrix::identity(2).unwrap();
        assert!((omega_sq(&id2, 1.0, 1.0).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        assert!((omega_sq(&full(2), 1.0, 1.0).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_envelope_moments() {
        let (m, v) = y_moments(&CorrelationMatrix::identity(1).unwrap(), 1.0).unwrap();
        assert!((m - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((v - (1.0 - PI / 4.0)).abs() < 1e-15);
        let (m2, v2) = y_moments(&CorrelationMatrix::identity(2).unwrap(), 1.0).unwrap();
        assert!((m2 - PI.sqrt()).abs() < 1e-15);
        assert!((v2 - 2.0 * (1.0 - PI / 4.0)).abs() < 1e-14);
        // Y = 2|h| when both elements see the same channel.
        let (_, vf) = y_moments(&full(2), 1.0).unwrap();
        assert!((vf - 4.0 * (1.0 - PI / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn gamma_form_is_close_to_rayleigh_for_one_element() {
        let p = RisLcrParams::new(&CorrelationMatrix::identity(1).unwrap(), 1.0, 1.0, 1, 1.0, 1.0).unwrap();
        let exact = (2.0 * PI).sqrt() * (-1.0f64).exp();
        let got = lcr_ris(1.0, &p).unwrap();
        assert!((got - exact).abs() < 0.05 * exact, "{got} vs {exact}");
        assert!(lcr_ris(1e-12, &p).unwrap() < 1e-4);
        assert!(lcr_ris(1e3, &p).unwrap() < 1e-10);
    }

    #[test]
    fn exact_form_with_exponential_density() {
        for &t in &[0.01, 0.3, 1.0, 4.0, 10.0] {
            let got = lcr_ris_exact_form(t, 1.0, PI * PI, (-t).exp()).unwrap();
            let want = (2.0 * PI * t).sqrt() * (-t).exp();
            assert!((got - want).abs() < 1e-12 * want);
        }
        assert_eq!(lcr_ris_exact_form(1.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(lcr_ris_exact_form(1.0, 1.0, 1.0, -1e-3).is_err());
    }

    #[test]
    fn gamma_lcr_matches_exact_form_with_gamma_density() {
        let r = crate::channel::spatial_correlation(&crate::channel::ArrayGeometry::new(4, 4, 0.3).unwrap()).unwrap();
        let p = RisLcrParams::new(&r, 2e-3, 1e-3, 8, 1e6, 1.0).unwrap();
        for &t in &[0.5, 2.0, 10.0, 40.0] {
            let t = t * p.mean_snr() / 10.0;
            let a = lcr_ris(t, &p).unwrap();
            let b = lcr_ris_exact_form(t, p.c, p.omega_sq, p.gamma_pdf(t).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-12 * a.max(1e-300));
        }
    }
}

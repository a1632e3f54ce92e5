//! Characteristic-function inversion of the direct-link LCR.
//!
//! With `X = Σ λ_i |g_i|²` and Clarke fading on every branch, the joint
//! transform of `(X, Ẋ)` is `P(z, ω) = Π_i (1 + z λ_i + c λ_i² ω²)^{−n_i}` with
//! `c = 2π² f²`. Since `Ẋ` is conditionally symmetric,
//! `E[Ẋ⁺ δ(X − T)]` has Laplace transform
//!
//! ```text
//! H(z) = (1/π) ∫₀^∞ (P(z, 0) − P(z, ω)) / ω² dω,
//! ```
//!
//! which is integrated by adaptive Gauss–Kronrod and inverted along a
//! Talbot-type parabolic contour. Nothing here shares code with the closed
//! forms, which makes it usable as an oracle for them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grouping::GroupedSpectrum;
use crate::error::{domain, numeric, Result};

/// Accuracy knobs for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfOptions {
    /// Contour nodes of the main evaluation.
    pub nodes: usize,
    /// Contour nodes of the control evaluation used to bound truncation.
    pub control_nodes: usize,
    /// Relative tolerance of the inner ω integral.
    pub inner_tol: f64,
    /// Largest accepted relative disagreement between the two evaluations.
    pub max_discrepancy: f64,
}

impl Default for CfOptions {
    fn default() -> Self {
        CfOptions { nodes: 40, control_nodes: 32, inner_tol: 1e-13, max_discrepancy: 1e-6 }
    }
}

// 7-point Gauss / 15-point Kronrod pair on [−1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

// Returns the Kronrod estimate, its error and the Kronrod estimate of ∫|f|.
fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        kron += (lo + hi) * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm(), abs * h.abs())
}

// Floor on the inner error relative to ∫|f|; below it the integral is lost to
// cancellation of the integrand anyway.
const ABS_FLOOR: f64 = 1e-15;

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let (first, err, abs) = gauss_kronrod(f, a, b);
    let mut parts = vec![(a, b, first, err, abs)];
    for _ in 0..2000 {
        let total: Complex64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let l1: f64 = parts.iter().map(|p| p.4).sum();
        if err <= (tol * total.norm()).max(ABS_FLOOR * l1).max(f64::MIN_POSITIVE) {
            return Ok(total);
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, ..) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (l, le, la) = gauss_kronrod(f, lo, mid);
        let (r, re, ra) = gauss_kronrod(f, mid, hi);
        parts.push((lo, mid, l, le, la));
        parts.push((mid, hi, r, re, ra));
    }
    let err: f64 = parts.iter().map(|p| p.3).sum();
    numeric(format!("CF oracle: inner quadrature stalled with error estimate {err:e}"))
}

fn ln_1p(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        // Alternating series; 7 terms reach 1e-21 at |x| = 1e-3.
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = x;
        for n in 1..=7 {
            let term = pow / n as f64;
            sum += if n % 2 == 1 { term } else { -term };
            pow *= x;
        }
        sum
    } else {
        (1.0 + x).ln()
    }
}

fn exp_m1(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for n in 1..=7 {
            term = term * x / n as f64;
            sum += term;
        }
        sum
    } else {
        x.exp() - 1.0
    }
}

// H(z) for the weighted spectrum, at unit Doppler.
fn laplace_h(z: Complex64, spectrum: &[(f64, usize)], tol: f64) -> Result<Complex64> {
    let c = 2.0 * PI * PI;
    let base: Vec<Complex64> = spectrum.iter().map(|&(l, _)| 1.0 + z * l).collect();
    let p0 = spectrum
        .iter()
        .zip(&base)
        .fold(Complex64::new(1.0, 0.0), |acc, (&(_, n), b)| acc / b.powi(n as i32));
    let (lmax, bmax) = spectrum
        .iter()
        .zip(&base)
        .map(|(&(l, _), b)| (l, b))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| crate::LcrError::Domain("empty spectrum".into()))?;
    // ω scale where the dominant branch starts to decorrelate.
    let s = (bmax.norm() / (c * lmax * lmax)).sqrt();
    let integrand = |phi: f64| {
        let (sin, cos) = phi.sin_cos();
        if sin == 0.0 {
            // D(ω) ~ ω² P0 Σ n c λ²/(1 + zλ) as ω → 0.
            let slope: Complex64 = spectrum
                .iter()
                .zip(&base)
                .map(|(&(l, n), b)| n as f64 * c * l * l / b)
                .sum();
            return p0 * slope * s;
        }
        let w = s * sin / cos;
        let mut log_ratio = Complex64::new(0.0, 0.0);
        for (&(l, n), b) in spectrum.iter().zip(&base) {
            log_ratio += n as f64 * ln_1p(c * l * l * w * w / b);
        }
        -p0 * exp_m1(-log_ratio) / (s * sin * sin)
    };
    Ok(adaptive(&integrand, 0.0, 0.5 * PI, tol)? / PI)
}

fn invert(t: f64, spectrum: &[(f64, usize)], nodes: usize, tol: f64) -> Result<f64> {
    let n = nodes as f64;
    let h = 3.0 / n;
    let mu = PI * n / (12.0 * t);
    let mut acc = 0.0;
    for k in 0..=nodes {
        let u = k as f64 * h;
        let iu = Complex64::new(1.0, u);
        let z = mu * iu * iu;
        let dz = Complex64::new(0.0, 2.0 * mu) * iu;
        let x = (z * t).exp() * laplace_h(z, spectrum, tol)? * dz;
        acc += if k == 0 { 0.5 * x.im } else { x.im };
    }
    Ok(h * acc / PI)
}

/// Direct-link LCR of an arbitrary spectrum given as `(value, multiplicity)`
/// pairs, normalised by the Doppler frequency.
pub fn lcr_numeric_cf_weighted(t: f64, spectrum: &[(f64, usize)], opts: &CfOptions) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("CF oracle: threshold must be positive, got {t}"));
    }
    if spectrum.is_empty() || spectrum.iter().any(|&(l, n)| !(l > 0.0 && l.is_finite()) || n == 0) {
        return domain("CF oracle: need a non-empty spectrum of positive values with positive multiplicity");
    }
    let main = invert(t, spectrum, opts.nodes, opts.inner_tol)?;
    let control = invert(t, spectrum, opts.control_nodes, opts.inner_tol)?;
    let gap = (main - control).abs();
    if gap > opts.max_discrepancy * main.abs() {
        return numeric(format!(
            "CF oracle: contour truncation not controlled at T={t}: {main:e} vs {control:e} \
             ({} vs {} nodes)",
            opts.nodes, opts.control_nodes
        ));
    }
    Ok(main.max(0.0))
}

/// [`lcr_numeric_cf_weighted`] applied to a grouped spectrum.
pub fn lcr_direct_numeric_cf(t: f64, spectrum: &GroupedSpectrum) -> Result<f64> {
    lcr_numeric_cf_weighted(t, &spectrum.weighted(), &CfOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;

    fn iid(t: f64, lambda: f64, s: usize) -> f64 {
        let x = t / lambda;
        ((2.0 * PI).sqrt().ln() + (s as f64 - 0.5) * x.ln() - x - ln_gamma(s as f64).unwrap()).exp()
    }

    #[test]
    fn single_branch_rayleigh() {
        for &t in &[0.05, 0.5, 1.0, 3.0] {
            let got = lcr_numeric_cf_weighted(t, &[(1.0, 1)], &CfOptions::default()).unwrap();
            let want = iid(t, 1.0, 1);
            assert!((got - want).abs() < 1e-8 * want, "T={t}: {got} vs {want}");
        }
    }

    #[test]
    fn iid_branches() {
        for &(lam, s, t) in &[(1.0, 2usize, 1.0), (2.5, 4, 7.0), (0.3, 8, 3.0)] {
            let got = lcr_numeric_cf_weighted(t, &[(lam, s)], &CfOptions::default()).unwrap();
            let want = iid(t, lam, s);
            assert!((got - want).abs() < 1e-8 * want, "λ={lam} S={s}: {got} vs {want}");
        }
    }
}

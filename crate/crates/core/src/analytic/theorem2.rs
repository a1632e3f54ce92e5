//! Grouped-eigenvalue direct-link LCR.
//!
//! The closed form is a residue expansion: `L` simple poles plus one pole of
//! order up to `S`. Every product, power and Γ ratio is formed as a signed
//! logarithm and exponentiated once per term. Below the mean SNR the terms
//! themselves still cancel (by ~10¹⁷ for 2 lead values and a 30-fold tail),
//! so when the measured cancellation would leave fewer than about ten
//! significant digits the same expansion is re-evaluated in multiprecision.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grouping::GroupedSpectrum;
use super::theorem2_mp;
use crate::error::{domain, numeric, Result};
use crate::specfun::{ln_gamma, ln_hyp1f1};

/// Largest `|Im| / |Re|` tolerated before the result is treated as an
/// index-convention fault.
pub const IMAG_TOLERANCE: f64 = 1e-8;

/// Cancellation factor above which the double-precision sum is discarded in
/// favour of the multiprecision one.
pub const CANCELLATION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SignedLog {
    pub(crate) ln: f64,
    pub(crate) negative: bool,
}

impl SignedLog {
    fn one() -> Self {
        SignedLog { ln: 0.0, negative: false }
    }

    fn from(x: f64) -> Self {
        SignedLog { ln: x.abs().ln(), negative: x < 0.0 }
    }

    fn mul(self, o: SignedLog) -> Self {
        SignedLog { ln: self.ln + o.ln, negative: self.negative ^ o.negative }
    }

    fn div(self, o: SignedLog) -> Self {
        SignedLog { ln: self.ln - o.ln, negative: self.negative ^ o.negative }
    }

    fn powi(self, n: i32) -> Self {
        SignedLog { ln: self.ln * n as f64, negative: self.negative && n % 2 != 0 }
    }

    fn scale_ln(self, ln: f64) -> Self {
        SignedLog { ln: self.ln + ln, negative: self.negative }
    }

    pub(crate) fn value(self) -> f64 {
        let v = self.ln.exp();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

// (−1)^x on the principal branch.
fn unit_phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x)
}

/// Outcome of one grouped-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Eval {
    /// Normalised LCR.
    pub value: f64,
    /// Largest term over the result in the double-precision pass.
    pub cancellation: f64,
    /// Working precision in bits of the accepted pass (53 for plain f64).
    pub precision_bits: usize,
}

/// Spectrum-dependent coefficients of the grouped form.
#[derive(Debug, Clone)]
pub struct Theorem2Workspace {
    lead: Vec<f64>,
    tail: f64,
    s: usize,
    /// κ0·B_r (the (2π²)^{L+S} factors cancel, leaving √(2π²)).
    kappa_b: Vec<SignedLog>,
    /// κ0·C_k·D_{r,k} for k = 1..=S.
    kappa_cd: Vec<Vec<SignedLog>>,
    /// Row r: A_{t,r} for lead t, then A_{L+1,r} last.
    a: Vec<Vec<f64>>,
}

impl Theorem2Workspace {
    pub fn new(spectrum: &GroupedSpectrum) -> Result<Self> {
        let lead = spectrum.lead().to_vec();
        let tail = spectrum.tail_value();
        let s = spectrum.tail_count();
        let l = lead.len();
        if lead.iter().chain([&tail]).any(|&x| !(x > 0.0 && x.is_finite())) {
            return domain("grouped LCR: eigenvalues must be positive and finite");
        }
        let ln_prod_lead: f64 = lead.iter().map(|x| x.ln()).sum();
        let total = (l + s) as f64;
        let common = -ln_prod_lead - 2.0 * s as f64 * tail.ln() + 0.5 * (2.0 * PI * PI).ln();
        let c = c_coefficients(s)?;

        let mut kappa_b = Vec::with_capacity(l);
        let mut kappa_cd = Vec::with_capacity(l);
        let mut a = Vec::with_capacity(l);
        for r in 0..l {
            let lr = lead[r];
            let mut diff = SignedLog::one();
            for (i, &li) in lead.iter().enumerate() {
                if i != r {
                    diff = diff.mul(SignedLog::from(li - lr));
                }
            }
            let gap = SignedLog::from(tail - lr);
            kappa_b.push(
                SignedLog::one()
                    .scale_ln(common + (total - 0.5) * lr.ln() + s as f64 * tail.ln())
                    .div(diff)
                    .div(gap.powi(s as i32)),
            );
            let row = (1..=s)
                .map(|k| {
                    SignedLog::one()
                        .scale_ln(common + (total - k as f64 - 1.0) * lr.ln() + (s as f64 + 1.5) * tail.ln())
                        .div(diff)
                        .div(gap.powi((s - k + 1) as i32))
                        .mul(c[k - 1])
                })
                .collect();
            kappa_cd.push(row);
            let mut ar: Vec<f64> = lead.iter().map(|&li| (li + lr) / (li * lr)).collect();
            ar.push((tail + lr) / (tail * lr));
            a.push(ar);
        }
        Ok(Theorem2Workspace { lead, tail, s, kappa_b, kappa_cd, a })
    }

    pub fn lead(&self) -> &[f64] {
        &self.lead
    }

    pub fn tail_value(&self) -> f64 {
        self.tail
    }

    pub fn tail_count(&self) -> usize {
        self.s
    }

    // Adds the terms of I(r, p, s, k) scaled by coef·j/(4π).
    #[allow(clippy::too_many_arguments)]
    fn add_i_terms(
        &self,
        acc: &mut Accumulator,
        coef: SignedLog,
        t: f64,
        r: usize,
        p: usize,
        mu: f64,
        k: usize,
    ) -> Result<()> {
        let l = self.lead.len();
        let ar = &self.a[r];
        let a0 = ar[l];
        let kf = k as f64;
        let ln_t = t.ln();
        // j/(4π) · 2π
        let outer = Complex64::new(0.0, 0.5);
        let others: Vec<usize> = (0..l).filter(|&i| i != r).collect();

        // Simple poles at the lead A_{t,r}.
        let phase = outer * unit_phase(kf + 1.5);
        for &ti in &others {
            let at = ar[ti];
            let mut den = SignedLog::from(at - a0).powi(p as i32);
            for &mi in others.iter().filter(|&&mi| mi != ti) {
                den = den.mul(SignedLog::from(at - ar[mi]));
            }
            let ln_rest = (kf + 0.5) * ln_t + ln_hyp1f1(kf + 0.5, kf + 1.5, (at - mu) * t)?
                - at * t
                - ln_gamma(kf + 1.5)?;
            acc.add(coef.div(den).scale_ln(ln_rest), phase);
        }

        // Pole of order p at A_{L+1,r}.
        let phase = outer * unit_phase(p as f64 + kf + 0.5);
        for m in 1..=p {
            let Some(weight) = pole_weight(ar, a0, &others, p, m) else { continue };
            let mf = m as f64;
            let ln_rest = (mf + kf - 0.5) * ln_t
                + ln_hyp1f1(kf + 0.5, mf + kf + 0.5, (a0 - mu) * t)?
                - a0 * t
                - ln_gamma(mf + kf + 0.5)?;
            acc.add(coef.mul(SignedLog::from(weight)).scale_ln(ln_rest), phase);
        }
        Ok(())
    }

    fn evaluate_f64(&self, t: f64) -> Result<(Complex64, f64)> {
        let mut acc = Accumulator::default();
        for r in 0..self.lead.len() {
            self.add_i_terms(&mut acc, self.kappa_b[r], t, r, self.s, 1.0 / self.lead[r], 1)?;
            for k in 1..=self.s {
                self.add_i_terms(&mut acc, self.kappa_cd[r][k - 1], t, r, self.s - k + 1, 1.0 / self.tail, k)?;
            }
        }
        Ok((acc.sum, acc.largest))
    }

    /// Normalised LCR at `t` with diagnostics.
    pub fn evaluate_detailed(&self, t: f64) -> Result<Theorem2Eval> {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("grouped LCR: threshold must be positive, got {t}"));
        }
        if self.lead.is_empty() {
            return Ok(Theorem2Eval { value: chi_square_lcr(t, self.tail, self.s)?, cancellation: 1.0, precision_bits: 53 });
        }
        let (sum, largest) = self.evaluate_f64(t)?;
        if !(sum.re.is_finite() && sum.im.is_finite() && largest.is_finite()) {
            return numeric(format!("grouped LCR: non-finite intermediate at T={t}"));
        }
        let cancellation = largest / sum.re.abs();
        if cancellation <= CANCELLATION_LIMIT {
            if sum.im.abs() > IMAG_TOLERANCE * sum.re.abs() {
                return numeric(format!(
                    "grouped LCR: imaginary residue {:e} against real part {:e} at T={t}",
                    sum.im, sum.re
                ));
            }
            if sum.re < 0.0 {
                return numeric(format!("grouped LCR: negative value {:e} at T={t}", sum.re));
            }
            return Ok(Theorem2Eval { value: sum.re, cancellation, precision_bits: 53 });
        }
        let (value, bits) = theorem2_mp::evaluate(self, t)?;
        if value < 0.0 {
            return numeric(format!("grouped LCR: negative value {value:e} at T={t}"));
        }
        Ok(Theorem2Eval { value, cancellation, precision_bits: bits })
    }

    /// Normalised LCR at `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        Ok(self.evaluate_detailed(t)?.value)
    }
}

/// Partial-fraction weight of the `(z − A_{L+1,r})^{−m}` term. With a single
/// lead value there are no simple poles and the order-`p` term stands alone.
fn pole_weight(ar: &[f64], a0: f64, others: &[usize], p: usize, m: usize) -> Option<f64> {
    if others.is_empty() {
        return (m == p).then_some(1.0);
    }
    let mut w = 0.0;
    for &ti in others {
        let at = ar[ti];
        let mut den = SignedLog::from(a0 - at).powi((p - m + 1) as i32);
        for &qi in others.iter().filter(|&&qi| qi != ti) {
            den = den.mul(SignedLog::from(at - ar[qi]));
        }
        w += SignedLog::one().div(den).value();
    }
    Some(w)
}

#[derive(Default)]
struct Accumulator {
    sum: Complex64,
    largest: f64,
}

impl Accumulator {
    fn add(&mut self, mag: SignedLog, phase: Complex64) {
        let v = phase * mag.value();
        self.largest = self.largest.max(v.norm());
        self.sum += v;
    }
}

/// `C_k = Σ_s (−1)^k 4^{1−k} binom(2s−2, s−1) binom(2k−2s, k−s) k/s`.
pub(crate) fn c_coefficients(s_max: usize) -> Result<Vec<SignedLog>> {
    let ln_binom = |n: usize, k: usize| -> Result<f64> {
        Ok(ln_gamma(n as f64 + 1.0)? - ln_gamma(k as f64 + 1.0)? - ln_gamma((n - k) as f64 + 1.0)?)
    };
    let mut out = Vec::with_capacity(s_max);
    for k in 1..=s_max {
        let kf = k as f64;
        let mut sum = 0.0;
        for s in 1..=k {
            let ln = ln_binom(2 * s - 2, s - 1)? + ln_binom(2 * k - 2 * s, k - s)? + kf.ln()
                - (s as f64).ln()
                - (kf - 1.0) * 4f64.ln();
            sum += ln.exp();
        }
        out.push(SignedLog { ln: sum.ln(), negative: k % 2 == 1 });
    }
    Ok(out)
}

/// LCR of a sum of `s` i.i.d. exponential branches with mean `lambda`.
pub(crate) fn chi_square_lcr(t: f64, lambda: f64, s: usize) -> Result<f64> {
    let sf = s as f64;
    let x = t / lambda;
    Ok((0.5 * (2.0 * PI).ln() + (sf - 0.5) * x.ln() - x - ln_gamma(sf)?).exp())
}

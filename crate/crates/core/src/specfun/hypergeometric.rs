use std::f64::consts::PI;

use super::elliptic::{elliptic_e, elliptic_k};
use super::gamma::ln_gamma;
use crate::error::{domain, numeric, Result};

const MAX_TERMS: usize = 10_000;
const TAIL_TOL: f64 = 1e-15;
// Above this argument the positive-term series is replaced by the
// large-argument expansion, which needs far fewer terms.
const ASYMPTOTIC_FROM: f64 = 80.0;

fn is_non_positive_integer(b: f64) -> bool {
    b <= 0.0 && b.fract() == 0.0
}

/// Confluent hypergeometric function ₁F₁(a; b; z).
///
/// For `z < 0` with `b > a > 0` the Kummer transformation
/// `₁F₁(a; b; z) = e^z ₁F₁(b − a; b; −z)` turns the alternating series into
/// one with positive terms, so no cancellation occurs however large |z| is.
/// With `b ≤ a` the transformation is still applied; other parameter
/// combinations are summed directly.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_non_positive_integer(b) {
        return domain(format!("hyp1f1: b = {b} is a non-positive integer"));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return domain(format!("hyp1f1: non-finite argument ({a}, {b}, {z})"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if a > 0.0 && b > 0.0 && (z > 0.0 || b > a) {
        return Ok(ln_hyp1f1(a, b, z)?.exp());
    }
    if z < 0.0 && a > 0.0 && b > 0.0 {
        // b ≤ a: the transformed series changes sign at most ⌈a − b⌉ times.
        return Ok(z.exp() * direct_series(b - a, b, -z)?);
    }
    direct_series(a, b, z)
}

/// ln ₁F₁(a; b; z) for `a > 0`, `b > 0`, and `b > a` whenever `z < 0`.
///
/// Under these conditions the function is strictly positive. The logarithm
/// lets callers combine it with exponentials and large prefactors without
/// overflow.
pub fn ln_hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("ln_hyp1f1: need a > 0 and b > 0, got a={a}, b={b}"));
    }
    if !z.is_finite() {
        return domain(format!("ln_hyp1f1: non-finite argument {z}"));
    }
    if z >= 0.0 {
        return Ok(ln_positive_shifted(a, b, z)? + z);
    }
    if b <= a {
        return domain(format!(
            "ln_hyp1f1: z < 0 requires b > a for a positive Kummer series, got a={a}, b={b}"
        ));
    }
    // e^z cancels the e^{−z} growth exactly.
    ln_positive_shifted(b - a, b, -z)
}

// ln ₁F₁(a; b; x) − x with a, b > 0 and x ≥ 0 (all terms positive). The
// shift keeps the large-x branch free of cancellation after Kummer.
fn ln_positive_shifted(a: f64, b: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if x >= ASYMPTOTIC_FROM {
        if let Some(v) = ln_asymptotic(a, b, x)? {
            return Ok(v);
        }
    }
    // Positive-term series with a running exponent so the partial sums
    // never overflow.
    let mut scale = 0.0f64;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * x / ((b + nf) * (nf + 1.0));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            scale += 250.0 * std::f64::consts::LN_10;
        }
        // Once terms are decreasing the tail is bounded by a geometric
        // series with the current ratio.
        let ratio = (a + nf + 1.0) * x / ((b + nf + 1.0) * (nf + 2.0));
        if ratio < 1.0 && term / (1.0 - ratio) <= TAIL_TOL * sum {
            return Ok(sum.ln() + scale - x);
        }
    }
    numeric(format!(
        "hyp1f1({a}, {b}, {x}): series did not converge in {MAX_TERMS} terms (last term/sum = {:.3e})",
        term / sum
    ))
}

// Large-x expansion: Γ(b)/Γ(a) e^x x^{a−b} Σ (b−a)_n (1−a)_n / (n! x^n),
// returned without the e^x factor. Returns None when the series cannot reach full precision.
fn ln_asymptotic(a: f64, b: f64, x: f64) -> Result<Option<f64>> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for n in 0..200 {
        let nf = n as f64;
        term *= (b - a + nf) * (1.0 - a + nf) / ((nf + 1.0) * x);
        if term == 0.0 {
            break;
        }
        if term.abs() >= prev {
            return Ok(None);
        }
        prev = term.abs();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    if !(sum > 0.0) {
        return Ok(None);
    }
    Ok(Some(
        ln_gamma(b)? - ln_gamma(a)? + (a - b) * x.ln() + sum.ln(),
    ))
}

fn direct_series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut max_term = 1.0f64;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        max_term = max_term.max(term.abs());
        if term == 0.0 || (term.abs() <= TAIL_TOL * sum.abs() && nf > (a * z / b).abs()) {
            if !sum.is_finite() {
                break;
            }
            return Ok(sum);
        }
    }
    numeric(format!(
        "hyp1f1({a}, {b}, {z}): direct series did not converge in {MAX_TERMS} terms \
         (partial sum {sum:.6e}, largest term {max_term:.3e})"
    ))
}

/// ₂F₁(−½, −½; 1; x) on [0, 1].
///
/// Summed directly for x ≤ ½; above that the closed form
/// `(2/π)(2E(k) − (1 − k²)K(k))` with `k = √x` avoids the slow algebraic
/// tail of the series near x = 1.
pub fn hyp2f1_corr(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("hyp2f1_corr: argument must lie in [0, 1], got {x}"));
    }
    if x <= 0.5 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for n in 0..200 {
            let nf = n as f64;
            let c = (nf - 0.5) / (nf + 1.0);
            term *= c * c * x;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return Ok(sum);
    }
    if x == 1.0 {
        return Ok(4.0 / PI);
    }
    let k = x.sqrt();
    Ok(2.0 / PI * (2.0 * elliptic_e(k)? - (1.0 - x) * elliptic_k(k)?))
}

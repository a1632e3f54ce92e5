use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

const SERIES_LIMIT: f64 = 8.0;
const RECURRENCE_LIMIT: f64 = 30.0;

/// Bessel function of the first kind, order zero.
///
/// Three regimes: the power series for |x| ≤ 8, Miller's backward recurrence
/// normalised by `J0 + 2ΣJ_2k = 1` for 8 < |x| ≤ 30, and the Hankel
/// asymptotic expansion beyond. Absolute error stays below 1e-12 up to
/// |x| = 1e4.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("bessel_j0: non-finite argument {x}"));
    }
    let x = x.abs();
    Ok(if x <= SERIES_LIMIT {
        j0_series(x)
    } else if x <= RECURRENCE_LIMIT {
        j0_miller(x)
    } else {
        j0_asymptotic(x)
    })
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && term.abs() < 1e-17 {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    // Start well above the turning point n ≈ x so the minimal solution
    // dominates by the time the recurrence reaches n = 0.
    let mut n = (x + 30.0 + 4.0 * x.cbrt()) as usize;
    n += n % 2;
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 0.0;
    for k in (1..=n).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds the unnormalised J_{k-1}.
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    j_cur / (norm + j_cur)
}

fn j0_asymptotic(x: f64) -> f64 {
    // P and Q from the Hankel expansion with a_k = Π(-(2i-1)^2) / (k! 8^k).
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= -(odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_reference_value() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!((bessel_j0(1.0).unwrap() - 0.7651976865579666).abs() < 1e-15);
    }

    #[test]
    fn first_zero() {
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-10);
    }

    #[test]
    fn regimes_agree_at_the_seams() {
        let x = SERIES_LIMIT;
        assert!((j0_series(x) - j0_miller(x)).abs() < 1e-13);
        let x = RECURRENCE_LIMIT;
        assert!((j0_miller(x) - j0_asymptotic(x)).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
    }
}

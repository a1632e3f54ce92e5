//! Complete elliptic integrals in the modulus convention:
//!
//! ```text
//! K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)
//! E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ
//! ```
//!
//! Both are evaluated with the arithmetic-geometric mean, which converges
//! quadratically.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, LcrError, Result};

const AGM_TOL: f64 = 1e-14;

struct Agm {
    mean: f64,
    // Σ 2^{n-1} c_n², starting with c_0 = k.
    weighted_c2: f64,
}

fn agm(k: f64) -> Agm {
    let mut a = 1.0f64;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut weighted_c2 = 0.5 * k * k;
    let mut pow2 = 0.5;
    for _ in 0..64 {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        pow2 *= 2.0;
        weighted_c2 += pow2 * c * c;
    }
    Agm { mean: a, weighted_c2 }
}

fn check_modulus(k: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return domain(format!("{name}: modulus must lie in [0, 1], got {k}"));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, modulus convention, 0 ≤ k < 1.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k, "elliptic_k")?;
    if k == 1.0 {
        return Err(LcrError::Divergence("elliptic_k: K(1) is infinite".into()));
    }
    Ok(FRAC_PI_2 / agm(k).mean)
}

/// Complete elliptic integral of the second kind, modulus convention, 0 ≤ k ≤ 1.
pub fn elliptic_e(k: f64) -> Result<f64> {
    check_modulus(k, "elliptic_e")?;
    if k == 1.0 {
        return Ok(1.0);
    }
    let g = agm(k);
    Ok(FRAC_PI_2 / g.mean * (1.0 - g.weighted_c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Trapezoidal rule on the periodic integrand converges geometrically,
    // independent of the AGM route.
    fn quad(k: f64, second_kind: bool) -> f64 {
        let n = 4000;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let t = (i as f64 * h).sin();
            let w = (1.0 - k * k * t * t).sqrt();
            s += if second_kind { w } else { 1.0 / w };
        }
        s * h / 4.0
    }

    #[test]
    fn degenerate_moduli() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
    }

    #[test]
    fn half_modulus() {
        let k = elliptic_k(0.5).unwrap();
        assert!((k - 1.685_750_354_812_596).abs() < 1e-10 * k);
        assert!((k - quad(0.5, false)).abs() < 1e-12 * k);
    }

    #[test]
    fn matches_quadrature_over_the_range() {
        for i in 0..=19 {
            let k = i as f64 * 0.05;
            let kk = elliptic_k(k).unwrap();
            let ee = elliptic_e(k).unwrap();
            assert!((kk - quad(k, false)).abs() < 1e-10 * kk, "K({k})");
            assert!((ee - quad(k, true)).abs() < 1e-10 * ee, "E({k})");
        }
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K − K K' = π/2 with primes at the complementary modulus.
        for &k in &[0.1, 0.3, 0.6, 0.8, 0.95] {
            let kp = f64::sqrt(1.0 - k * k);
            let lhs = elliptic_e(k).unwrap() * elliptic_k(kp).unwrap()
                + elliptic_e(kp).unwrap() * elliptic_k(k).unwrap()
                - elliptic_k(k).unwrap() * elliptic_k(kp).unwrap();
            assert!((lhs - FRAC_PI_2).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn domain_and_divergence() {
        assert!(matches!(elliptic_k(1.0), Err(LcrError::Divergence(_))));
        assert!(matches!(elliptic_k(-0.1), Err(LcrError::Domain(_))));
        assert!(matches!(elliptic_e(1.5), Err(LcrError::Domain(_))));
    }
}

//! Received SNR under the optimal RIS phase law.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::fading::FadingSeries;
use crate::channel::SteeringVector;
use crate::error::{domain, Result};

/// `Y = Σ_k |h_ur,k|`, the gain delivered by co-phasing every RIS element.
pub fn ris_phase_cascade(h_ur: &[Complex64], a_r: &SteeringVector) -> Result<f64> {
    if h_ur.len() != a_r.len() {
        return domain(format!("h_ur has {} entries but a_r has {}", h_ur.len(), a_r.len()));
    }
    Ok(h_ur.iter().map(|h| h.norm()).sum())
}

/// The diagonal phase matrix `Φ = ν diag(e^{j∠a_r}) diag(e^{−j∠h_ur})` with
/// `ν = e^{j∠(a_bᴴ h_d)}`.
pub fn ris_phase_matrix(h_ur: &[Complex64], a_r: &SteeringVector, nu: Complex64) -> Result<DMatrix<Complex64>> {
    if h_ur.len() != a_r.len() {
        return domain(format!("h_ur has {} entries but a_r has {}", h_ur.len(), a_r.len()));
    }
    let unit = |z: Complex64| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
    let diag = a_r.values().iter().zip(h_ur).map(|(&a, &h)| unit(nu) * unit(a) * unit(h).conj());
    Ok(DMatrix::from_diagonal(&DVector::from_iterator(h_ur.len(), diag)))
}

/// `(E_s/σ²)[‖h_d‖² + 2√β_rb Y |a_bᴴ h_d| + M β_rb Y²]`. An empty `h_d`
/// means the direct link is absent.
pub fn snr_closed_form(h_d: &[Complex64], y: f64, beta_rb: f64, a_b: &SteeringVector, snr_scale: f64) -> Result<f64> {
    let m = a_b.len() as f64;
    if h_d.is_empty() {
        return Ok(snr_scale * m * beta_rb * y * y);
    }
    if h_d.len() != a_b.len() {
        return domain(format!("h_d has {} entries but a_b has {}", h_d.len(), a_b.len()));
    }
    let power: f64 = h_d.iter().map(|h| h.norm_sqr()).sum();
    let proj = a_b.inner(h_d).norm();
    Ok(snr_scale * (power + 2.0 * beta_rb.sqrt() * y * proj + m * beta_rb * y * y))
}

/// `(E_s/σ²)‖h_d + H_rb Φ h_ur‖²` with `H_rb = √β_rb a_b a_rᴴ` and `Φ` built
/// explicitly.
pub fn snr_explicit(
    h_d: &[Complex64],
    h_ur: &[Complex64],
    beta_rb: f64,
    a_b: &SteeringVector,
    a_r: &SteeringVector,
    snr_scale: f64,
) -> Result<f64> {
    if h_d.len() != a_b.len() {
        return domain(format!("h_d has {} entries but a_b has {}", h_d.len(), a_b.len()));
    }
    let ab = DVector::from_column_slice(a_b.values());
    let ar = DVector::from_column_slice(a_r.values());
    let hd = DVector::from_column_slice(h_d);
    let nu = ab.dotc(&hd);
    let phi = ris_phase_matrix(h_ur, a_r, nu)?;
    let h_rb = &ab * ar.adjoint() * Complex64::new(beta_rb.sqrt(), 0.0);
    let total = hd + h_rb * phi * DVector::from_column_slice(h_ur);
    Ok(snr_scale * total.norm_squared())
}

/// SNR samples plus the time base used to normalise crossing rates.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSeries {
    pub values: Vec<f64>,
    pub dt: f64,
    pub doppler_norm: f64,
}

impl SnrSeries {
    pub fn new(values: Vec<f64>, dt: f64, doppler_norm: f64) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain("SNR samples must be finite and non-negative");
        }
        if !(dt > 0.0 && doppler_norm > 0.0) {
            return domain(format!("need dt > 0 and doppler_norm > 0, got {dt}, {doppler_norm}"));
        }
        Ok(SnrSeries { values, dt, doppler_norm })
    }

    /// Duration in Doppler cycles.
    pub fn cycles(&self) -> f64 {
        self.values.len().saturating_sub(1) as f64 * self.dt * self.doppler_norm
    }
}

/// Per-sample SNR from whichever links are present. A missing RIS link, or
/// `beta_rb = 0`, leaves the direct term alone.
pub fn snr_series(
    h_d: Option<&FadingSeries>,
    h_ur: Option<&FadingSeries>,
    beta_rb: f64,
    a_b: &SteeringVector,
    a_r: &SteeringVector,
    snr_scale: f64,
) -> Result<SnrSeries> {
    let (n, dt, doppler) = match (h_d, h_ur) {
        (None, None) => return domain("snr_series needs at least one link"),
        (Some(d), Some(r)) => {
            if d.n_samples() != r.n_samples() || d.dt != r.dt {
                return domain("direct and RIS series must share their time grid");
            }
            (d.n_samples(), d.dt, d.doppler)
        }
        (Some(d), None) => (d.n_samples(), d.dt, d.doppler),
        (None, Some(r)) => (r.n_samples(), r.dt, r.doppler),
    };
    if let Some(r) = h_ur {
        if r.n_elements() != a_r.len() {
            return domain(format!("h_ur has {} elements but a_r has {}", r.n_elements(), a_r.len()));
        }
    }
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let y = match h_ur {
            Some(r) => r.samples.column(i).iter().map(|h| h.norm()).sum(),
            None => 0.0,
        };
        let hd = h_d.map(|d| d.at(i)).unwrap_or_default();
        let rb = if h_ur.is_some() { beta_rb } else { 0.0 };
        values.push(snr_closed_form(&hd, y, rb, a_b, snr_scale)?);
    }
    SnrSeries::new(values, dt, doppler)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{steering_vector, ArrayGeometry};

    fn sv(n_x: usize, n_z: usize) -> SteeringVector {
        steering_vector(&ArrayGeometry::new(n_x, n_z, 0.5).unwrap(), 1.1, 0.7).unwrap()
    }

    #[test]
    fn cascade_values() {
        let a1 = sv(1, 1);
        assert_eq!(ris_phase_cascade(&[Complex64::new(1.0, 0.0)], &a1).unwrap(), 1.0);
        let a2 = sv(2, 1);
        let h = [Complex64::new(3.0, 4.0), Complex64::new(0.0, 1.0)];
        assert_eq!(ris_phase_cascade(&h, &a2).unwrap(), 6.0);
        assert!(ris_phase_cascade(&h, &a1).is_err());
    }

    #[test]
    fn hand_evaluated_sample() {
        let a = sv(1, 1);
        let one = [Complex64::new(1.0, 0.0)];
        let y = ris_phase_cascade(&one, &a).unwrap();
        let v = snr_closed_form(&one, y, 1.0, &a, 1.0).unwrap();
        // a_b for a single element is 1, so |a_bᴴ h_d| = 1.
        assert!((v - 4.0).abs() < 1e-15);
        let e = snr_explicit(&one, &one, 1.0, &a, &a, 1.0).unwrap();
        assert!((e - 4.0).abs() < 1e-14);
    }

    #[test]
    fn link_collapses() {
        let a_b = sv(2, 2);
        let hd: Vec<Complex64> = (0..4).map(|k| Complex64::new(0.3 * k as f64, -0.2)).collect();
        let power: f64 = hd.iter().map(|h| h.norm_sqr()).sum();
        assert!((snr_closed_form(&hd, 2.0, 0.0, &a_b, 3.0).unwrap() - 3.0 * power).abs() < 1e-14);
        assert!((snr_closed_form(&[], 2.0, 0.5, &a_b, 3.0).unwrap() - 3.0 * 4.0 * 0.5 * 4.0).abs() < 1e-14);
    }

    #[test]
    fn phase_matrix_is_unitary_diagonal() {
        let a_r = sv(3, 1);
        let h = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1), Complex64::new(0.0, -3.0)];
        let phi = ris_phase_matrix(&h, &a_r, Complex64::new(0.0, 1.0)).unwrap();
        for i in 0..3 {
            assert!((phi[(i, i)].norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(phi[(0, 1)], Complex64::new(0.0, 0.0));
    }
}

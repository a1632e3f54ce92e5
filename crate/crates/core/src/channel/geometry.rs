use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Planar array of `n_x × n_z` elements on a square grid.
///
/// Element `i` sits at grid index `(i % n_x, i / n_x)`; positions are in
/// wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_x: usize,
    pub n_z: usize,
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn new(n_x: usize, n_z: usize, spacing: f64) -> Result<Self> {
        let g = ArrayGeometry { n_x, n_z, spacing };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_z == 0 {
            return domain(format!(
                "array needs at least one element per row and column, got {}x{}",
                self.n_x, self.n_z
            ));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return domain(format!("element spacing must be positive, got {}", self.spacing));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid index `(p_x, p_z)` of element `i`.
    pub fn grid_index(&self, i: usize) -> (usize, usize) {
        (i % self.n_x, i / self.n_x)
    }

    /// Position of element `i` in wavelengths.
    pub fn position(&self, i: usize) -> (f64, f64) {
        let (px, pz) = self.grid_index(i);
        (px as f64 * self.spacing, pz as f64 * self.spacing)
    }

    /// Euclidean distance between elements, in wavelengths.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (xi, zi) = self.position(i);
        let (xj, zj) = self.position(j);
        (xi - xj).hypot(zi - zj)
    }
}

/// Unit-modulus phase profile of a plane wave across an array.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    values: Vec<Complex64>,
}

impl SteeringVector {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Hermitian inner product `selfᴴ · x`.
    pub fn inner(&self, x: &[Complex64]) -> Complex64 {
        self.values.iter().zip(x).map(|(a, h)| a.conj() * h).sum()
    }
}

/// VURA steering vector for elevation `theta` and azimuth `phi` (radians).
///
/// Entry `(p_x, p_z)` is `exp(j 2π d (p_x sinθ cosφ + p_z cosθ))`.
pub fn steering_vector(geometry: &ArrayGeometry, theta: f64, phi: f64) -> Result<SteeringVector> {
    geometry.validate()?;
    if !(theta.is_finite() && phi.is_finite()) {
        return domain(format!("steering angles must be finite, got θ={theta}, φ={phi}"));
    }
    let kx = 2.0 * PI * geometry.spacing * theta.sin() * phi.cos();
    let kz = 2.0 * PI * geometry.spacing * theta.cos();
    let values = (0..geometry.len())
        .map(|i| {
            let (px, pz) = geometry.grid_index(i);
            Complex64::from_polar(1.0, kx * px as f64 + kz * pz as f64)
        })
        .collect();
    Ok(SteeringVector { values })
}

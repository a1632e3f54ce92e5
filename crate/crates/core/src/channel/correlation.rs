use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::geometry::ArrayGeometry;
use crate::error::{domain, numeric, Result};

/// Eigenvalues down to this (negative) value are treated as rounding noise
/// and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Symmetric PSD spatial correlation matrix with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    /// Columns match `eigenvalues` order.
    eigenvectors: DMatrix<f64>,
    sqrt_factor: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// Validates and decomposes a correlation matrix.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return domain(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                n,
                entries.ncols()
            ));
        }
        for i in 0..n {
            if (entries[(i, i)] - 1.0).abs() > 1e-12 {
                return domain(format!("correlation diagonal entry {i} is {}, expected 1", entries[(i, i)]));
            }
            for j in 0..i {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || (a - b).abs() > 1e-12 {
                    return domain(format!("correlation matrix not symmetric at ({i},{j}): {a} vs {b}"));
                }
                if a.abs() > 1.0 + 1e-12 {
                    return domain(format!("correlation entry ({i},{j}) = {a} exceeds 1 in magnitude"));
                }
            }
        }

        let eig = SymmetricEigen::try_new(entries.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| crate::LcrError::Numeric("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            let mut lam = eig.eigenvalues[k];
            if lam < 0.0 {
                if lam < -PSD_TOLERANCE {
                    return numeric(format!(
                        "correlation matrix is not positive semi-definite (eigenvalue {lam:e})"
                    ));
                }
                lam = 0.0;
            }
            eigenvalues.push(lam);
            eigenvectors.set_column(col, &eig.eigenvectors.column(k));
        }

        let root = DMatrix::from_fn(n, n, |i, j| eigenvectors[(i, j)] * eigenvalues[j].sqrt());
        let sqrt_factor = &root * eigenvectors.transpose();
        Ok(CorrelationMatrix { entries, eigenvalues, eigenvectors, sqrt_factor })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Eigenvalues in descending order, clamped to be non-negative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Symmetric square root `V diag(√λ) Vᵀ`.
    pub fn sqrt_factor(&self) -> &DMatrix<f64> {
        &self.sqrt_factor
    }

    /// Tall factor `V_r diag(√λ_r)` over the eigenvalues above
    /// `rel_floor · λ_max`; `G Gᵀ` reproduces the matrix up to the dropped
    /// mass. Coloring with it needs only `r` white sources.
    pub fn coloring_factor(&self, rel_floor: f64) -> DMatrix<f64> {
        let cut = rel_floor * self.eigenvalues[0];
        let r = self.eigenvalues.iter().filter(|&&l| l > cut).count().max(1);
        DMatrix::from_fn(self.dim(), r, |i, j| self.eigenvectors[(i, j)] * self.eigenvalues[j].sqrt())
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Isotropic-scattering correlation `R_mn = sinc(2 d_mn)`.
pub fn spatial_correlation(geometry: &ArrayGeometry) -> Result<CorrelationMatrix> {
    geometry.validate()?;
    let n = geometry.len();
    let r = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { sinc(2.0 * geometry.distance(i, j)) });
    CorrelationMatrix::new(r)
}

/// Descending eigenvalues of `snr_scale · beta · R`.
pub fn scaled_eigenvalues(r: &CorrelationMatrix, beta: f64, snr_scale: f64) -> Result<Vec<f64>> {
    let s = beta * snr_scale;
    if !(s.is_finite() && s >= 0.0) {
        return domain(format!("eigenvalue scale must be non-negative, got {s}"));
    }
    Ok(r.eigenvalues().iter().map(|l| l * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frob(a: &DMatrix<f64>) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn sinc_values() {
        let half = spatial_correlation(&ArrayGeometry::new(2, 1, 0.5).unwrap()).unwrap();
        assert!(half.get(0, 1).abs() < 1e-15);
        assert_eq!(half.get(0, 0), 1.0);
        let quarter = spatial_correlation(&ArrayGeometry::new(2, 1, 0.25).unwrap()).unwrap();
        assert!((quarter.get(0, 1) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sqrt_factor_reproduces_entries() {
        for spacing in [0.1, 0.25, 0.5, 1.0] {
            let r = spatial_correlation(&ArrayGeometry::new(8, 4, spacing).unwrap()).unwrap();
            let back = r.sqrt_factor() * r.sqrt_factor().transpose();
            assert!(frob(&(back - r.entries())) / frob(r.entries()) < 1e-10, "spacing {spacing}");
            assert!(r.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
            assert!(r.eigenvalues().iter().all(|&l| l >= 0.0));
        }
    }

    #[test]
    fn coloring_factor_is_low_rank_for_dense_arrays() {
        let r = spatial_correlation(&ArrayGeometry::new(16, 8, 0.1).unwrap()).unwrap();
        let g = r.coloring_factor(1e-12);
        assert!(g.ncols() < r.dim());
        let back = &g * g.transpose();
        assert!(frob(&(back - r.entries())) / frob(r.entries()) < 1e-9);
    }

    #[test]
    fn identity_and_rank_one_spectra() {
        let id = CorrelationMatrix::identity(4).unwrap();
        assert_eq!(scaled_eigenvalues(&id, 2.0, 1.0).unwrap(), vec![2.0; 4]);
        let ones = CorrelationMatrix::new(DMatrix::from_element(4, 4, 1.0)).unwrap();
        let e = scaled_eigenvalues(&ones, 1.0, 1.0).unwrap();
        assert!((e[0] - 4.0).abs() < 1e-12);
        assert!(e[1..].iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 0.3;
        assert!(CorrelationMatrix::new(m.clone()).is_err());
        m[(1, 0)] = 0.3;
        assert!(CorrelationMatrix::new(m).is_ok());
        let mut bad = DMatrix::from_element(3, 3, -0.9);
        bad.fill_diagonal(1.0);
        assert!(CorrelationMatrix::new(bad).is_err());
    }

    #[test]
    fn spread_decreases_with_spacing() {
        let mean_offdiag = |s: f64| {
            let r = spatial_correlation(&ArrayGeometry::new(4, 4, s).unwrap()).unwrap();
            let n = r.dim();
            let total: f64 = r.entries().iter().map(|x| x.abs()).sum::<f64>() - n as f64;
            total / (n * n - n) as f64
        };
        let samples: Vec<f64> = [0.1, 0.2, 0.4, 0.7, 1.0].iter().map(|&s| mean_offdiag(s)).collect();
        assert!(samples.first() > samples.last());
        assert!(samples[0] > samples[2]);
    }
}

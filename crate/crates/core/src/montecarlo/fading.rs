//! Clarke fading by sum of sinusoids, coloured across elements.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::CorrelationMatrix;
use crate::error::{domain, Result};

/// Eigenvalues below this fraction of the largest are dropped when colouring.
pub const COLORING_FLOOR: f64 = 1e-12;

/// Block length used when streaming samples.
pub const BLOCK_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingProcessConfig {
    /// Maximum Doppler shift in Hz.
    pub doppler: f64,
    /// Samples per Doppler cycle; `Δt = 1/(sample_rate · doppler)`.
    pub sample_rate: f64,
    pub n_samples: usize,
    /// Rays per quadrature branch.
    pub n_sinusoids: usize,
    pub seed: u64,
}

impl Default for FadingProcessConfig {
    fn default() -> Self {
        FadingProcessConfig { doppler: 1.0, sample_rate: 64.0, n_samples: 1_000_000, n_sinusoids: 64, seed: 1 }
    }
}

impl FadingProcessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.doppler > 0.0 && self.doppler.is_finite()) {
            return domain(format!("doppler must be positive, got {}", self.doppler));
        }
        if !(self.sample_rate >= 32.0 && self.sample_rate.is_finite()) {
            return domain(format!("sample_rate must be at least 32, got {}", self.sample_rate));
        }
        if self.n_sinusoids < 32 {
            return domain(format!("n_sinusoids must be at least 32, got {}", self.n_sinusoids));
        }
        if self.n_samples < 10_000 {
            return domain(format!("n_samples must be at least 10^4, got {}", self.n_samples));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / (self.sample_rate * self.doppler)
    }
}

// One quadrature branch: K rotating phasors whose real parts are summed.
#[derive(Debug, Clone)]
struct Branch {
    omega: Vec<f64>,
    phase: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    step_re: Vec<f64>,
    step_im: Vec<f64>,
}

impl Branch {
    fn draw(rng: &mut ChaCha8Rng, k: usize, doppler: f64, dt: f64) -> Self {
        // One uniform angle inside each of K equal arcs of [0, π). cos α has
        // the same law as over the full circle, but no two rays share a
        // frequency, so the time-averaged power does not depend on the draw.
        let mut omega = Vec::with_capacity(k);
        let mut phase = Vec::with_capacity(k);
        for i in 0..k {
            let alpha = PI * (i as f64 + rng.random::<f64>()) / k as f64;
            omega.push(2.0 * PI * doppler * alpha.cos());
            phase.push(2.0 * PI * rng.random::<f64>());
        }
        let (step_im, step_re): (Vec<f64>, Vec<f64>) = omega.iter().map(|w| (w * dt).sin_cos()).unzip();
        Branch { re: vec![0.0; k], im: vec![0.0; k], omega, phase, step_re, step_im }
    }

    fn seek(&mut self, t: f64) {
        for i in 0..self.omega.len() {
            let (s, c) = (self.omega[i] * t + self.phase[i]).sin_cos();
            self.re[i] = c;
            self.im[i] = s;
        }
    }

    // Writes `scale · Σ cos(ω_k t + φ_k)` for consecutive samples into `out`.
    fn run(&mut self, out: &mut [f64], scale: f64) {
        for o in out.iter_mut() {
            *o = scale * lane_sum(&self.re);
            let rays = self.re.iter_mut().zip(self.im.iter_mut()).zip(self.step_re.iter().zip(&self.step_im));
            for ((r, m), (c, s)) in rays {
                let (a, b) = (*r, *m);
                *r = a * c - b * s;
                *m = a * s + b * c;
            }
        }
    }
}

// Sum with independent partial accumulators so the loop vectorises.
fn lane_sum(x: &[f64]) -> f64 {
    let mut lanes = [0.0; 8];
    let chunks = x.chunks_exact(8);
    let tail: f64 = chunks.remainder().iter().sum();
    for c in chunks {
        for k in 0..8 {
            lanes[k] += c[k];
        }
    }
    lanes.iter().sum::<f64>() + tail
}

/// Independent unit-power complex Gaussian sources with autocorrelation
/// `J₀(2π f τ)`.
#[derive(Debug, Clone)]
pub struct FadingGenerator {
    branches: Vec<(Branch, Branch)>,
    dt: f64,
    scale: f64,
    position: usize,
}

impl FadingGenerator {
    /// Sources are seeded from `(config.seed, stream_id, source index)` only,
    /// so the same continuous paths are produced at any sample rate.
    pub fn new(n_sources: usize, config: &FadingProcessConfig, stream_id: u64) -> Result<Self> {
        config.validate()?;
        if n_sources == 0 {
            return domain("FadingGenerator needs at least one source");
        }
        let dt = config.dt();
        let k = config.n_sinusoids;
        let branches = (0..n_sources)
            .map(|src| {
                let mut rng = source_rng(config.seed, stream_id, src as u64);
                let i = Branch::draw(&mut rng, k, config.doppler, dt);
                let q = Branch::draw(&mut rng, k, config.doppler, dt);
                (i, q)
            })
            .collect();
        Ok(FadingGenerator {
            branches,
            dt,
            scale: (1.0 / k as f64).sqrt(),
            position: 0,
        })
    }

    pub fn n_sources(&self) -> usize {
        self.branches.len()
    }

    /// Fills the in-phase and quadrature parts (block length × sources) with
    /// the next samples.
    pub fn next_block(&mut self, re: &mut DMatrix<f64>, im: &mut DMatrix<f64>) {
        let t0 = self.position as f64 * self.dt;
        for (s, (bi, bq)) in self.branches.iter_mut().enumerate() {
            // Re-anchor each block so the recurrence error does not build up.
            bi.seek(t0);
            bq.seek(t0);
            bi.run(re.column_mut(s).as_mut_slice(), self.scale);
            bq.run(im.column_mut(s).as_mut_slice(), self.scale);
        }
        self.position += re.nrows();
    }
}

pub(crate) fn source_rng(seed: u64, stream_id: u64, source: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id.wrapping_mul(1 << 24).wrapping_add(source));
    rng
}

/// Streams `√β · G · u(t)` where `G Gᵀ = R` and `u` are white sources.
#[derive(Debug, Clone)]
pub struct CorrelatedFading {
    generator: FadingGenerator,
    // Transposed factor, sources × elements.
    factor_t: DMatrix<f64>,
    white_re: DMatrix<f64>,
    white_im: DMatrix<f64>,
}

impl CorrelatedFading {
    pub fn new(r: &CorrelationMatrix, beta: f64, config: &FadingProcessConfig, stream_id: u64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return domain(format!("path gain must be non-negative, got {beta}"));
        }
        let factor_t = (r.coloring_factor(COLORING_FLOOR) * beta.sqrt()).transpose();
        let generator = FadingGenerator::new(factor_t.nrows(), config, stream_id)?;
        Ok(CorrelatedFading { generator, factor_t, white_re: DMatrix::zeros(0, 0), white_im: DMatrix::zeros(0, 0) })
    }

    pub fn n_elements(&self) -> usize {
        self.factor_t.ncols()
    }

    /// Next `len` samples as real and imaginary parts, each len × elements.
    pub fn next_block_parts(&mut self, len: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        if self.white_re.nrows() != len {
            let k = self.generator.n_sources();
            self.white_re = DMatrix::zeros(len, k);
            self.white_im = DMatrix::zeros(len, k);
        }
        self.generator.next_block(&mut self.white_re, &mut self.white_im);
        (&self.white_re * &self.factor_t, &self.white_im * &self.factor_t)
    }

    /// Next `len` samples as an elements × len matrix.
    pub fn next_block(&mut self, len: usize) -> DMatrix<Complex64> {
        let (re, im) = self.next_block_parts(len);
        DMatrix::from_fn(self.n_elements(), len, |e, j| Complex64::new(re[(j, e)], im[(j, e)]))
    }
}

/// Channel samples of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSeries {
    /// Elements × samples.
    pub samples: DMatrix<Complex64>,
    pub dt: f64,
    pub doppler: f64,
}

impl FadingSeries {
    pub fn n_elements(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.ncols()
    }

    /// Channel vector at sample `i`.
    pub fn at(&self, i: usize) -> Vec<Complex64> {
        self.samples.column(i).iter().copied().collect()
    }
}

/// Whole trajectory of `√β R^{1/2} u(t)` held in memory.
pub fn gen_correlated_fading(
    r: &CorrelationMatrix,
    beta: f64,
    config: &FadingProcessConfig,
    stream_id: u64,
) -> Result<FadingSeries> {
    let mut stream = CorrelatedFading::new(r, beta, config, stream_id)?;
    let n = config.n_samples;
    let mut samples = DMatrix::zeros(stream.n_elements(), n);
    let mut done = 0;
    while done < n {
        let len = BLOCK_LEN.min(n - done);
        let block = stream.next_block(len);
        samples.columns_mut(done, len).copy_from(&block);
        done += len;
    }
    Ok(FadingSeries { samples, dt: config.dt(), doppler: config.doppler })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, seed: u64) -> FadingProcessConfig {
        FadingProcessConfig { n_samples: n, seed, ..Default::default() }
    }

    #[test]
    fn config_invariants() {
        assert!(cfg(10_000, 1).validate().is_ok());
        assert!(FadingProcessConfig { sample_rate: 16.0, ..cfg(10_000, 1) }.validate().is_err());
        assert!(FadingProcessConfig { n_sinusoids: 8, ..cfg(10_000, 1) }.validate().is_err());
        assert!(cfg(100, 1).validate().is_err());
    }

    #[test]
    fn deterministic_per_seed_and_stream() {
        let r = CorrelationMatrix::identity(3).unwrap();
        let a = gen_correlated_fading(&r, 1.0, &cfg(10_000, 7), 2).unwrap();
        let b = gen_correlated_fading(&r, 1.0, &cfg(10_000, 7), 2).unwrap();
        let c = gen_correlated_fading(&r, 1.0, &cfg(10_000, 7), 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn block_boundaries_are_seamless() {
        let r = CorrelationMatrix::identity(1).unwrap();
        let s = gen_correlated_fading(&r, 1.0, &cfg(10_000, 3), 0).unwrap();
        let gen = FadingGenerator::new(1, &cfg(10_000, 3), 0).unwrap();
        // Direct evaluation of the ray sum at a sample just past a block edge.
        let i = BLOCK_LEN + 5;
        let t = i as f64 * gen.dt;
        let (bi, bq) = &gen.branches[0];
        let sum = |b: &Branch| b.omega.iter().zip(&b.phase).map(|(w, p)| (w * t + p).cos()).sum::<f64>();
        let want = Complex64::new(sum(bi), sum(bq)) * gen.scale;
        let r0 = r.coloring_factor(COLORING_FLOOR)[(0, 0)];
        assert!((s.samples[(0, i)] - want * r0).norm() < 1e-10);
        assert!((lane_sum(&[1.0; 19]) - 19.0).abs() == 0.0);
    }
}

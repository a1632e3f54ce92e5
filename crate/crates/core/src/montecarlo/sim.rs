//! Streaming link simulation over independent replicates.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{CentralDifference, EmpiricalLcr, RunningMoments, UpcrossingCounter, WindowDensity};
use super::fading::{CorrelatedFading, FadingGenerator, FadingProcessConfig, BLOCK_LEN};
use crate::analytic::LcrSource;
use crate::channel::{CorrelationMatrix, SteeringVector};
use crate::db_to_linear;
use crate::error::{domain, Result};

/// One Rayleigh link: correlation, path gain and its own Doppler.
#[derive(Debug, Clone)]
pub struct LinkSpec {
    pub correlation: CorrelationMatrix,
    pub beta: f64,
    pub doppler: f64,
}

#[derive(Debug, Clone)]
pub struct SimScene {
    pub direct: Option<LinkSpec>,
    pub ris: Option<LinkSpec>,
    pub beta_rb: f64,
    pub a_b: SteeringVector,
    pub a_r: SteeringVector,
    pub snr_scale: f64,
}

impl SimScene {
    fn validate(&self) -> Result<()> {
        if self.direct.is_none() && self.ris.is_none() {
            return domain("simulation needs at least one link");
        }
        if let Some(d) = &self.direct {
            if d.correlation.dim() != self.a_b.len() {
                return domain("direct-link correlation and a_b differ in size");
            }
        }
        if let Some(r) = &self.ris {
            if r.correlation.dim() != self.a_r.len() {
                return domain("RIS correlation and a_r differ in size");
            }
            if !(self.beta_rb > 0.0) {
                return domain("RIS link present but beta_rb is not positive");
            }
        }
        if !(self.snr_scale > 0.0 && self.snr_scale.is_finite()) {
            return domain(format!("snr_scale must be positive, got {}", self.snr_scale));
        }
        Ok(())
    }
}

/// How much to simulate. `process.doppler` sets the time base and the LCR
/// normalisation; `process.n_samples` is per replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub process: FadingProcessConfig,
    pub replicates: usize,
    pub thresholds_db: Vec<f64>,
    /// Half-width (dB) of the windows used for density estimates.
    pub density_half_width_db: f64,
}

/// Aggregated statistics in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub thresholds_db: Vec<f64>,
    pub replicate_counts: Vec<Vec<u64>>,
    pub cycles_per_replicate: f64,
    pub samples_per_replicate: usize,
    pub snr: RunningMoments,
    /// `Y(t)` and its central-difference derivative, when the RIS link is
    /// simulated.
    pub y: Option<RunningMoments>,
    pub y_dot: Option<RunningMoments>,
    pub mean_speed: f64,
    /// SNR density at each threshold.
    pub density: Vec<f64>,
}

impl SimResult {
    pub fn lcr(&self) -> Result<EmpiricalLcr> {
        EmpiricalLcr::from_parts(
            &self.thresholds_db,
            &self.replicate_counts,
            self.cycles_per_replicate,
            LcrSource::Simulated {
                replicates: self.replicate_counts.len(),
                samples_per_replicate: self.samples_per_replicate,
            },
        )
    }
}

struct Replicate {
    counts: Vec<u64>,
    snr: RunningMoments,
    y: RunningMoments,
    y_dot: RunningMoments,
    speed: f64,
    density: WindowDensity,
}

fn link_stream(link: &LinkSpec, process: &FadingProcessConfig, stream: u64) -> Result<CorrelatedFading> {
    // Same Δt as the time base, with the link's own Doppler.
    let cfg = FadingProcessConfig {
        doppler: link.doppler,
        sample_rate: process.sample_rate * process.doppler / link.doppler,
        ..*process
    };
    CorrelatedFading::new(&link.correlation, link.beta, &cfg, stream)
}

// Produces blocks of SNR samples (and Y when the RIS link is present).
trait BlockSource {
    fn next(&mut self, len: usize, snr: &mut [f64], ys: &mut [f64]);
    fn has_y(&self) -> bool;
}

struct SceneSource<'a> {
    scene: &'a SimScene,
    direct: Option<CorrelatedFading>,
    ris: Option<CorrelatedFading>,
    a_re: DVector<f64>,
    a_im: DVector<f64>,
}

impl<'a> SceneSource<'a> {
    fn new(scene: &'a SimScene, process: &FadingProcessConfig, index: u64) -> Result<Self> {
        Ok(SceneSource {
            scene,
            direct: scene.direct.as_ref().map(|l| link_stream(l, process, 2 * index)).transpose()?,
            ris: scene.ris.as_ref().map(|l| link_stream(l, process, 2 * index + 1)).transpose()?,
            a_re: DVector::from_iterator(scene.a_b.len(), scene.a_b.values().iter().map(|z| z.re)),
            a_im: DVector::from_iterator(scene.a_b.len(), scene.a_b.values().iter().map(|z| z.im)),
        })
    }
}

impl BlockSource for SceneSource<'_> {
    fn next(&mut self, len: usize, snr: &mut [f64], ys: &mut [f64]) {
        let scene = self.scene;
        snr.fill(0.0);
        ys.fill(0.0);
        if let Some(stream) = self.ris.as_mut() {
            let (re, im) = stream.next_block_parts(len);
            for (col_re, col_im) in re.column_iter().zip(im.column_iter()) {
                for ((y, a), b) in ys.iter_mut().zip(col_re.iter()).zip(col_im.iter()) {
                    *y += a.hypot(*b);
                }
            }
        }
        let has_ris = self.ris.is_some();
        if let Some(stream) = self.direct.as_mut() {
            let (re, im) = stream.next_block_parts(len);
            for (col_re, col_im) in re.column_iter().zip(im.column_iter()) {
                for ((v, a), b) in snr.iter_mut().zip(col_re.iter()).zip(col_im.iter()) {
                    *v += a * a + b * b;
                }
            }
            if has_ris {
                // |a_bᴴ h_d| from its real and imaginary parts.
                let p_re = &re * &self.a_re + &im * &self.a_im;
                let p_im = &im * &self.a_re - &re * &self.a_im;
                let cross = 2.0 * scene.beta_rb.sqrt();
                for j in 0..len {
                    snr[j] += cross * ys[j] * p_re[j].hypot(p_im[j]);
                }
            }
        }
        let m = scene.a_b.len() as f64;
        for (v, y) in snr.iter_mut().zip(ys.iter()) {
            if has_ris {
                *v += m * scene.beta_rb * y * y;
            }
            *v *= scene.snr_scale;
        }
    }

    fn has_y(&self) -> bool {
        self.ris.is_some()
    }
}

struct BranchSource {
    generator: FadingGenerator,
    theta: Vec<f64>,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl BlockSource for BranchSource {
    fn next(&mut self, len: usize, snr: &mut [f64], _ys: &mut [f64]) {
        if self.re.nrows() != len {
            self.re = DMatrix::zeros(len, self.theta.len());
            self.im = DMatrix::zeros(len, self.theta.len());
        }
        self.generator.next_block(&mut self.re, &mut self.im);
        snr.fill(0.0);
        for ((col_re, col_im), &w) in self.re.column_iter().zip(self.im.column_iter()).zip(&self.theta) {
            for ((v, a), b) in snr.iter_mut().zip(col_re.iter()).zip(col_im.iter()) {
                *v += w * (a * a + b * b);
            }
        }
    }

    fn has_y(&self) -> bool {
        false
    }
}

fn run_replicate(source: &mut dyn BlockSource, plan: &SimPlan, thresholds: &[f64]) -> Replicate {
    let process = &plan.process;
    let dt = process.dt();
    let mut counter = UpcrossingCounter::new(thresholds);
    let mut density = WindowDensity::new(thresholds, plan.density_half_width_db);
    let mut snr_m = RunningMoments::default();
    let mut y_m = RunningMoments::default();
    let mut speed = CentralDifference::default();
    let mut y_diff = CentralDifference::default();
    let mut snr = vec![0.0; BLOCK_LEN];
    let mut ys = vec![0.0; BLOCK_LEN];

    let mut done = 0;
    while done < process.n_samples {
        let len = BLOCK_LEN.min(process.n_samples - done);
        let (snr, ys) = (&mut snr[..len], &mut ys[..len]);
        source.next(len, snr, ys);
        counter.push(snr);
        density.push(snr);
        speed.push(snr, dt);
        snr.iter().for_each(|&v| snr_m.push(v));
        if source.has_y() {
            ys.iter().for_each(|&v| y_m.push(v));
            y_diff.push(ys, dt);
        }
        done += len;
    }
    Replicate {
        counts: counter.counts().to_vec(),
        snr: snr_m,
        y: y_m,
        y_dot: y_diff.moments(),
        speed: speed.mean_abs(),
        density,
    }
}

fn check_plan(plan: &SimPlan) -> Result<Vec<f64>> {
    plan.process.validate()?;
    if plan.replicates == 0 {
        return domain("need at least one replicate");
    }
    if plan.thresholds_db.is_empty() || plan.thresholds_db.iter().any(|t| !t.is_finite()) {
        return domain("threshold grid must be non-empty and finite");
    }
    Ok(plan.thresholds_db.iter().map(|&d| db_to_linear(d)).collect())
}

fn aggregate(plan: &SimPlan, thresholds: &[f64], reps: Vec<Replicate>, has_y: bool) -> SimResult {
    let mut snr = RunningMoments::default();
    let mut y = RunningMoments::default();
    let mut y_dot = RunningMoments::default();
    let mut density = WindowDensity::new(thresholds, plan.density_half_width_db);
    let mut speed = 0.0;
    for r in &reps {
        snr.merge(&r.snr);
        y.merge(&r.y);
        y_dot.merge(&r.y_dot);
        density.merge(&r.density);
        speed += r.speed;
    }
    SimResult {
        thresholds_db: plan.thresholds_db.clone(),
        replicate_counts: reps.into_iter().map(|r| r.counts).collect(),
        cycles_per_replicate: (plan.process.n_samples - 1) as f64 / plan.process.sample_rate,
        samples_per_replicate: plan.process.n_samples,
        snr,
        y: has_y.then_some(y),
        y_dot: has_y.then_some(y_dot),
        mean_speed: speed / plan.replicates as f64,
        density: density.densities(),
    }
}

/// Runs `plan.replicates` independent trajectories in parallel. Results do
/// not depend on the number of threads.
pub fn simulate(scene: &SimScene, plan: &SimPlan) -> Result<SimResult> {
    scene.validate()?;
    let thresholds = check_plan(plan)?;
    let reps: Vec<Replicate> = (0..plan.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut source = SceneSource::new(scene, &plan.process, i)?;
            Ok(run_replicate(&mut source, plan, &thresholds))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(plan, &thresholds, reps, scene.ris.is_some()))
}

/// `Σ θ_i |u_i(t)|²` over independent unit-power Clarke branches, which has
/// the law of the direct-link SNR with scaled eigenvalues `θ`.
pub fn simulate_branches(theta: &[f64], plan: &SimPlan) -> Result<SimResult> {
    if theta.is_empty() || theta.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return domain("branch powers must be finite and non-negative");
    }
    let thresholds = check_plan(plan)?;
    let reps: Vec<Replicate> = (0..plan.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let generator = FadingGenerator::new(theta.len(), &plan.process, 2 * i)?;
            let mut source =
                BranchSource { generator, theta: theta.to_vec(), re: DMatrix::zeros(0, 0), im: DMatrix::zeros(0, 0) };
            Ok(run_replicate(&mut source, plan, &thresholds))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(plan, &thresholds, reps, false))
}

//! Curve jobs for each scenario and their evaluation.

use lcr_core::analytic::{lcr_ris, GroupingPolicy, LcrCurve, LcrSource, Theorem2Workspace};
use lcr_core::montecarlo::{simulate, EmpiricalLcr, FadingProcessConfig, SimPlan};
use lcr_core::{db_to_linear, linear_to_db};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentSpec, GridSpec, McSettings, Scenario};
use crate::error::{CliError, Result};
use crate::scene::{ArrayConfig, Scene, SceneConfig};

/// Which SNR a curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Direct,
    Ris,
    Full,
}

impl LinkKind {
    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Direct => "direct",
            LinkKind::Ris => "ris",
            LinkKind::Full => "full",
        }
    }
}

/// One SNR process to evaluate analytically and/or by simulation.
#[derive(Debug, Clone)]
pub struct Job {
    /// Distinguishes jobs within a scenario, e.g. `M32` or `dr0.5`.
    pub label: String,
    pub link: LinkKind,
    pub scene: Scene,
}

impl Job {
    fn new(label: impl Into<String>, link: LinkKind, scene: Scene) -> Self {
        Job { label: label.into(), link, scene }
    }

    pub fn stem(&self, scenario: Scenario) -> String {
        format!("{}_{}_{}", scenario.name(), self.label, self.link.name())
    }

    fn mean_snr(&self) -> Result<f64> {
        match self.link {
            LinkKind::Direct => Ok(self.scene.direct_mean_snr()),
            LinkKind::Ris => self.scene.ris_mean_snr(),
            LinkKind::Full => self.scene.full_mean_snr(),
        }
    }
}

fn with_arrays(base: &SceneConfig, bs: Option<ArrayConfig>, ris: Option<ArrayConfig>) -> Result<Scene> {
    let mut c = base.clone();
    c.bs = bs.unwrap_or(c.bs);
    c.ris = ris.unwrap_or(c.ris);
    c.build()
}

/// Expands a scenario into jobs. Swept parameters override the resolved
/// scene; everything else comes from it.
pub fn jobs(spec: &ExperimentSpec) -> Result<Vec<Job>> {
    let base = &spec.scene;
    let bs_d = base.bs.spacing;
    let ris_d = base.ris.spacing;
    let mut out = Vec::new();
    match spec.scenario {
        Scenario::Fig3a => {
            for (m, mx) in [(8, 4), (32, 8)] {
                let s = with_arrays(base, Some(ArrayConfig::new(mx, m / mx, bs_d)), None)?;
                out.push(Job::new(format!("M{m}"), LinkKind::Direct, s));
            }
        }
        Scenario::Fig3b => {
            for (n, nx) in [(64, 8), (128, 16)] {
                let s = with_arrays(base, None, Some(ArrayConfig::new(nx, n / nx, ris_d)))?;
                out.push(Job::new(format!("N{n}"), LinkKind::Ris, s));
            }
        }
        Scenario::Fig4a | Scenario::Fig4b | Scenario::Custom => {
            let s = base.build()?;
            let links = base.links;
            if links.direct {
                out.push(Job::new("base", LinkKind::Direct, s.clone()));
            }
            if links.ris {
                out.push(Job::new("base", LinkKind::Ris, s.clone()));
            }
            if links.direct && links.ris {
                out.push(Job::new("base", LinkKind::Full, s.clone()));
                if spec.shadow_dominant < 1.0 {
                    let shadowed = s.shadowed(s.dominant()?, spec.shadow_dominant)?;
                    out.push(Job::new("shadowed", LinkKind::Full, shadowed));
                }
            }
        }
        Scenario::Fig5a => {
            let n = base.ris;
            for d in [0.1, 0.5] {
                let s = with_arrays(base, None, Some(ArrayConfig::new(n.n_x, n.n_z, d)))?;
                out.push(Job::new(format!("dr{d}"), LinkKind::Ris, s));
            }
            let m = base.bs;
            for d in [0.5, 1.0] {
                let s = with_arrays(base, Some(ArrayConfig::new(m.n_x, m.n_z, d)), None)?;
                out.push(Job::new(format!("db{d}"), LinkKind::Direct, s));
            }
        }
        Scenario::Fig5b => {
            for d in [0.5, 1.0] {
                let s = with_arrays(
                    base,
                    Some(ArrayConfig::new(base.bs.n_x, base.bs.n_z, d)),
                    Some(ArrayConfig::new(base.ris.n_x, base.ris.n_z, d)),
                )?;
                out.push(Job::new(format!("d{d}"), LinkKind::Direct, s.clone()));
                out.push(Job::new(format!("d{d}"), LinkKind::Ris, s));
            }
        }
        Scenario::Validate => return Err(CliError::usage("validate has no curve jobs")),
    }
    Ok(out)
}

/// Closed-form evaluator for a job, when one exists.
pub enum Analytic {
    Direct { workspace: Theorem2Workspace, l: usize, s: usize },
    Ris(lcr_core::analytic::RisLcrParams),
}

impl Analytic {
    pub fn for_job(job: &Job, grouping: GroupingPolicy) -> Result<Option<Self>> {
        Ok(match job.link {
            LinkKind::Direct => {
                let g = job.scene.grouped(grouping)?;
                Some(Analytic::Direct { workspace: Theorem2Workspace::new(&g)?, l: g.l(), s: g.tail_count() })
            }
            LinkKind::Ris => Some(Analytic::Ris(job.scene.ris_params()?)),
            LinkKind::Full => None,
        })
    }

    pub fn eval(&self, t: f64) -> lcr_core::Result<f64> {
        match self {
            Analytic::Direct { workspace, .. } => workspace.evaluate(t),
            Analytic::Ris(p) => lcr_ris(t, p),
        }
    }

    pub fn source(&self) -> LcrSource {
        match self {
            Analytic::Direct { l, s, .. } => LcrSource::DirectStable { l: *l, s: *s },
            Analytic::Ris(_) => LcrSource::RisGamma,
        }
    }

    /// Tabulates on `grid`; points are evaluated in parallel.
    pub fn curve(&self, grid: &[f64]) -> Result<LcrCurve> {
        let values = grid
            .par_iter()
            .map(|&db| self.eval(db_to_linear(db)))
            .collect::<lcr_core::Result<Vec<_>>>()?;
        let curve = LcrCurve { thresholds_db: grid.to_vec(), values, source: self.source() };
        curve.validate()?;
        Ok(curve)
    }

    /// dB offsets from `mean_db` bounding where the curve exceeds 1e-3 of its
    /// peak, found by walking out from the mean in 0.5 dB steps.
    fn support(&self, mean_db: f64) -> Result<(f64, f64)> {
        const STEP: f64 = 0.5;
        let at = |o: f64| self.eval(db_to_linear(mean_db + o));
        let mut peak = at(0.0)?;
        let mut bounds = [0.0; 2];
        for (side, dir) in [(0usize, -1.0), (1, 1.0)] {
            let mut o = 0.0;
            let mut prev = at(0.0)?;
            loop {
                o += dir * STEP;
                if !(-40.0..=20.0).contains(&o) {
                    break;
                }
                let v = at(o)?;
                peak = peak.max(v);
                if v < 1e-3 * peak && v <= prev {
                    break;
                }
                prev = v;
            }
            bounds[side] = o;
        }
        if !(peak > 0.0) {
            return Err(CliError::Core(lcr_core::LcrError::Numeric("analytic curve vanished near its mean".into())));
        }
        Ok((bounds[0], bounds[1]))
    }
}

pub const AUTO_STEP_DB: f64 = 0.25;

/// Grid covering every analytic curve's support. Full-channel curves borrow
/// the support of their scene's dominant link, moved to their own mean.
pub fn auto_grid(jobs: &[Job], grouping: GroupingPolicy) -> Result<GridSpec> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for job in jobs {
        let mean_db = linear_to_db(job.mean_snr()?);
        let (a, b) = match Analytic::for_job(job, grouping)? {
            Some(an) => an.support(mean_db)?,
            None => {
                let link = match job.scene.dominant()? {
                    crate::scene::DominantLink::Direct => LinkKind::Direct,
                    crate::scene::DominantLink::Ris => LinkKind::Ris,
                };
                let proxy = Job::new("", link, job.scene.clone());
                let proxy_mean = linear_to_db(proxy.mean_snr()?);
                let an = Analytic::for_job(&proxy, grouping)?.expect("single links have closed forms");
                an.support(proxy_mean)?
            }
        };
        lo = lo.min(mean_db + a);
        hi = hi.max(mean_db + b);
    }
    Ok(GridSpec { min_db: lo.floor(), max_db: hi.ceil(), step_db: AUTO_STEP_DB })
}

pub fn sim_plan(mc: &McSettings, doppler: f64, seed: u64, grid: &[f64]) -> SimPlan {
    SimPlan {
        process: FadingProcessConfig {
            doppler,
            sample_rate: mc.sample_rate,
            n_samples: mc.samples / mc.replicates,
            n_sinusoids: mc.n_sinusoids,
            seed,
        },
        replicates: mc.replicates,
        thresholds_db: grid.to_vec(),
        density_half_width_db: 0.1,
    }
}

/// Simulated curve for a job. Every job in a run uses the same seed, so
/// curves sharing a link also share its fading paths.
pub fn simulate_job(job: &Job, mc: &McSettings, seed: u64, grid: &[f64]) -> Result<EmpiricalLcr> {
    let c = &job.scene.config;
    let (direct, ris, doppler) = match job.link {
        LinkKind::Direct => (true, false, c.doppler_d),
        LinkKind::Ris => (false, true, c.doppler_ur),
        LinkKind::Full => (true, true, c.doppler_d),
    };
    let result = simulate(&job.scene.sim_scene(direct, ris), &sim_plan(mc, doppler, seed, grid))?;
    Ok(result.lcr()?)
}

//! Acceptance checks, each reduced to named measurements with limits.

use std::f64::consts::PI;
use std::time::Instant;

use lcr_core::analytic::{
    group_eigenvalues, lcr_direct_exact, lcr_direct_stable, lcr_numeric_cf_weighted, lcr_ris, lcr_ris_exact_form,
    mean_snr_speed_direct, mean_snr_speed_direct_asymptotic, mean_snr_speed_ris, omega_sq, y_moments, CfOptions,
    GroupingPolicy, LcrCurve, LcrSource, RisLcrParams,
};
use lcr_core::channel::{
    layout_gains, spatial_correlation, steering_vector, ArrayGeometry, CorrelationMatrix, Layout,
    LayoutPreset,
};
use lcr_core::montecarlo::{
    ris_phase_cascade, simulate, simulate_branches, snr_closed_form, snr_explicit, FadingProcessConfig, LinkSpec,
    SimPlan, SimResult, SimScene,
};
use lcr_core::{db_to_linear, linear_to_db};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::error::{CliError, Result};
use crate::output::write_file;
use crate::run::RunReport;
use crate::scene::{ArrayConfig, SceneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    Below,
    AtLeast,
}

impl Bound {
    pub fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Bound::AtMost => value <= limit,
            Bound::Below => value < limit,
            Bound::AtLeast => value >= limit,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::Below => "<",
            Bound::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Measure {
    /// `quantity` or `quantity[case]`.
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Measure {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound, limit: f64) -> Self {
        Measure { name: name.into(), value, limit, bound, passed: bound.holds(value, limit) }
    }

    /// Name without the case suffix.
    pub fn quantity(&self) -> &str {
        self.name.split('[').next().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub title: &'static str,
    pub measures: Vec<Measure>,
    pub passed: bool,
    pub seconds: f64,
}

/// Knobs for the checks. `samples` replaces every Monte Carlo sample budget,
/// which is useful for smoke runs; the default budgets are the pinned ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    pub samples: Option<usize>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { seed: 1, samples: None }
    }
}

const REPLICATES: usize = 8;

impl ValidateOptions {
    fn plan(&self, default_samples: usize, grid: &[f64]) -> SimPlan {
        let total = self.samples.unwrap_or(default_samples);
        SimPlan {
            process: FadingProcessConfig {
                doppler: 1.0,
                sample_rate: 64.0,
                n_samples: (total / REPLICATES).max(10_000),
                n_sinusoids: 64,
                seed: self.seed,
            },
            replicates: REPLICATES,
            thresholds_db: grid.to_vec(),
            // Narrow curves (large gamma shape) bend enough for a wider window to bias the density.
            density_half_width_db: 0.05,
        }
    }
}

fn outcome(id: u32, title: &'static str, start: Instant, measures: Vec<Measure>) -> CheckOutcome {
    CheckOutcome { id, title, passed: measures.iter().all(|m| m.passed), measures, seconds: start.elapsed().as_secs_f64() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn unit_steering(n_x: usize, n_z: usize) -> Result<lcr_core::channel::SteeringVector> {
    Ok(steering_vector(&ArrayGeometry::new(n_x, n_z, 0.5)?, PI / 2.0, PI / 4.0)?)
}

fn preset_scene(layout: LayoutPreset, bs: ArrayConfig, ris: ArrayConfig) -> Result<crate::scene::Scene> {
    SceneConfig::preset(layout, bs, ris).build()
}

// Maximum relative error over points where `keep` holds; NaN-free.
fn max_rel_where(pairs: impl Iterator<Item = (f64, f64, bool)>) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (got, want, keep) in pairs {
        if keep {
            worst = worst.max(rel(got, want));
            n += 1;
        }
    }
    (worst, n)
}

/// 1: single-element chain (exact form, closed form, simulation).
pub fn criterion_1(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let id1 = CorrelationMatrix::identity(1)?;
    let w2 = omega_sq(&id1, 1.0, 1.0)?;
    let mut worst_exact = 0.0f64;
    for i in 0..=300 {
        let t = 10f64.powf(-2.0 + 3.0 * i as f64 / 300.0);
        let got = lcr_ris_exact_form(t, 1.0, w2, (-t).exp())?;
        let want = (2.0 * PI * t).sqrt() * (-t).exp();
        worst_exact = worst_exact.max(rel(got, want));
    }
    let g = grid(-20.0, 10.0, 1.0);
    let a = unit_steering(1, 1)?;
    let scene = SimScene {
        direct: None,
        ris: Some(LinkSpec { correlation: id1, beta: 1.0, doppler: 1.0 }),
        beta_rb: 1.0,
        a_b: a.clone(),
        a_r: a,
        snr_scale: 1.0,
    };
    let sim = simulate(&scene, &opts.plan(1_000_000, &g))?.lcr()?;
    let (worst_mc, used) = max_rel_where(g.iter().enumerate().map(|(j, &db)| {
        let t = db_to_linear(db);
        (sim.curve.values[j], (2.0 * PI * t).sqrt() * (-t).exp(), sim.counts[j] >= 1000)
    }));
    let measures = vec![
        Measure::new("exact_form_max_rel_err", worst_exact, Bound::AtMost, 1e-12),
        Measure::new("mc_max_rel_err", worst_mc, Bound::AtMost, 0.03),
        Measure::new("mc_thresholds_compared", used as f64, Bound::AtLeast, 1.0),
        Measure::new("runtime_s", start.elapsed().as_secs_f64(), Bound::Below, 60.0),
    ];
    Ok(outcome(1, "single-element RIS LCR: exact form and simulation", start, measures))
}

/// 2: gamma-approximated RIS LCR against simulation.
pub fn criterion_2(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    for (n, nx) in [(16, 4), (64, 8)] {
        for dr in [0.1, 0.5] {
            let scene = preset_scene(LayoutPreset::A, ArrayConfig::new(8, 4, 0.5), ArrayConfig::new(nx, n / nx, dr))?;
            let p = scene.ris_params()?;
            let mean_db = linear_to_db(p.mean_snr());
            let g = grid((mean_db - 20.0).floor(), (mean_db + 8.0).ceil(), 0.25);
            // No budget is pinned here. At the band edges (LCR near 0.05) 10^6
            // samples leave ~4% noise, so use ten times that.
            let res = simulate(&scene.sim_scene(false, true), &opts.plan(10_000_000, &g))?;
            let sim = res.lcr()?;
            let mut gamma = Vec::new();
            let mut exact = Vec::new();
            for (j, &db) in g.iter().enumerate() {
                let t = db_to_linear(db);
                let keep = sim.curve.values[j] >= 0.05;
                gamma.push((lcr_ris(t, &p)?, sim.curve.values[j], keep));
                exact.push((lcr_ris_exact_form(t, p.c, p.omega_sq, res.density[j])?, sim.curve.values[j], keep));
            }
            let case = format!("N={n};dr={dr}");
            let (wg, used) = max_rel_where(gamma.into_iter());
            let (we, _) = max_rel_where(exact.into_iter());
            measures.push(Measure::new(format!("gamma_vs_mc_max_rel_err[{case}]"), wg, Bound::AtMost, 0.10));
            measures.push(Measure::new(format!("exact_form_vs_mc_max_rel_err[{case}]"), we, Bound::AtMost, 0.04));
            measures.push(Measure::new(format!("band_thresholds[{case}]"), used as f64, Bound::AtLeast, 1.0));
        }
    }
    measures.push(Measure::new("runtime_s", start.elapsed().as_secs_f64(), Bound::Below, 600.0));
    Ok(outcome(2, "RIS-only gamma approximation at scale", start, measures))
}

/// 3: variance of the envelope-sum derivative.
pub fn criterion_3(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    let gains = layout_gains(&Layout::preset(LayoutPreset::A))?;
    for (n, nx) in [(4, 2), (16, 4)] {
        for dr in [0.1, 0.5] {
            let geo = ArrayGeometry::new(nx, n / nx, dr)?;
            let r = spatial_correlation(&geo)?;
            let want = omega_sq(&r, gains.beta_ur, 1.0)?;
            let res = simulate(&ris_only(&r, gains.beta_ur, &geo)?, &opts.plan(1_000_000, &[0.0]))?;
            let got = res.y_dot.map(|m| m.variance()).unwrap_or(f64::NAN);
            measures.push(Measure::new(format!("omega_sq_rel_err[N={n};dr={dr}]"), rel(got, want), Bound::AtMost, 0.03));
        }
    }
    Ok(outcome(3, "derivative variance of Y against finite differences", start, measures))
}

fn ris_only(r: &CorrelationMatrix, beta_ur: f64, geo: &ArrayGeometry) -> Result<SimScene> {
    Ok(SimScene {
        direct: None,
        ris: Some(LinkSpec { correlation: r.clone(), beta: beta_ur, doppler: 1.0 }),
        beta_rb: 1.0,
        a_b: unit_steering(1, 1)?,
        a_r: steering_vector(geo, PI / 2.0, 5.0 * PI / 4.0)?,
        snr_scale: 1.0,
    })
}

/// 4: mean and variance of Y.
pub fn criterion_4(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    let gains = layout_gains(&Layout::preset(LayoutPreset::A))?;
    for (n, nx) in [(2, 2), (16, 4), (128, 16)] {
        let geo = ArrayGeometry::new(nx, n / nx, 0.1)?;
        let r = spatial_correlation(&geo)?;
        let (mean, var) = y_moments(&r, gains.beta_ur)?;
        let res = simulate(&ris_only(&r, gains.beta_ur, &geo)?, &opts.plan(1_000_000, &[0.0]))?;
        let y = res.y.unwrap_or_default();
        measures.push(Measure::new(format!("mean_rel_err[N={n}]"), rel(y.mean, mean), Bound::AtMost, 0.01));
        measures.push(Measure::new(format!("var_rel_err[N={n}]"), rel(y.variance(), var), Bound::AtMost, 0.03));
    }
    Ok(outcome(4, "moments of Y", start, measures))
}

fn geometric_spectrum(m: usize) -> Vec<f64> {
    (0..m).map(|i| 2f64.powi((m - 1 - i) as i32)).collect()
}

/// 5: exact direct-link formula on small separated spectra.
pub fn criterion_5(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    let cf = CfOptions::default();
    for m in 2..=6 {
        let theta = geometric_spectrum(m);
        let mean_db = linear_to_db(theta.iter().sum());
        let g = grid(mean_db - 8.0, mean_db + 5.0, 0.5);
        let weighted: Vec<(f64, usize)> = theta.iter().map(|&t| (t, 1)).collect();
        let mut worst_cf = 0.0f64;
        let mut compared = 0;
        let mut exact = Vec::new();
        for &db in &g {
            let t = db_to_linear(db);
            let e = lcr_direct_exact(t, &theta)?.value;
            exact.push(e);
            // Points the oracle cannot certify are skipped and counted.
            if let Ok(want) = lcr_numeric_cf_weighted(t, &weighted, &cf) {
                worst_cf = worst_cf.max(rel(e, want));
                compared += 1;
            }
        }
        let sim = simulate_branches(&theta, &opts.plan(1_000_000, &g))?.lcr()?;
        let peak = exact.iter().copied().fold(0.0, f64::max);
        let (worst_mc, _) =
            max_rel_where(exact.iter().zip(&sim.curve.values).map(|(&e, &s)| (s, e, e >= 0.5 * peak)));
        measures.push(Measure::new(format!("cf_max_rel_err[M={m}]"), worst_cf, Bound::AtMost, 1e-5));
        measures.push(Measure::new(format!("cf_points[M={m}]"), compared as f64, Bound::AtLeast, g.len() as f64 / 2.0));
        measures.push(Measure::new(format!("mc_near_peak_max_rel_err[M={m}]"), worst_mc, Bound::AtMost, 0.05));
    }
    Ok(outcome(5, "exact direct-link LCR on small spectra", start, measures))
}

/// 6: grouped expansion, exact tails (a) and the M=32 approximation (b).
pub fn criterion_6(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    let cf = CfOptions::default();
    let cases: [(&[f64], usize); 5] = [
        (&[4.0, 1.0, 1.0], 1),
        (&[5.0, 2.0, 1.0, 1.0], 2),
        (&[6.0, 3.0, 1.5, 1.0, 1.0], 3),
        (&[8.0, 4.0, 2.0, 1.0, 1.0, 1.0], 3),
        (&[3.0, 1.0, 1.0, 1.0, 1.0, 1.0], 1),
    ];
    for (theta, l) in cases {
        let gs = group_eigenvalues(theta, GroupingPolicy::Fixed(l))?;
        let mean_db = linear_to_db(theta.iter().sum());
        let mut worst = 0.0f64;
        for db in grid(mean_db - 8.0, mean_db + 5.0, 0.5) {
            let t = db_to_linear(db);
            if let Ok(want) = lcr_numeric_cf_weighted(t, &gs.weighted(), &cf) {
                worst = worst.max(rel(lcr_direct_stable(t, &gs)?, want));
            }
        }
        measures.push(Measure::new(format!("exact_tail_cf_max_rel_err[M={};L={l}]", theta.len()), worst, Bound::AtMost, 1e-6));
    }

    let scene = preset_scene(LayoutPreset::A, ArrayConfig::new(8, 4, 0.5), ArrayConfig::new(16, 8, 0.1))?;
    let gs = scene.grouped(GroupingPolicy::Fixed(2))?;
    let mean_db = linear_to_db(scene.direct_mean_snr());
    let g = grid((mean_db - 8.0).floor(), (mean_db + 5.0).ceil(), 0.25);
    let sim = simulate(&scene.sim_scene(true, false), &opts.plan(1_000_000, &g))?.lcr()?;
    let mut pairs = Vec::new();
    for (j, &db) in g.iter().enumerate() {
        let v = lcr_direct_stable(db_to_linear(db), &gs)?;
        pairs.push((v, sim.curve.values[j], sim.curve.values[j] >= 0.05));
    }
    let (worst, used) = max_rel_where(pairs.into_iter());
    measures.push(Measure::new("grouped_l2_vs_mc_max_rel_err[M=32]", worst, Bound::AtMost, 0.05));
    measures.push(Measure::new("grouped_l2_band_thresholds[M=32]", used as f64, Bound::AtLeast, 1.0));
    Ok(outcome(6, "grouped-eigenvalue expansion", start, measures))
}

/// 7: the exact formula breaks down at M=32 while the grouped one does not.
pub fn criterion_7(_opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let scene = preset_scene(LayoutPreset::A, ArrayConfig::new(8, 4, 0.5), ArrayConfig::new(16, 8, 0.1))?;
    let theta = scene.direct_eigenvalues()?;
    let gs = scene.grouped(GroupingPolicy::Fixed(2))?;
    let mean_db = linear_to_db(scene.direct_mean_snr());
    let g = grid((mean_db - 12.0).floor(), (mean_db + 6.0).ceil(), 0.25);
    let mut unreliable = 0;
    let mut bad = 0;
    let mut values = Vec::new();
    for &db in &g {
        let t = db_to_linear(db);
        match lcr_direct_exact(t, &theta) {
            Ok(e) if e.is_reliable() => {}
            _ => unreliable += 1,
        }
        match lcr_direct_stable(t, &gs) {
            Ok(v) if v.is_finite() && v > 0.0 => values.push(v),
            _ => {
                bad += 1;
                values.push(0.0);
            }
        }
    }
    let unimodal = LcrCurve { thresholds_db: g.clone(), values, source: LcrSource::DirectStable { l: 2, s: 30 } }
        .is_unimodal();
    let measures = vec![
        Measure::new("exact_unreliable_points", unreliable as f64, Bound::AtLeast, 1.0),
        Measure::new("stable_bad_points", bad as f64, Bound::AtMost, 0.0),
        Measure::new("stable_unimodal", unimodal as u8 as f64, Bound::AtLeast, 1.0),
    ];
    Ok(outcome(7, "instability of the exact formula at M=32", start, measures))
}

/// 8: mean SNR speed.
pub fn criterion_8(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    for m in [1usize, 4, 16] {
        let geo = ArrayGeometry::new(m, 1, 0.5)?;
        let scene = SimScene {
            direct: Some(LinkSpec { correlation: CorrelationMatrix::identity(m)?, beta: 1.0, doppler: 1.0 }),
            ris: None,
            beta_rb: 0.0,
            a_b: steering_vector(&geo, PI / 2.0, PI / 4.0)?,
            a_r: unit_steering(1, 1)?,
            snr_scale: 1.0,
        };
        let res = simulate(&scene, &opts.plan(1_000_000, &[0.0]))?;
        let want = mean_snr_speed_direct(m, 1.0, 1.0, 1.0)?;
        measures.push(Measure::new(format!("direct_rel_err[M={m}]"), rel(res.mean_speed, want), Bound::AtMost, 0.03));
    }
    for n in [1usize, 4, 16] {
        let geo = ArrayGeometry::new(n, 1, 0.5)?;
        let scene = ris_only(&CorrelationMatrix::identity(n)?, 1.0, &geo)?;
        let res = simulate(&scene, &opts.plan(1_000_000, &[0.0]))?;
        let want = mean_snr_speed_ris(1, n, 1.0, 1.0, 1.0, 1.0);
        measures.push(Measure::new(format!("ris_rel_err[N={n}]"), rel(res.mean_speed, want), Bound::AtMost, 0.03));
    }
    let ratio = mean_snr_speed_direct(64, 1.0, 1.0, 1.0)? / mean_snr_speed_direct_asymptotic(64, 1.0, 1.0, 1.0);
    measures.push(Measure::new("asymptotic_ratio_err[M=64]", (ratio - 1.0).abs(), Bound::AtMost, 0.01));
    Ok(outcome(8, "mean SNR speed", start, measures))
}

fn crossing_shift(a: &LcrCurve, b: &LcrCurve, level: f64) -> Option<(f64, f64)> {
    let (ra, fa) = a.level_crossings_db(level)?;
    let (rb, fb) = b.level_crossings_db(level)?;
    Some((ra - rb, fa - fb))
}

fn sim_curve(res: &SimResult) -> Result<LcrCurve> {
    Ok(res.lcr()?.curve)
}

/// 9: shadowing the dominant link.
pub fn criterion_9(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut measures = Vec::new();
    for layout in [LayoutPreset::B, LayoutPreset::C] {
        let scene = preset_scene(layout, ArrayConfig::new(8, 4, 0.5), ArrayConfig::new(16, 8, 0.1))?;
        let dominant = scene.dominant()?;
        let shadowed = scene.shadowed(dominant, 0.5)?;
        let dom_only = match dominant {
            crate::scene::DominantLink::Direct => scene.sim_scene(true, false),
            crate::scene::DominantLink::Ris => scene.sim_scene(false, true),
        };
        let dom_mean = match dominant {
            crate::scene::DominantLink::Direct => scene.direct_mean_snr(),
            crate::scene::DominantLink::Ris => scene.ris_mean_snr()?,
        };
        let g = grid(
            (linear_to_db(dom_mean) - 25.0).floor(),
            (linear_to_db(scene.full_mean_snr()?) + 8.0).ceil(),
            0.1,
        );
        let plan = opts.plan(1_000_000, &g);
        let full = sim_curve(&simulate(&scene.sim_scene(true, true), &plan)?)?;
        let sl = sim_curve(&simulate(&shadowed.sim_scene(true, true), &plan)?)?;
        let dom = sim_curve(&simulate(&dom_only, &plan)?)?;
        let case = format!("layout={layout:?}");
        let peak = |c: &LcrCurve| c.peak().map(|p| p.1).unwrap_or(0.0);

        let level = 0.5 * peak(&full).min(peak(&dom));
        let (rise, fall) = crossing_shift(&full, &dom, level).unwrap_or((f64::NAN, f64::NAN));
        measures.push(Measure::new(format!("full_right_of_dominant_db[{case}]"), rise.min(fall), Bound::AtLeast, 0.0));

        let level = 0.5 * peak(&full).min(peak(&sl));
        let (rise, fall) = crossing_shift(&full, &sl, level).unwrap_or((f64::NAN, f64::NAN));
        let shift = 0.5 * (rise + fall);
        measures.push(Measure::new(format!("shadow_shift_err_db[{case}]"), (shift - 3.0).abs(), Bound::AtMost, 0.5));
        measures.push(Measure::new(format!("peak_change[{case}]"), rel(peak(&sl), peak(&full)), Bound::Below, 0.10));
    }
    Ok(outcome(9, "dominant-link shadowing shifts the full-channel curve", start, measures))
}

/// 10: lower RIS correlation narrows the RIS-only curve.
pub fn criterion_10(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut spreads = Vec::new();
    for dr in [0.1, 0.5] {
        let scene = preset_scene(LayoutPreset::A, ArrayConfig::new(8, 4, 0.5), ArrayConfig::new(16, 8, dr))?;
        let p: RisLcrParams = scene.ris_params()?;
        let mean_db = linear_to_db(p.mean_snr());
        let g = grid((mean_db - 25.0).floor(), (mean_db + 8.0).ceil(), 0.1);
        let analytic = LcrCurve::tabulate(&g, LcrSource::RisGamma, |t| lcr_ris(t, &p))?;
        let sim = sim_curve(&simulate(&scene.sim_scene(false, true), &opts.plan(1_000_000, &g))?)?;
        let spread = |c: &LcrCurve| c.level_crossings_db(0.1).map(|(a, b)| b - a).unwrap_or(f64::NAN);
        spreads.push((spread(&analytic), spread(&sim)));
    }
    let measures = vec![
        Measure::new("analytic_spread_ratio", spreads[1].0 / spreads[0].0, Bound::Below, 1.0),
        Measure::new("mc_spread_ratio", spreads[1].1 / spreads[0].1, Bound::Below, 1.0),
    ];
    Ok(outcome(10, "RIS-only curve narrows as correlation falls", start, measures))
}

fn complex_normal(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (scale / 2f64.sqrt())
}

/// 11: explicit phase matrix against the closed SNR expression.
pub fn criterion_11(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a_b = unit_steering(4, 2)?;
    let mut measures = Vec::new();
    for (n, nx) in [(1, 1), (8, 4), (64, 8)] {
        let geo = ArrayGeometry::new(nx, n / nx, 0.2)?;
        let a_r = steering_vector(&geo, PI / 2.0, 5.0 * PI / 4.0)?;
        let mut worst = 0.0f64;
        for _ in 0..3334 {
            let beta_d = 10f64.powf(rng.random_range(-9.0..-5.0));
            let beta_ur = 10f64.powf(rng.random_range(-8.0..-4.0));
            let beta_rb = 10f64.powf(rng.random_range(-7.0..-5.0));
            let scale = 10f64.powf(rng.random_range(7.0..11.0));
            let hd: Vec<Complex64> = (0..a_b.len()).map(|_| complex_normal(&mut rng, beta_d.sqrt())).collect();
            let hur: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng, beta_ur.sqrt())).collect();
            let y = ris_phase_cascade(&hur, &a_r)?;
            let closed = snr_closed_form(&hd, y, beta_rb, &a_b, scale)?;
            let explicit = snr_explicit(&hd, &hur, beta_rb, &a_b, &a_r, scale)?;
            worst = worst.max(rel(explicit, closed));
        }
        measures.push(Measure::new(format!("max_rel_err[N={n}]"), worst, Bound::AtMost, 1e-10));
    }
    Ok(outcome(11, "explicit phase matrix reproduces the closed SNR form", start, measures))
}

pub type Check = fn(&ValidateOptions) -> Result<CheckOutcome>;

pub const CHECKS: [Check; 11] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
];

pub fn run_all(opts: &ValidateOptions) -> Result<Vec<CheckOutcome>> {
    CHECKS.iter().map(|c| c(opts)).collect()
}

/// One line per check.
pub fn summary_line(o: &CheckOutcome) -> String {
    let worst = o.measures.iter().find(|m| !m.passed).or(o.measures.first());
    let detail = worst
        .map(|m| format!("{} = {:.4e} ({} {:e})", m.name, m.value, m.bound.symbol(), m.limit))
        .unwrap_or_default();
    format!(
        "criterion {:>2} {}  {} [{:.1}s]  {}",
        o.id,
        if o.passed { "PASS" } else { "FAIL" },
        o.title,
        o.seconds,
        detail
    )
}

pub fn table_csv(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::from("criterion,measure,value,bound,limit,passed\n");
    for o in outcomes {
        for m in &o.measures {
            s.push_str(&format!(
                "{},{},{:.16e},{},{:.16e},{}\n",
                o.id,
                m.name,
                m.value,
                m.bound.symbol(),
                m.limit,
                m.passed
            ));
        }
    }
    s
}

pub fn run_to_dir(spec: &ExperimentSpec) -> Result<RunReport> {
    let opts = ValidateOptions { seed: spec.seed, samples: (spec.mc.samples != crate::config::McSettings::default().samples).then_some(spec.mc.samples) };
    let mut outcomes = Vec::new();
    for check in CHECKS {
        let o = check(&opts)?;
        println!("{}", summary_line(&o));
        outcomes.push(o);
    }
    let json = serde_json::to_string_pretty(&outcomes).map_err(|e| CliError::usage(e.to_string()))? + "\n";
    let files = vec![
        write_file(&spec.out, "validation.csv", &table_csv(&outcomes))?,
        write_file(&spec.out, "validation.json", &json)?,
    ];
    Ok(RunReport { files, all_passed: outcomes.iter().all(|o| o.passed) })
}

//! Scenario execution.

use std::path::PathBuf;

use serde_json::json;

use crate::config::{ExperimentSpec, Scenario};
use crate::error::{CliError, Result};
use crate::output::{curve_csv, empirical_csv, ensure_dir, write_file};
use crate::scenario::{auto_grid, jobs, simulate_job, Analytic};
use crate::validate;

/// Files written by a run and whether every check passed (validate only).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub all_passed: bool,
}

pub const MANIFEST: &str = "run.json";

/// Runs the experiment on a thread pool of the configured size.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| CliError::usage(format!("threads: {e}")))?;
    pool.install(|| run_inner(spec))
}

fn run_inner(spec: &ExperimentSpec) -> Result<RunReport> {
    ensure_dir(&spec.out)?;
    if spec.scenario == Scenario::Validate {
        return validate::run_to_dir(spec);
    }
    let jobs = jobs(spec)?;
    let grid_spec = match spec.grid {
        Some(g) => g,
        None => auto_grid(&jobs, spec.grouping)?,
    };
    let grid = grid_spec.points();
    let mut files = Vec::new();
    let mut curves = Vec::new();
    for job in &jobs {
        let stem = job.stem(spec.scenario);
        let scene = job.scene.summary()?;
        if let Some(an) = Analytic::for_job(job, spec.grouping)? {
            let curve = an.curve(&grid)?;
            let name = format!("{stem}_analytic.csv");
            files.push(write_file(&spec.out, &name, &curve_csv(&curve, None))?);
            curves.push(json!({
                "file": name,
                "link": job.link,
                "label": job.label,
                "source": curve.source,
                "formula_version": env!("CARGO_PKG_VERSION"),
                "grouping": match &curve.source {
                    lcr_core::analytic::LcrSource::DirectStable { l, s } => json!({ "l": l, "s": s }),
                    _ => serde_json::Value::Null,
                },
                "scene": scene,
            }));
        }
        let sim = simulate_job(job, &spec.mc, spec.seed, &grid)?;
        let name = format!("{stem}_sim.csv");
        files.push(write_file(&spec.out, &name, &empirical_csv(&sim))?);
        let flagged: Vec<f64> =
            grid.iter().zip(&sim.flagged).filter(|(_, &f)| f).map(|(&t, _)| t).collect();
        curves.push(json!({
            "file": name,
            "link": job.link,
            "label": job.label,
            "source": sim.curve.source,
            "formula_version": env!("CARGO_PKG_VERSION"),
            "grouping": serde_json::Value::Null,
            "low_count_thresholds_db": flagged,
            "scene": scene,
        }));
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": spec.seed,
        "config": spec,
        "grid": grid_spec,
        "curves": curves,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::usage(e.to_string()))? + "\n";
    files.push(write_file(&spec.out, MANIFEST, &text)?);
    Ok(RunReport { files, all_passed: true })
}

//! CSV curves and the JSON run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lcr_core::analytic::LcrCurve;
use lcr_core::montecarlo::EmpiricalLcr;

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "threshold_db,lcr_normalized,source,ci_low,ci_high";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text for a curve, with optional interval columns.
pub fn curve_csv(curve: &LcrCurve, ci: Option<(&[f64], &[f64])>) -> String {
    let mut s = String::with_capacity(64 * (curve.values.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    let label = curve.source.label();
    for (i, (&db, &v)) in curve.thresholds_db.iter().zip(&curve.values).enumerate() {
        let (lo, hi) = match ci {
            Some((lo, hi)) if lo[i].is_finite() && hi[i].is_finite() => (num(lo[i]), num(hi[i])),
            _ => (String::new(), String::new()),
        };
        let _ = writeln!(s, "{},{},{label},{lo},{hi}", num(db), num(v));
    }
    s
}

pub fn empirical_csv(e: &EmpiricalLcr) -> String {
    curve_csv(&e.curve, Some((&e.ci_low, &e.ci_high)))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

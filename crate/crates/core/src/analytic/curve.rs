use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::db_to_linear;

/// What produced a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcrSource {
    RisGamma,
    RisExactForm,
    DirectExact,
    DirectStable { l: usize, s: usize },
    DirectNumericCf,
    Simulated { replicates: usize, samples_per_replicate: usize },
}

impl LcrSource {
    /// Short label used in CSV rows.
    pub fn label(&self) -> &'static str {
        match self {
            LcrSource::RisGamma => "analytic_ris_gamma",
            LcrSource::RisExactForm => "analytic_ris_exact_form",
            LcrSource::DirectExact => "analytic_direct_exact",
            LcrSource::DirectStable { .. } => "analytic_direct_stable",
            LcrSource::DirectNumericCf => "analytic_direct_cf",
            LcrSource::Simulated { .. } => "simulation",
        }
    }
}

/// LCR values on a dB threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcrCurve {
    pub thresholds_db: Vec<f64>,
    pub values: Vec<f64>,
    pub source: LcrSource,
}

impl LcrCurve {
    /// Evaluates `f` at each threshold (converted to linear scale).
    pub fn tabulate<F>(thresholds_db: &[f64], source: LcrSource, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let values = thresholds_db.iter().map(|&db| f(db_to_linear(db))).collect::<Result<Vec<_>>>()?;
        let curve = LcrCurve { thresholds_db: thresholds_db.to_vec(), values, source };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds_db.len() != self.values.len() {
            return domain("LcrCurve: thresholds and values differ in length");
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain("LcrCurve: values must be finite and non-negative");
        }
        Ok(())
    }

    /// Index and value of the largest entry.
    pub fn peak(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// True when the values rise to a single maximum and then fall.
    pub fn is_unimodal(&self) -> bool {
        let Some((p, _)) = self.peak() else { return true };
        self.values[..=p].windows(2).all(|w| w[1] >= w[0]) && self.values[p..].windows(2).all(|w| w[1] <= w[0])
    }

    /// Thresholds (dB) where the curve crosses `level`, found by linear
    /// interpolation in dB on the rising and falling flanks.
    pub fn level_crossings_db(&self, level: f64) -> Option<(f64, f64)> {
        let (p, peak) = self.peak()?;
        if peak < level {
            return None;
        }
        let x = &self.thresholds_db;
        let v = &self.values;
        let lerp = |i: usize, j: usize| x[i] + (level - v[i]) * (x[j] - x[i]) / (v[j] - v[i]);
        let rise = (0..p).rev().find(|&i| v[i] < level).map(|i| lerp(i, i + 1))?;
        let fall = (p + 1..v.len()).find(|&i| v[i] < level).map(|i| lerp(i - 1, i))?;
        Some((rise, fall))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodal_and_crossings() {
        let c = LcrCurve {
            thresholds_db: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            values: vec![0.0, 0.2, 1.0, 0.4, 0.0],
            source: LcrSource::RisGamma,
        };
        assert!(c.is_unimodal());
        let (a, b) = c.level_crossings_db(0.1).unwrap();
        assert!((a - 0.5).abs() < 1e-12 && (b - 3.75).abs() < 1e-12);
        let bumpy = LcrCurve { values: vec![0.0, 1.0, 0.5, 0.8, 0.0], ..c };
        assert!(!bumpy.is_unimodal());
    }
}

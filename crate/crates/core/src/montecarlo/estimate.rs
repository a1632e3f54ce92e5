//! Empirical estimators: crossing counts, densities, moments and speeds.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::snr::SnrSeries;
use crate::analytic::{LcrCurve, LcrSource};
use crate::db_to_linear;
use crate::error::{domain, Result};

/// Thresholds seeing fewer upcrossings than this are flagged.
pub const MIN_CROSSINGS: u64 = 100;

/// Batches used for the confidence interval of a single series.
pub const BATCHES: usize = 16;

/// Confidence level of reported intervals.
pub const CONFIDENCE: f64 = 0.99;

/// Number of `i` with `x[i] < T ≤ x[i+1]`.
pub fn count_upcrossings(values: &[f64], t: f64) -> u64 {
    values.windows(2).filter(|w| w[0] < t && t <= w[1]).count() as u64
}

/// Upcrossing counts for several thresholds, fed block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct UpcrossingCounter {
    thresholds: Vec<f64>,
    counts: Vec<u64>,
    last: Option<f64>,
    samples: u64,
}

impl UpcrossingCounter {
    pub fn new(thresholds: &[f64]) -> Self {
        UpcrossingCounter { thresholds: thresholds.to_vec(), counts: vec![0; thresholds.len()], last: None, samples: 0 }
    }

    pub fn push(&mut self, block: &[f64]) {
        for &x in block {
            if let Some(prev) = self.last {
                for (c, &t) in self.counts.iter_mut().zip(&self.thresholds) {
                    *c += (prev < t && t <= x) as u64;
                }
            }
            self.last = Some(x);
        }
        self.samples += block.len() as u64;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of sample intervals seen.
    pub fn intervals(&self) -> u64 {
        self.samples.saturating_sub(1)
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningMoments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.m2 / self.n as f64
        }
    }
}

/// Central differences `(x[i+1] − x[i−1]) / 2Δt`, streamed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CentralDifference {
    prev: [Option<f64>; 2],
    abs_sum: f64,
    moments: RunningMoments,
}

impl CentralDifference {
    pub fn push(&mut self, block: &[f64], dt: f64) {
        for &x in block {
            if let [Some(a), Some(_)] = self.prev {
                let d = (x - a) / (2.0 * dt);
                self.abs_sum += d.abs();
                self.moments.push(d);
            }
            self.prev = [self.prev[1], Some(x)];
        }
    }

    pub fn mean_abs(&self) -> f64 {
        self.abs_sum / self.moments.n as f64
    }

    pub fn moments(&self) -> RunningMoments {
        self.moments
    }
}

/// Counts of samples falling within `±half_width_db` of each threshold,
/// turned into density estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDensity {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<u64>,
    samples: u64,
}

impl WindowDensity {
    pub fn new(thresholds: &[f64], half_width_db: f64) -> Self {
        let f = db_to_linear(half_width_db);
        WindowDensity {
            lo: thresholds.iter().map(|t| t / f).collect(),
            hi: thresholds.iter().map(|t| t * f).collect(),
            counts: vec![0; thresholds.len()],
            samples: 0,
        }
    }

    pub fn push(&mut self, block: &[f64]) {
        for &x in block {
            for ((c, &lo), &hi) in self.counts.iter_mut().zip(&self.lo).zip(&self.hi) {
                *c += (lo <= x && x < hi) as u64;
            }
        }
        self.samples += block.len() as u64;
    }

    pub fn merge(&mut self, other: &WindowDensity) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.samples += other.samples;
    }

    pub fn densities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&c, (lo, hi))| c as f64 / (self.samples as f64 * (hi - lo)))
            .collect()
    }
}

/// Simulated LCR curve with per-threshold diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLcr {
    pub curve: LcrCurve,
    pub counts: Vec<u64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// True where fewer than [`MIN_CROSSINGS`] upcrossings were seen.
    pub flagged: Vec<bool>,
}

impl EmpiricalLcr {
    /// Combines per-part rates (equal durations) into a mean with a Student-t
    /// interval across parts.
    pub fn from_parts(
        thresholds_db: &[f64],
        part_counts: &[Vec<u64>],
        part_cycles: f64,
        source: LcrSource,
    ) -> Result<Self> {
        let k = part_counts.len();
        if k == 0 || !(part_cycles > 0.0) {
            return domain("empirical LCR needs at least one part of positive duration");
        }
        let quantile = if k > 1 {
            StudentsT::new(0.0, 1.0, (k - 1) as f64)
                .map_err(|e| crate::LcrError::Numeric(e.to_string()))?
                .inverse_cdf(0.5 + CONFIDENCE / 2.0)
        } else {
            f64::NAN
        };
        let n = thresholds_db.len();
        let mut values = Vec::with_capacity(n);
        let (mut lo, mut hi, mut counts, mut flagged) = (vec![], vec![], vec![], vec![]);
        for j in 0..n {
            let rates: Vec<f64> = part_counts.iter().map(|c| c[j] as f64 / part_cycles).collect();
            let total: u64 = part_counts.iter().map(|c| c[j]).sum();
            let mean = rates.iter().sum::<f64>() / k as f64;
            let half = if k > 1 {
                let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                quantile * (var / k as f64).sqrt()
            } else {
                f64::NAN
            };
            values.push(mean);
            lo.push((mean - half).max(0.0));
            hi.push(mean + half);
            counts.push(total);
            flagged.push(total < MIN_CROSSINGS);
        }
        let curve = LcrCurve { thresholds_db: thresholds_db.to_vec(), values, source };
        curve.validate()?;
        Ok(EmpiricalLcr { curve, counts, ci_low: lo, ci_high: hi, flagged })
    }

    /// Relative half-width of the interval at threshold `j`.
    pub fn relative_half_width(&self, j: usize) -> f64 {
        0.5 * (self.ci_high[j] - self.ci_low[j]) / self.curve.values[j]
    }
}

fn check_not_constant(values: &[f64]) -> Result<()> {
    let first = values.first().copied().unwrap_or(0.0);
    if values.len() < 2 || values.iter().all(|&v| v == first) {
        return domain("series is constant or too short");
    }
    Ok(())
}

/// Normalised LCR of one series; the interval comes from [`BATCHES`]
/// contiguous batches.
pub fn empirical_lcr(series: &SnrSeries, thresholds_db: &[f64]) -> Result<EmpiricalLcr> {
    let v = &series.values;
    check_not_constant(v)?;
    let intervals = v.len() - 1;
    let batches = BATCHES.min(intervals);
    let per = intervals / batches;
    let thresholds: Vec<f64> = thresholds_db.iter().map(|&d| db_to_linear(d)).collect();
    let parts: Vec<Vec<u64>> = (0..batches)
        .map(|b| {
            // Batches share their edge sample so no interval is lost; the
            // remainder goes to the last one.
            let end = if b + 1 == batches { intervals } else { (b + 1) * per };
            let mut c = UpcrossingCounter::new(&thresholds);
            c.push(&v[b * per..=end]);
            c.counts().to_vec()
        })
        .collect();
    let cycles = per as f64 * series.dt * series.doppler_norm;
    let mut out = EmpiricalLcr::from_parts(
        thresholds_db,
        &parts,
        cycles,
        LcrSource::Simulated { replicates: 1, samples_per_replicate: v.len() },
    )?;
    // The mean uses the exact total duration.
    for (val, &count) in out.curve.values.iter_mut().zip(&out.counts) {
        *val = count as f64 / series.cycles();
    }
    Ok(out)
}

/// Histogram density over `[min, max]` of the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPdf {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl EmpiricalPdf {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn empirical_pdf(values: &[f64], bins: usize) -> Result<EmpiricalPdf> {
    check_not_constant(values)?;
    if bins == 0 {
        return domain("empirical_pdf needs at least one bin");
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in values {
        let i = (((x - lo) / w) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let n = values.len() as f64;
    Ok(EmpiricalPdf {
        edges: (0..=bins).map(|i| lo + i as f64 * w).collect(),
        density: counts.iter().map(|&c| c as f64 / (n * w)).collect(),
    })
}

/// Sample mean and (population) variance.
pub fn empirical_moments(values: &[f64]) -> Result<(f64, f64)> {
    check_not_constant(values)?;
    let mut m = RunningMoments::default();
    values.iter().for_each(|&x| m.push(x));
    Ok((m.mean, m.variance()))
}

/// Average of `|x[i+1] − x[i−1]| / 2Δt`.
pub fn empirical_mean_speed(series: &SnrSeries) -> Result<f64> {
    check_not_constant(&series.values)?;
    if series.values.len() < 3 {
        return domain("mean speed needs at least three samples");
    }
    let mut d = CentralDifference::default();
    d.push(&series.values, series.dt);
    Ok(d.mean_abs())
}

/// Variance of the central-difference derivative.
pub fn empirical_derivative_variance(values: &[f64], dt: f64) -> Result<f64> {
    check_not_constant(values)?;
    let mut d = CentralDifference::default();
    d.push(values, dt);
    Ok(d.moments().variance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn upcrossing_examples() {
        assert_eq!(count_upcrossings(&[0.5, 1.5, 0.5, 1.5], 1.0), 2);
        assert_eq!(count_upcrossings(&[2.0; 10], 1.0), 0);
        let rising: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(count_upcrossings(&rising, 4.5), 1);
        // Touching the threshold from below counts once.
        assert_eq!(count_upcrossings(&[0.0, 1.0, 1.0, 0.0, 1.0], 1.0), 2);
    }

    #[test]
    fn streamed_counts_match_whole_series() {
        let x: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin() + 1.5).collect();
        let ts = [1.0, 1.5, 2.2];
        let mut c = UpcrossingCounter::new(&ts);
        for chunk in x.chunks(77) {
            c.push(chunk);
        }
        for (j, &t) in ts.iter().enumerate() {
            assert_eq!(c.counts()[j], count_upcrossings(&x, t));
        }
    }

    #[test]
    fn sinusoid_crosses_once_per_cycle() {
        // Shifted so the level sits at a positive threshold; 0 dB is 1.0.
        let n = 64 * 200 + 1;
        let x: Vec<f64> = (0..n).map(|i| 1.0 + (2.0 * PI * (i as f64 + 0.5) / 64.0).sin()).collect();
        let s = SnrSeries::new(x, 1.0 / 64.0, 1.0).unwrap();
        let e = empirical_lcr(&s, &[0.0]).unwrap();
        assert!((e.curve.values[0] - 1.0).abs() < 1e-12, "{}", e.curve.values[0]);
    }

    #[test]
    fn constant_series_is_rejected() {
        let s = SnrSeries::new(vec![1.0; 100], 0.1, 1.0).unwrap();
        assert!(empirical_lcr(&s, &[0.0]).is_err());
        assert!(empirical_moments(&s.values).is_err());
        assert!(empirical_mean_speed(&s).is_err());
    }

    #[test]
    fn moments_merge() {
        let x: Vec<f64> = (0..101).map(|i| (i as f64).sqrt()).collect();
        let (mean, var) = empirical_moments(&x).unwrap();
        let mut a = RunningMoments::default();
        let mut b = RunningMoments::default();
        x[..40].iter().for_each(|&v| a.push(v));
        x[40..].iter().for_each(|&v| b.push(v));
        a.merge(&b);
        assert!((a.mean - mean).abs() < 1e-13 && (a.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn ramp_speed_and_pdf() {
        let x: Vec<f64> = (0..1000).map(|i| 3.0 * i as f64 * 0.01).collect();
        let s = SnrSeries::new(x.clone(), 0.01, 1.0).unwrap();
        assert!((empirical_mean_speed(&s).unwrap() - 3.0).abs() < 1e-10);
        let pdf = empirical_pdf(&x, 10).unwrap();
        let mass: f64 = pdf.density.iter().map(|d| d * (pdf.edges[1] - pdf.edges[0])).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}

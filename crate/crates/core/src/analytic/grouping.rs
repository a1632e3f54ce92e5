use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Relative gap below which two eigenvalues count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Multiplicative nudge applied to break a tie.
pub const TIE_NUDGE: f64 = 1e-7;

/// How many leading eigenvalues to keep unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingPolicy {
    Fixed(usize),
    /// Keep the largest number of leading eigenvalues (at most `cap`, and
    /// leaving at least one for the tail) that each exceed
    /// `floor · θ_max`.
    Auto { floor: f64, cap: usize },
}

impl Default for GroupingPolicy {
    fn default() -> Self {
        GroupingPolicy::Auto { floor: 0.05, cap: 8 }
    }
}

/// Spectrum split into `L` unchanged leading values and one tail value
/// repeated `S` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSpectrum {
    lead: Vec<f64>,
    tail_value: f64,
    tail_count: usize,
    source: Vec<f64>,
    perturbed: bool,
}

impl GroupedSpectrum {
    /// Lead values `λ_1 > … > λ_L`.
    pub fn lead(&self) -> &[f64] {
        &self.lead
    }

    /// `λ_{L+1}`, the mean of the grouped trailing eigenvalues.
    pub fn tail_value(&self) -> f64 {
        self.tail_value
    }

    /// `S`, the multiplicity of `λ_{L+1}`.
    pub fn tail_count(&self) -> usize {
        self.tail_count
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// True when ties were broken by nudging values apart.
    pub fn perturbed(&self) -> bool {
        self.perturbed
    }

    pub fn l(&self) -> usize {
        self.lead.len()
    }

    pub fn m(&self) -> usize {
        self.lead.len() + self.tail_count
    }

    pub fn trace(&self) -> f64 {
        self.lead.iter().sum::<f64>() + self.tail_count as f64 * self.tail_value
    }

    /// Distinct `(value, multiplicity)` pairs of the grouped spectrum.
    pub fn weighted(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = self.lead.iter().map(|&l| (l, 1)).collect();
        out.push((self.tail_value, self.tail_count));
        out
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Partitions a spectrum (any order) into lead and averaged tail.
///
/// Lead values closer than [`TIE_TOLERANCE`] to a neighbour or to the tail
/// value are nudged apart by [`TIE_NUDGE`]; the tail absorbs the change so the
/// trace is preserved.
pub fn group_eigenvalues(theta: &[f64], policy: GroupingPolicy) -> Result<GroupedSpectrum> {
    if theta.is_empty() {
        return domain("group_eigenvalues: empty spectrum");
    }
    if theta.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return domain("group_eigenvalues: eigenvalues must be finite and non-negative");
    }
    let mut sorted = theta.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if !(sorted[0] > 0.0) {
        return domain("group_eigenvalues: need at least one positive eigenvalue");
    }
    let m = sorted.len();
    let l = match policy {
        GroupingPolicy::Fixed(l) => {
            if l >= m {
                return domain(format!("group_eigenvalues: L = {l} leaves no tail for M = {m}"));
            }
            l
        }
        GroupingPolicy::Auto { floor, cap } => {
            if !(0.0..1.0).contains(&floor) {
                return domain(format!("group_eigenvalues: AUTO floor must lie in [0, 1), got {floor}"));
            }
            sorted[..m - 1]
                .iter()
                .take(cap)
                .take_while(|&&x| x > floor * sorted[0])
                .count()
        }
    };
    let tail_count = m - l;
    let tail_sum: f64 = sorted[l..].iter().sum();
    let mut lead = sorted[..l].to_vec();
    let mut tail_value = tail_sum / tail_count as f64;
    if !(tail_value > 0.0) {
        return domain("group_eigenvalues: trailing eigenvalues are all zero; reduce L");
    }

    let mut perturbed = false;
    for i in 1..l {
        if close(lead[i], lead[i - 1]) || lead[i] >= lead[i - 1] {
            let target = lead[i - 1] * (1.0 - TIE_NUDGE);
            tail_value += (lead[i] - target) / tail_count as f64;
            lead[i] = target;
            perturbed = true;
        }
    }
    if let Some(&last) = lead.last() {
        if close(last, tail_value) {
            // Push the pair apart symmetrically in trace terms.
            let delta = last * TIE_NUDGE;
            lead[l - 1] = last + delta;
            tail_value -= delta / tail_count as f64;
            perturbed = true;
        }
    }
    Ok(GroupedSpectrum { lead, tail_value, tail_count, source: sorted, perturbed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_grouping_examples() {
        let g = group_eigenvalues(&[4.0, 1.0, 1.0], GroupingPolicy::Fixed(1)).unwrap();
        assert_eq!((g.lead(), g.tail_value(), g.tail_count()), (&[4.0][..], 1.0, 2));
        let g = group_eigenvalues(&[1.0, 8.0, 2.0, 4.0], GroupingPolicy::Fixed(2)).unwrap();
        assert_eq!((g.lead(), g.tail_value(), g.tail_count()), (&[8.0, 4.0][..], 1.5, 2));
        assert!(!g.perturbed());
        assert!(group_eigenvalues(&[3.0, 1.0], GroupingPolicy::Fixed(2)).is_err());
    }

    #[test]
    fn auto_respects_floor_and_cap() {
        let theta = [10.0, 5.0, 1.0, 0.4, 0.3, 0.2];
        let g = group_eigenvalues(&theta, GroupingPolicy::Auto { floor: 0.05, cap: 8 }).unwrap();
        assert_eq!(g.l(), 3);
        let g = group_eigenvalues(&theta, GroupingPolicy::Auto { floor: 0.05, cap: 2 }).unwrap();
        assert_eq!(g.l(), 2);
        let g = group_eigenvalues(&[1.0; 4], GroupingPolicy::Auto { floor: 0.05, cap: 8 }).unwrap();
        assert!(g.l() <= 3 && g.tail_count() >= 1);
    }

    #[test]
    fn ties_are_broken_and_trace_kept() {
        let theta = [5.0, 5.0, 2.0, 2.0, 1.0];
        let g = group_eigenvalues(&theta, GroupingPolicy::Fixed(3)).unwrap();
        assert!(g.perturbed());
        let lead = g.lead();
        assert!(lead[0] > lead[1] && lead[1] > lead[2] && lead[2] > g.tail_value());
        assert!((g.trace() - 15.0).abs() < 1e-12);
    }

    #[test]
    fn lead_tied_with_tail_is_separated() {
        let g = group_eigenvalues(&[3.0, 1.0, 1.0, 1.0], GroupingPolicy::Fixed(2)).unwrap();
        assert!(g.perturbed());
        assert!(g.lead()[1] > g.tail_value());
        assert!((g.trace() - 6.0).abs() < 1e-12);
    }
}

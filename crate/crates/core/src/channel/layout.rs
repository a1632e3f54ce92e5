use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Distance-based path loss `10^(c0_db/10) · (d/d0)^(−alpha)`.
pub fn path_gain(d: f64, alpha: f64, c0_db: f64, d0: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return domain(format!("path_gain: link distance must be positive, got {d}"));
    }
    if !(d0 > 0.0) {
        return domain(format!("path_gain: reference distance must be positive, got {d0}"));
    }
    Ok(10f64.powf(c0_db / 10.0) * (d / d0).powf(-alpha))
}

/// Named layouts sharing `d_rb = 40 m` and `d_y = 5 m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutPreset {
    /// Balanced direct and RIS links (`d_x = 29 m`).
    #[serde(alias = "a")]
    A,
    /// Dominant direct link (`d_x = 20 m`).
    #[serde(alias = "b")]
    B,
    /// Dominant RIS link (`d_x = 35 m`).
    #[serde(alias = "c")]
    C,
}

impl LayoutPreset {
    pub fn d_x(self) -> f64 {
        match self {
            LayoutPreset::A => 29.0,
            LayoutPreset::B => 20.0,
            LayoutPreset::C => 35.0,
        }
    }
}

impl std::str::FromStr for LayoutPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(LayoutPreset::A),
            "B" | "b" => Ok(LayoutPreset::B),
            "C" | "c" => Ok(LayoutPreset::C),
            other => Err(format!("unknown layout `{other}` (expected A, B or C)")),
        }
    }
}

/// Plan-view geometry and path-loss parameters.
///
/// The BS sits at the origin, the RIS at `(d_rb, 0)` and the UE at
/// `(d_x, d_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub d_rb: f64,
    pub d_x: f64,
    pub d_y: f64,
    pub alpha_d: f64,
    pub alpha_rb: f64,
    pub alpha_ur: f64,
    pub c0_db: f64,
    pub d0: f64,
}

impl Layout {
    pub fn preset(p: LayoutPreset) -> Self {
        Layout {
            d_rb: 40.0,
            d_x: p.d_x(),
            d_y: 5.0,
            alpha_d: 3.5,
            alpha_rb: 2.0,
            alpha_ur: 2.8,
            c0_db: -30.0,
            d0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("d_rb", self.d_rb), ("d_x", self.d_x), ("d_y", self.d_y), ("d0", self.d0)] {
            if !(v.is_finite() && v >= 0.0) {
                return domain(format!("layout.{name} must be a non-negative distance, got {v}"));
            }
        }
        for (name, v) in [("alpha_d", self.alpha_d), ("alpha_rb", self.alpha_rb), ("alpha_ur", self.alpha_ur)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("layout.{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    pub fn ue_bs_distance(&self) -> f64 {
        self.d_x.hypot(self.d_y)
    }

    pub fn ue_ris_distance(&self) -> f64 {
        (self.d_rb - self.d_x).hypot(self.d_y)
    }
}

/// Linear power gains of the three links; zero encodes a blocked link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    pub beta_d: f64,
    pub beta_ur: f64,
    pub beta_rb: f64,
}

impl LinkGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta_d", self.beta_d), ("beta_ur", self.beta_ur), ("beta_rb", self.beta_rb)] {
            if !(v.is_finite() && v >= 0.0) {
                return domain(format!("{name} must be a non-negative gain, got {v}"));
            }
        }
        Ok(())
    }
}

pub fn layout_gains(layout: &Layout) -> Result<LinkGains> {
    layout.validate()?;
    let l = layout;
    Ok(LinkGains {
        beta_d: path_gain(l.ue_bs_distance(), l.alpha_d, l.c0_db, l.d0)?,
        beta_ur: path_gain(l.ue_ris_distance(), l.alpha_ur, l.c0_db, l.d0)?,
        beta_rb: path_gain(l.d_rb, l.alpha_rb, l.c0_db, l.d0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_distance() {
        assert!((path_gain(1.0, 3.1, -30.0, 1.0).unwrap() - 1e-3).abs() < 1e-18);
        assert!((path_gain(2.5, 2.0, -12.0, 2.5).unwrap() - 10f64.powf(-1.2)).abs() < 1e-15);
    }

    #[test]
    fn forty_metres_free_space() {
        assert!((path_gain(40.0, 2.0, -30.0, 1.0).unwrap() - 6.25e-7).abs() < 1e-20);
    }

    #[test]
    fn layout_b_direct_distance() {
        let l = Layout::preset(LayoutPreset::B);
        assert!((l.ue_bs_distance() - 425f64.sqrt()).abs() < 1e-12);
        let g = layout_gains(&l).unwrap();
        let want = path_gain(425f64.sqrt(), 3.5, -30.0, 1.0).unwrap();
        assert_eq!(g.beta_d, want);
        assert_eq!(g.beta_rb, 6.25e-7);
    }

    #[test]
    fn ue_on_top_of_ris_is_rejected() {
        let mut l = Layout::preset(LayoutPreset::A);
        l.d_x = l.d_rb;
        l.d_y = 0.0;
        assert!(layout_gains(&l).is_err());
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("C".parse::<LayoutPreset>().unwrap().d_x(), 35.0);
        assert!("D".parse::<LayoutPreset>().is_err());
    }
}

//! Scene description and the objects derived from it.

use std::f64::consts::PI;

use lcr_core::analytic::{group_eigenvalues, GroupedSpectrum, GroupingPolicy, RisLcrParams};
use lcr_core::channel::{
    layout_gains, scaled_eigenvalues, spatial_correlation, steering_vector, ArrayGeometry, CorrelationMatrix, Layout,
    LayoutPreset, LinkGains, SteeringVector,
};
use lcr_core::montecarlo::{LinkSpec, SimScene};
use lcr_core::{db_to_linear, linear_to_db};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Planar array: `n_x` elements per row, `n_z` rows, spacing in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub n_x: usize,
    pub n_z: usize,
    pub spacing: f64,
}

impl ArrayConfig {
    pub fn new(n_x: usize, n_z: usize, spacing: f64) -> Self {
        ArrayConfig { n_x, n_z, spacing }
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn geometry(&self, field: &str) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_x, self.n_z, self.spacing).map_err(|e| CliError::usage(format!("{field}: {e}")))
    }
}

/// Which links carry signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Links {
    pub direct: bool,
    pub ris: bool,
}

/// Fully resolved scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub layout_preset: Option<LayoutPreset>,
    pub layout: Layout,
    pub bs: ArrayConfig,
    pub ris: ArrayConfig,
    /// `E_s/σ²` in dB.
    pub snr_scale_db: f64,
    pub doppler_d: f64,
    pub doppler_ur: f64,
    /// Elevation shared by the departure and arrival directions.
    pub theta: f64,
    /// Azimuth of departure at the RIS.
    pub phi_d: f64,
    /// Azimuth of arrival at the BS.
    pub phi_a: f64,
    pub links: Links,
}

impl SceneConfig {
    pub fn preset(layout: LayoutPreset, bs: ArrayConfig, ris: ArrayConfig) -> Self {
        SceneConfig {
            layout_preset: Some(layout),
            layout: Layout::preset(layout),
            bs,
            ris,
            snr_scale_db: 90.0,
            doppler_d: 1.0,
            doppler_ur: 1.0,
            theta: PI / 2.0,
            phi_d: 5.0 * PI / 4.0,
            phi_a: PI / 4.0,
            links: Links { direct: true, ris: true },
        }
    }

    pub fn with_layout(mut self, p: LayoutPreset) -> Self {
        self.layout_preset = Some(p);
        self.layout = Layout::preset(p);
        self
    }

    pub fn build(&self) -> Result<Scene> {
        let gains = layout_gains(&self.layout).map_err(|e| CliError::usage(format!("scene.layout: {e}")))?;
        for (name, f) in [("scene.doppler_d", self.doppler_d), ("scene.doppler_ur", self.doppler_ur)] {
            if !(f > 0.0 && f.is_finite()) {
                return Err(CliError::usage(format!("{name} must be positive, got {f}")));
            }
        }
        if !self.snr_scale_db.is_finite() {
            return Err(CliError::usage("scene.snr_scale_db must be finite"));
        }
        let bs = self.bs.geometry("scene.bs")?;
        let ris = self.ris.geometry("scene.ris")?;
        Ok(Scene {
            config: self.clone(),
            gains,
            r_d: spatial_correlation(&bs)?,
            r_ur: spatial_correlation(&ris)?,
            a_b: steering_vector(&bs, self.theta, self.phi_a)?,
            a_r: steering_vector(&ris, self.theta, self.phi_d)?,
            snr_scale: db_to_linear(self.snr_scale_db),
        })
    }
}

/// Link whose power is reduced when shadowing is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominantLink {
    Direct,
    Ris,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub config: SceneConfig,
    pub gains: LinkGains,
    pub r_d: CorrelationMatrix,
    pub r_ur: CorrelationMatrix,
    pub a_b: SteeringVector,
    pub a_r: SteeringVector,
    pub snr_scale: f64,
}

impl Scene {
    pub fn m(&self) -> usize {
        self.a_b.len()
    }

    pub fn n(&self) -> usize {
        self.a_r.len()
    }

    /// Eigenvalues of `(E_s/σ²) β_d R_d`.
    pub fn direct_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(scaled_eigenvalues(&self.r_d, self.gains.beta_d, self.snr_scale)?)
    }

    pub fn grouped(&self, policy: GroupingPolicy) -> Result<GroupedSpectrum> {
        Ok(group_eigenvalues(&self.direct_eigenvalues()?, policy)?)
    }

    pub fn ris_params(&self) -> Result<RisLcrParams> {
        let c = &self.config;
        Ok(RisLcrParams::new(&self.r_ur, self.gains.beta_ur, self.gains.beta_rb, self.m(), self.snr_scale, c.doppler_ur)?)
    }

    pub fn direct_mean_snr(&self) -> f64 {
        self.snr_scale * self.gains.beta_d * self.m() as f64
    }

    pub fn ris_mean_snr(&self) -> Result<f64> {
        Ok(self.ris_params()?.mean_snr())
    }

    /// Mean of the full-channel SNR. The cross term uses the Rayleigh mean
    /// of `|a_bᴴ h_d|` and independence of the two links.
    pub fn full_mean_snr(&self) -> Result<f64> {
        let p = self.ris_params()?;
        let ab = self.a_b.values();
        let r = self.r_d.entries();
        let mut quad = 0.0;
        for i in 0..ab.len() {
            for j in 0..ab.len() {
                quad += (ab[i].conj() * ab[j]).re * r[(i, j)];
            }
        }
        let proj_mean = (PI / 4.0 * self.gains.beta_d * quad).sqrt();
        let cross = 2.0 * self.gains.beta_rb.sqrt() * p.mean_y * proj_mean * self.snr_scale;
        Ok(self.direct_mean_snr() + cross + p.mean_snr())
    }

    /// The link with the larger mean SNR.
    pub fn dominant(&self) -> Result<DominantLink> {
        Ok(if self.direct_mean_snr() >= self.ris_mean_snr()? { DominantLink::Direct } else { DominantLink::Ris })
    }

    /// Copy with the given link's power multiplied by `factor`.
    pub fn shadowed(&self, link: DominantLink, factor: f64) -> Result<Scene> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(CliError::usage(format!("shadow_dominant must be in (0, 1], got {factor}")));
        }
        let mut out = self.clone();
        match link {
            DominantLink::Direct => out.gains.beta_d *= factor,
            DominantLink::Ris => out.gains.beta_ur *= factor,
        }
        Ok(out)
    }

    /// Simulation scene with only the requested links active.
    pub fn sim_scene(&self, direct: bool, ris: bool) -> SimScene {
        let c = &self.config;
        SimScene {
            direct: direct
                .then(|| LinkSpec { correlation: self.r_d.clone(), beta: self.gains.beta_d, doppler: c.doppler_d }),
            ris: ris.then(|| LinkSpec { correlation: self.r_ur.clone(), beta: self.gains.beta_ur, doppler: c.doppler_ur }),
            beta_rb: self.gains.beta_rb,
            a_b: self.a_b.clone(),
            a_r: self.a_r.clone(),
            snr_scale: self.snr_scale,
        }
    }

    pub fn summary(&self) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "beta_d_db": linear_to_db(self.gains.beta_d),
            "beta_ur_db": linear_to_db(self.gains.beta_ur),
            "beta_rb_db": linear_to_db(self.gains.beta_rb),
            "direct_mean_snr_db": linear_to_db(self.direct_mean_snr()),
            "ris_mean_snr_db": linear_to_db(self.ris_mean_snr()?),
        }))
    }
}

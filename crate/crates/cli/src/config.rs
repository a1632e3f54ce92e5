//! Experiment configuration: scenario presets, TOML files and flags.
//!
//! Precedence is preset < file < flags. Parameters that a scenario sweeps
//! (for example M in `fig3a`) are fixed by the scenario.

use std::path::{Path, PathBuf};

use lcr_core::analytic::GroupingPolicy;
use lcr_core::channel::{Layout, LayoutPreset};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::scene::{ArrayConfig, Links, SceneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Validate,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig3a => "fig3a",
            Scenario::Fig3b => "fig3b",
            Scenario::Fig4a => "fig4a",
            Scenario::Fig4b => "fig4b",
            Scenario::Fig5a => "fig5a",
            Scenario::Fig5b => "fig5b",
            Scenario::Validate => "validate",
            Scenario::Custom => "custom",
        }
    }

    /// Scene used before any file or flag overrides.
    pub fn preset_scene(self) -> SceneConfig {
        let bs32 = ArrayConfig::new(8, 4, 0.5);
        let ris128 = ArrayConfig::new(16, 8, 0.1);
        match self {
            Scenario::Fig3a | Scenario::Fig3b | Scenario::Fig5a | Scenario::Custom | Scenario::Validate => {
                SceneConfig::preset(LayoutPreset::A, bs32, ris128)
            }
            Scenario::Fig4a => SceneConfig::preset(LayoutPreset::B, bs32, ris128),
            Scenario::Fig4b => SceneConfig::preset(LayoutPreset::C, bs32, ris128),
            Scenario::Fig5b => SceneConfig::preset(LayoutPreset::C, bs32, ArrayConfig::new(8, 4, 0.5)),
        }
    }

    pub fn preset_shadow(self) -> f64 {
        match self {
            Scenario::Fig4a | Scenario::Fig4b => 0.5,
            _ => 1.0,
        }
    }
}

/// Threshold grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min_db: f64,
    pub max_db: f64,
    pub step_db: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_db.is_finite() && self.max_db.is_finite() && self.step_db.is_finite()) {
            return Err(CliError::usage("grid: bounds and step must be finite"));
        }
        if self.min_db > self.max_db {
            return Err(CliError::usage(format!(
                "grid.min_db ({}) must not exceed grid.max_db ({})",
                self.min_db, self.max_db
            )));
        }
        if !(self.step_db > 0.0) {
            return Err(CliError::usage(format!("grid.step_db must be positive, got {}", self.step_db)));
        }
        Ok(())
    }

    /// Ascending grid points; the last one lands on `max_db` within rounding.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max_db - self.min_db) / self.step_db + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min_db + i as f64 * self.step_db).collect()
    }
}

/// Monte Carlo settings for every simulated curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    /// Samples per Doppler cycle.
    pub sample_rate: f64,
    /// Total samples per simulated curve, split over the replicates.
    pub samples: usize,
    pub replicates: usize,
    pub n_sinusoids: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings { sample_rate: 64.0, samples: 1_000_000, replicates: 8, n_sinusoids: 64 }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(CliError::usage("mc.replicates must be at least 1"));
        }
        if self.samples / self.replicates < 10_000 {
            return Err(CliError::usage(format!(
                "mc.samples ({}) must give at least 10^4 samples to each of {} replicates",
                self.samples, self.replicates
            )));
        }
        if !(self.sample_rate >= 32.0) {
            return Err(CliError::usage(format!("mc.sample_rate must be at least 32, got {}", self.sample_rate)));
        }
        if self.n_sinusoids < 32 {
            return Err(CliError::usage(format!("mc.n_sinusoids must be at least 32, got {}", self.n_sinusoids)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub layout: Option<LayoutPreset>,
    pub geometry: Option<Layout>,
    pub bs: Option<ArrayConfig>,
    pub ris: Option<ArrayConfig>,
    pub snr_scale_db: Option<f64>,
    pub doppler_d: Option<f64>,
    pub doppler_ur: Option<f64>,
    pub theta: Option<f64>,
    pub phi_d: Option<f64>,
    pub phi_a: Option<f64>,
    pub links: Option<Links>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McFile {
    pub sample_rate: Option<f64>,
    pub samples: Option<usize>,
    pub replicates: Option<usize>,
    pub n_sinusoids: Option<usize>,
}

/// Contents of a TOML configuration file. Unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub shadow_dominant: Option<f64>,
    pub scene: Option<SceneFile>,
    pub grid: Option<GridSpec>,
    pub mc: Option<McFile>,
    pub grouping: Option<GroupingPolicy>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {}", e.to_string().trim_end())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub samples: Option<usize>,
    pub layout: Option<LayoutPreset>,
    pub out: Option<PathBuf>,
    pub shadow_dominant: Option<f64>,
}

/// Fully resolved run description; written to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub seed: u64,
    /// 0 means one thread per core. Does not affect outputs.
    pub threads: usize,
    pub out: PathBuf,
    pub shadow_dominant: f64,
    pub scene: SceneConfig,
    /// `None` selects a grid centred on the analytic curves.
    pub grid: Option<GridSpec>,
    pub mc: McSettings,
    pub grouping: GroupingPolicy,
}

impl ExperimentSpec {
    pub fn resolve(scenario: Scenario, file: Option<FileConfig>, flags: &Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        if let Some(s) = file.scenario {
            if s != scenario {
                return Err(CliError::usage(format!(
                    "scenario: config file names `{}` but `{}` was requested",
                    s.name(),
                    scenario.name()
                )));
            }
        }
        let mut scene = scenario.preset_scene();
        if let Some(sf) = file.scene {
            if let Some(p) = sf.layout {
                scene = scene.with_layout(p);
            }
            if let Some(g) = sf.geometry {
                scene.layout = g;
                scene.layout_preset = None;
            }
            scene.bs = sf.bs.unwrap_or(scene.bs);
            scene.ris = sf.ris.unwrap_or(scene.ris);
            scene.snr_scale_db = sf.snr_scale_db.unwrap_or(scene.snr_scale_db);
            scene.doppler_d = sf.doppler_d.unwrap_or(scene.doppler_d);
            scene.doppler_ur = sf.doppler_ur.unwrap_or(scene.doppler_ur);
            scene.theta = sf.theta.unwrap_or(scene.theta);
            scene.phi_d = sf.phi_d.unwrap_or(scene.phi_d);
            scene.phi_a = sf.phi_a.unwrap_or(scene.phi_a);
            scene.links = sf.links.unwrap_or(scene.links);
        }
        if let Some(p) = flags.layout {
            scene = scene.with_layout(p);
        }
        let mut mc = McSettings::default();
        if let Some(m) = file.mc {
            mc.sample_rate = m.sample_rate.unwrap_or(mc.sample_rate);
            mc.samples = m.samples.unwrap_or(mc.samples);
            mc.replicates = m.replicates.unwrap_or(mc.replicates);
            mc.n_sinusoids = m.n_sinusoids.unwrap_or(mc.n_sinusoids);
        }
        mc.samples = flags.samples.unwrap_or(mc.samples);
        let spec = ExperimentSpec {
            scenario,
            seed: flags.seed.or(file.seed).unwrap_or(1),
            threads: flags.threads.or(file.threads).unwrap_or(0),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            shadow_dominant: flags.shadow_dominant.or(file.shadow_dominant).unwrap_or(scenario.preset_shadow()),
            scene,
            grid: file.grid,
            mc,
            grouping: file.grouping.unwrap_or(match scenario {
                Scenario::Fig3a => GroupingPolicy::Fixed(2),
                _ => GroupingPolicy::default(),
            }),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        self.mc.validate()?;
        if !(self.shadow_dominant > 0.0 && self.shadow_dominant <= 1.0) {
            return Err(CliError::usage(format!("shadow_dominant must be in (0, 1], got {}", self.shadow_dominant)));
        }
        if let GroupingPolicy::Auto { floor, cap } = self.grouping {
            if !(floor > 0.0 && floor < 1.0) || cap == 0 {
                return Err(CliError::usage("grouping.auto needs 0 < floor < 1 and cap ≥ 1"));
            }
        }
        if !self.scene.links.direct && !self.scene.links.ris {
            return Err(CliError::usage("scene.links: at least one link must be enabled"));
        }
        self.scene.build().map(|_| ())
    }
}

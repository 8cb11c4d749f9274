//! Experiment configuration (TOML) and the run manifest.
//!
//! All physical defaults live in the `defaults` section at the bottom:
//! Q = 150, step 0.2, grid 64^2 / 32^3, delta_star = 1.

use crate::error::{Error, Result};
use crate::estimator::{ConstantsMode, FrequencySweep, Model};
use crate::grid::Grid;
use crate::randfield::{FieldSpec, SmoothBump};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LameConfig {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_upper")]
    pub upper: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_upper() -> f64 {
    150.0
}

fn default_step() -> f64 {
    0.2
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            upper: default_upper(),
            step: default_step(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InversionConfig {
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_true")]
    pub nonneg: bool,
    /// reconstruction grid resolution per axis
    #[serde(default = "default_inv_n")]
    pub grid_n: usize,
    #[serde(default = "default_constants")]
    pub constants_mode: ConstantsMode,
}

fn default_lambdas() -> Vec<f64> {
    (0..21).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64)).collect()
}

fn default_true() -> bool {
    true
}

fn default_inv_n() -> usize {
    32
}

fn default_constants() -> ConstantsMode {
    ConstantsMode::Empirical
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            lambdas: default_lambdas(),
            nonneg: true,
            grid_n: default_inv_n(),
            constants_mode: default_constants(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub order_m: f64,
    pub strength: Vec<SmoothBump>,
    /// synthesis grid: centered box
    pub grid_center: Vec<f64>,
    pub grid_side: f64,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub elastic: Option<LameConfig>,
    pub measurement_points: Vec<Vec<f64>>,
    #[serde(default = "default_delta_star")]
    pub delta_star: f64,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub inversion: InversionConfig,
    #[serde(default)]
    pub seed: Option<i64>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

fn default_delta_star() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Default grid resolution: 64 per axis in 2D, 32 in 3D.
    pub fn resolved_grid_n(&self) -> usize {
        self.grid_n.unwrap_or(if self.dim() == 2 { 64 } else { 32 })
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.grid_center.len() != d {
            return Err(Error::Config("grid_center dimension mismatch".into()));
        }
        if self.model.is_elastic() != self.elastic.is_some() {
            return Err(Error::Config(
                "elastic parameters must be given exactly for elastic models".into(),
            ));
        }
        for p in &self.measurement_points {
            if p.len() != d {
                return Err(Error::Config("measurement point dimension mismatch".into()));
            }
        }
        self.field_spec()?.validate()?;
        self.frequency_sweep()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::centered(
            self.dim(),
            &self.grid_center,
            self.grid_side,
            self.resolved_grid_n(),
        )
    }

    pub fn field_spec(&self) -> Result<FieldSpec> {
        Ok(FieldSpec {
            dim: self.dim(),
            order_m: self.order_m,
            strength: self.strength.clone(),
            grid: self.grid()?,
            components: if self.model.is_elastic() { self.dim() } else { 1 },
        })
    }

    /// The weight exponent is derived from the model, never user-set.
    pub fn frequency_sweep(&self) -> Result<FrequencySweep> {
        FrequencySweep::new(
            self.sweep.upper,
            self.sweep.step,
            self.model.weight_exponent(self.order_m),
        )
    }

    pub fn lame(&self) -> Option<(f64, f64)> {
        self.elastic.as_ref().map(|e| (e.lambda, e.mu))
    }

    /// Hash of the canonical serialization; keys the run directory.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn run_dir(&self) -> PathBuf {
        self.out_dir.join(self.hash())
    }
}

/// Written next to every run's outputs. Timings vary between runs; all
/// other outputs are byte-reproducible for a fixed config and seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub code_version: String,
    pub timings_seconds: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunManifest {
            config_hash: config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timings_seconds: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(self).expect("manifest serializes"),
        )?;
        Ok(())
    }
}

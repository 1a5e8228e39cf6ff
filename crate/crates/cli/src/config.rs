//! Pipeline configuration file.

use std::path::Path;

use cup_labels::LabelOptions;
use cup_learn::{SplitOptions, TrainConfig, TreeConfig, DEFAULT_THRESHOLDS};
use pneuma_sim::SimConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sim: SimConfig,
    pub labels: LabelOptions,
    pub train: TrainConfig,
    pub trees: TreeConfig,
    /// Share of trials in the train+val pool.
    pub split_ratio: f64,
    /// Share of the pool held out for validation.
    pub val_fraction: f64,
    pub thresholds: Vec<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let split = SplitOptions::default();
        Self {
            sim: SimConfig::default(),
            labels: LabelOptions::default(),
            train: TrainConfig::default(),
            trees: TreeConfig::default(),
            split_ratio: split.ratio,
            val_fraction: split.val_fraction,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(CliError::Config(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio)));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(CliError::Config(format!("val_fraction must lie in [0, 1), got {}", self.val_fraction)));
        }
        if self.thresholds.is_empty() {
            return Err(CliError::Config("thresholds must not be empty".into()));
        }
        if let Some(th) = self.thresholds.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(CliError::Config(format!("threshold {th} must lie in (0, 1)")));
        }
        Ok(())
    }

    pub fn split(&self, seed: u64) -> SplitOptions {
        SplitOptions { seed, ratio: self.split_ratio, val_fraction: self.val_fraction }
    }

    /// SHA-256 of the effective configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

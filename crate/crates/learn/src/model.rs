//! Trained models, aligned prediction and JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{horizon_steps, Normalization, Trial, Variant};
use crate::error::{LearnError, Result};
use crate::recurrent::RecurrentModel;
use crate::trees::TreeModel;

/// Model file format version.
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Recurrent(RecurrentModel),
    Trees(TreeModel),
}

/// Estimates aligned so `values[i]` is the contact at step `start + i + h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub start: usize,
    pub values: Vec<[f64; 4]>,
}

impl Prediction {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Model {
    pub fn variant(&self) -> Variant {
        match self {
            Model::Recurrent(m) => m.variant,
            Model::Trees(m) => m.variant,
        }
    }

    pub fn horizon_ms(&self) -> f64 {
        match self {
            Model::Recurrent(m) => m.horizon_ms,
            Model::Trees(m) => m.horizon_ms,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Recurrent(_) => "recurrent",
            Model::Trees(_) => "trees",
        }
    }

    /// Predict from normalized full-width trial inputs.
    pub fn predict(&self, trial: &Trial) -> Result<Prediction> {
        self.predict_batch(&[trial]).map(|mut v| v.remove(0))
    }

    pub fn predict_batch(&self, trials: &[&Trial]) -> Result<Vec<Prediction>> {
        match self {
            Model::Recurrent(m) => {
                let xs: Vec<_> = trials.iter().map(|t| t.variant_inputs(m.variant)).collect();
                let refs: Vec<_> = xs.iter().collect();
                Ok(m.predict_many(&refs)?.into_iter().map(|values| Prediction { start: 0, values }).collect())
            }
            Model::Trees(m) => trials
                .iter()
                .map(|t| Ok(Prediction { start: m.window - 1, values: m.predict_trial(t)? }))
                .collect(),
        }
    }

    /// Truth aligned with a prediction of this model.
    pub fn aligned_truth(&self, trial: &Trial, pred: &Prediction) -> Result<Vec<[f64; 4]>> {
        let y = trial.shifted_targets(horizon_steps(self.horizon_ms())?);
        Ok((pred.start..pred.start + pred.values.len()).map(|t| std::array::from_fn(|k| y[[t, k]])).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub normalization: Normalization,
    pub model: Model,
}

impl ModelFile {
    pub fn new(model: Model, normalization: Normalization) -> Self {
        Self { version: MODEL_VERSION, normalization, model }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f: Self = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        if f.version != MODEL_VERSION {
            return Err(LearnError::Version(f.version));
        }
        Ok(f)
    }
}

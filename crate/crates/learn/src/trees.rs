//! Sliding-window boosted-tree baseline.

use ndarray::Array2;
use pneuma_sim::Execution;
use serde::{Deserialize, Serialize};

use crate::data::{horizon_steps, SeqDataset, Trial, Variant, OUTPUT_WIDTH};
use crate::error::{LearnError, Result};
use crate::gbdt::{fit_boosted, Ensemble, TreeConfig};

/// Window length in samples (60 ms).
pub const WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub variant: Variant,
    pub horizon_ms: f64,
    pub window: usize,
    pub config: TreeConfig,
    /// One ensemble per contact channel.
    pub channels: Vec<Ensemble>,
}

/// Flattened window ending at row `t` (oldest sample first).
fn window_at(x: &Array2<f64>, t: usize, window: usize, out: &mut Vec<f64>) {
    for s in t + 1 - window..=t {
        out.extend(x.row(s).iter());
    }
}

pub fn train_trees(ds: &SeqDataset, variant: Variant, h_ms: f64, cfg: &TreeConfig, exec: Execution) -> Result<TreeModel> {
    let steps = horizon_steps(h_ms)?;
    let pool = ds.pool();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for trial in ds.subset(&pool) {
        let xi = trial.variant_inputs(variant);
        let yi = trial.shifted_targets(steps);
        for t in WINDOW.saturating_sub(1)..trial.len() {
            window_at(&xi, t, WINDOW, &mut x);
            y.extend(yi.row(t).iter());
        }
    }
    if y.is_empty() {
        return Err(LearnError::WindowTooLong { window: WINDOW });
    }
    let channels = fit_boosted(&x, WINDOW * variant.width(), &y, OUTPUT_WIDTH, cfg, exec)?;
    Ok(TreeModel { variant, horizon_ms: h_ms, window: WINDOW, config: cfg.clone(), channels })
}

impl TreeModel {
    /// Estimates for rows `window − 1 ..`; empty when the trial is shorter
    /// than the window.
    pub fn predict(&self, inputs: &Array2<f64>) -> Result<Vec<[f64; 4]>> {
        let w = self.variant.width();
        if inputs.ncols() != w {
            return Err(LearnError::WidthMismatch { want: w, got: inputs.ncols() });
        }
        let mut buf = Vec::with_capacity(self.window * w);
        Ok((self.window.saturating_sub(1)..inputs.nrows())
            .map(|t| {
                buf.clear();
                window_at(inputs, t, self.window, &mut buf);
                std::array::from_fn(|k| self.channels[k].predict(&buf))
            })
            .collect())
    }

    pub fn predict_trial(&self, trial: &Trial) -> Result<Vec<[f64; 4]>> {
        self.predict(&trial.variant_inputs(self.variant))
    }

    pub fn max_depth(&self) -> usize {
        self.channels.iter().flat_map(|e| e.trees.iter()).map(|t| t.depth()).max().unwrap_or(0)
    }
}

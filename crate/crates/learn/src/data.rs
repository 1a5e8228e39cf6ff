//! Trial datasets, feature normalization and the train/val/test split.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};

/// Input width: four vacuum channels then six wrench channels.
pub const INPUT_WIDTH: usize = 10;
pub const OUTPUT_WIDTH: usize = 4;
/// Sample period of the shared timeline (ms).
pub const SAMPLE_MS: f64 = 6.0;
/// Share of trials kept for training and validation.
pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;
/// Share of the training pool held out for epoch selection.
pub const DEFAULT_VAL_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Ft,
    Vac,
    FtVac,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Ft, Variant::Vac, Variant::FtVac];

    /// Columns of the 10-wide input this variant sees.
    pub fn columns(self) -> &'static [usize] {
        match self {
            Variant::Vac => &[0, 1, 2, 3],
            Variant::Ft => &[4, 5, 6, 7, 8, 9],
            Variant::FtVac => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }

    pub fn width(self) -> usize {
        self.columns().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ft => "ft",
            Variant::Vac => "vac",
            Variant::FtVac => "ft-vac",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = LearnError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '+'], "-").as_str() {
            "ft" => Ok(Variant::Ft),
            "vac" => Ok(Variant::Vac),
            "ft-vac" | "vac-ft" | "all" => Ok(Variant::FtVac),
            other => Err(LearnError::Config(format!("unknown variant {other:?}; expected ft, vac or ft-vac"))),
        }
    }
}

/// Raw, aligned sensor series and labels of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub id: usize,
    pub t: Vec<f64>,
    pub p_vac: Vec<[f64; 4]>,
    pub ft: Vec<[f64; 6]>,
    pub labels: Vec<[f64; 4]>,
}

impl TrialRecord {
    /// Trace channels with labels taken from the simulated contact state.
    pub fn from_trace(id: usize, trace: &pneuma_sim::Trace) -> Self {
        Self { id, t: trace.t.clone(), p_vac: trace.p_vac.clone(), ft: trace.ft.clone(), labels: trace.contact.clone() }
    }

    pub fn with_labels(id: usize, trace: &pneuma_sim::Trace, labels: Vec<[f64; 4]>) -> Self {
        Self { labels, ..Self::from_trace(id, trace) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalization {
    /// Population statistics over the rows of `x`.
    pub fn fit<'a>(rows: impl Iterator<Item = &'a Array2<f64>>) -> Self {
        let mut sum = vec![0.0; INPUT_WIDTH];
        let mut sq = vec![0.0; INPUT_WIDTH];
        let mut n = 0usize;
        let all: Vec<&Array2<f64>> = rows.collect();
        for x in &all {
            for r in x.rows() {
                for (j, v) in r.iter().enumerate() {
                    sum[j] += v;
                }
                n += 1;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n.max(1) as f64).collect();
        for x in &all {
            for r in x.rows() {
                for (j, v) in r.iter().enumerate() {
                    sq[j] += (v - mean[j]).powi(2);
                }
            }
        }
        let std = sq.iter().map(|s| (s / n.max(1) as f64).sqrt()).map(|s| if s > 1e-12 { s } else { 1.0 }).collect();
        Self { mean, std }
    }

    pub fn identity() -> Self {
        Self { mean: vec![0.0; INPUT_WIDTH], std: vec![1.0; INPUT_WIDTH] }
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = x.clone();
        for mut r in y.rows_mut() {
            for (j, v) in r.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.std[j];
            }
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub id: usize,
    /// Normalized inputs, `t × 10`.
    pub inputs: Array2<f64>,
    /// Contact labels, `t × 4`.
    pub targets: Array2<f64>,
}

impl Trial {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inputs restricted to a variant's columns.
    pub fn variant_inputs(&self, v: Variant) -> Array2<f64> {
        self.inputs.select(Axis(1), v.columns())
    }

    /// Targets shifted so row `t` holds the label at `t + steps`. Past the
    /// end of the recording the last label persists.
    pub fn shifted_targets(&self, steps: usize) -> Array2<f64> {
        let n = self.len();
        let idx: Vec<usize> = (0..n).map(|i| (i + steps).min(n - 1)).collect();
        self.targets.select(Axis(0), &idx)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqDataset {
    pub trials: Vec<Trial>,
    pub normalization: Normalization,
    pub split: Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub seed: u64,
    /// Share of trials in the train+val pool.
    pub ratio: f64,
    /// Share of the pool used for validation.
    pub val_fraction: f64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { seed: 0, ratio: DEFAULT_TRAIN_RATIO, val_fraction: DEFAULT_VAL_FRACTION }
    }
}

fn raw_inputs(r: &TrialRecord) -> Array2<f64> {
    Array2::from_shape_fn((r.t.len(), INPUT_WIDTH), |(i, j)| if j < 4 { r.p_vac[i][j] } else { r.ft[i][j - 4] })
}

/// Horizon (ms) to whole samples.
pub fn horizon_steps(h_ms: f64) -> Result<usize> {
    let s = h_ms / SAMPLE_MS;
    if !(s >= 0.0) || (s - s.round()).abs() > 1e-9 {
        return Err(LearnError::BadHorizon(h_ms));
    }
    Ok(s.round() as usize)
}

/// Split, normalize on the train+val pool, and package.
pub fn build_dataset(records: &[TrialRecord], opts: SplitOptions) -> Result<SeqDataset> {
    for r in records {
        let want = r.t.len();
        for (what, got) in [("p_vac", r.p_vac.len()), ("ft", r.ft.len()), ("labels", r.labels.len())] {
            if got != want {
                return Err(LearnError::LengthMismatch { trial: r.id, what, got, want });
            }
        }
        if want == 0 {
            return Err(LearnError::LengthMismatch { trial: r.id, what: "t", got: 0, want: 1 });
        }
    }
    let n = records.len();
    let n_pool = (n as f64 * opts.ratio).round() as usize;
    if n_pool == 0 {
        return Err(LearnError::EmptySplit("train"));
    }
    if n_pool >= n {
        return Err(LearnError::EmptySplit("test"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
    let (pool, test) = order.split_at(n_pool);
    let n_val = ((n_pool as f64 * opts.val_fraction).round() as usize).min(n_pool - 1);
    let (val, train) = pool.split_at(n_val);
    let mut split = Split { train: train.to_vec(), val: val.to_vec(), test: test.to_vec() };
    split.train.sort_unstable();
    split.val.sort_unstable();
    split.test.sort_unstable();

    let raw: Vec<Array2<f64>> = records.iter().map(raw_inputs).collect();
    let normalization = Normalization::fit(pool.iter().map(|&i| &raw[i]));
    let trials = records
        .iter()
        .zip(&raw)
        .map(|(r, x)| Trial {
            id: r.id,
            inputs: normalization.apply(x),
            targets: Array2::from_shape_fn((r.labels.len(), OUTPUT_WIDTH), |(i, k)| r.labels[i][k]),
        })
        .collect();
    Ok(SeqDataset { trials, normalization, split })
}

impl SeqDataset {
    pub fn subset(&self, idx: &[usize]) -> Vec<&Trial> {
        idx.iter().map(|&i| &self.trials[i]).collect()
    }

    /// Train and validation trials together.
    pub fn pool(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.split.train.iter().chain(&self.split.val).copied().collect();
        p.sort_unstable();
        p
    }
}

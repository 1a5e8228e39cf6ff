//! Seal-failure forecasting from suction-cup sensor history.
//!
//! Inputs are the four chamber vacuums and the six-axis wrench on the
//! pressure timeline; targets are the four quadrant contact states `h` ms
//! ahead. Two model families are provided, a stacked LSTM trained by
//! backpropagation through time and a sliding-window boosted-tree
//! baseline, together with the forecast metrics used to compare them.

pub mod data;
pub mod error;
pub mod eval;
pub mod gbdt;
pub mod lstm;
pub mod metrics;
pub mod model;
pub mod recurrent;
pub mod trees;

pub use data::{build_dataset, horizon_steps, Normalization, SeqDataset, SplitOptions, Trial, TrialRecord, Variant};
pub use error::{LearnError, Result};
pub use eval::{ablate_horizon, evaluate, parse_range, Ablation, EvalReport};
pub use gbdt::TreeConfig;
pub use metrics::{first_break, metric_bqa, metric_mbte, metric_mse, Bqa, Mbte, DEFAULT_THRESHOLDS};
pub use model::{Model, ModelFile, Prediction, MODEL_VERSION};
pub use recurrent::{train_recurrent, RecurrentModel, TrainConfig, TrainReport};
pub use trees::{train_trees, TreeModel, WINDOW};

use thiserror::Error;

pub type Result<T, E = LearnError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("trial {trial}: {what} has {got} samples, expected {want}")]
    LengthMismatch { trial: usize, what: &'static str, got: usize, want: usize },
    #[error("empty {0} split")]
    EmptySplit(&'static str),
    #[error("horizon {0} ms is not a non-negative multiple of 6 ms")]
    BadHorizon(f64),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },
    #[error("input width {got} does not match the model's {want}")]
    WidthMismatch { want: usize, got: usize },
    #[error("window of {window} samples exceeds every training trial")]
    WindowTooLong { window: usize },
    #[error("threshold {0} must lie in (0, 1)")]
    Threshold(f64),
    #[error("prediction and truth do not overlap")]
    EmptyOverlap,
    #[error("h = {h} ms: {source}")]
    Horizon { h: f64, source: Box<LearnError> },
    #[error("unsupported model file version {0}")]
    Version(u32),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

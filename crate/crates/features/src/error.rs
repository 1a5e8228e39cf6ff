use thiserror::Error;

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty window")]
    EmptyWindow,
    #[error("window of {len} samples is shorter than the minimum {min}")]
    WindowTooShort { len: usize, min: usize },
    #[error("target frequency {f_target} Hz must lie in (0, {rate}/2)")]
    BadFrequency { f_target: f64, rate: f64 },
    #[error("hop must be at least 1")]
    BadHop,
    #[error("full-vacuum trace has no PWM carrier to measure")]
    NoCarrier,
    #[error("palpation sweep is missing angle {0}°")]
    MissingAngle(f64),
    #[error("trace too short: {0}")]
    ShortTrace(String),
}

use thiserror::Error;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid cup configuration: {0}")]
    Config(String),
    #[error("network is disconnected: {0}")]
    Disconnected(String),
    #[error("integrator unstable at t = {time:.4} s: node {node} moved {delta:.1} Pa in one step")]
    Unstable { time: f64, node: usize, delta: f64 },
    #[error("steady state not reached after {time:.1} s (max |dP/dt| = {residual:.3e} Pa/s)")]
    NotConverged { time: f64, residual: f64 },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("unknown grit {0}; expected one of 120, 180, 240, 320, 400, 600")]
    UnknownGrit(u32),
    #[error("frame centre ({x:.1}, {y:.1}) lies outside the {width}x{height} raster")]
    CenterOutside { x: f64, y: f64, width: usize, height: usize },
    #[error("malformed {what}: {detail}")]
    Parse { what: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use cup_features::FeatureError;
use cup_labels::LabelError;
use cup_learn::LearnError;
use pneuma_sim::SimError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Exit status for configuration, schema and input problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a computation diverges or fails to converge.
pub const EXIT_NUMERIC: i32 = 3;

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        let numeric = match self {
            CliError::Sim(e) => matches!(e, SimError::Unstable { .. } | SimError::NotConverged { .. }),
            CliError::Label(e) => matches!(e, LabelError::NoRing(_) | LabelError::CenterOutside { .. }),
            CliError::Learn(e) => learn_numeric(e),
            _ => false,
        };
        if numeric {
            EXIT_NUMERIC
        } else {
            EXIT_CONFIG
        }
    }
}

fn learn_numeric(e: &LearnError) -> bool {
    match e {
        LearnError::NonFinite { .. } => true,
        LearnError::Horizon { source, .. } => learn_numeric(source),
        _ => false,
    }
}

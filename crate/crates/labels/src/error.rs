use thiserror::Error;

pub type Result<T, E = LabelError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("empty frame sequence")]
    EmptySequence,
    #[error("no seal ring in the first frame (peak intensity {0:.3})")]
    NoRing(f64),
    #[error("centre ({x:.1}, {y:.1}) lies outside the {width}x{height} raster")]
    CenterOutside { x: f64, y: f64, width: usize, height: usize },
    #[error("radial band of quadrant {quadrant} lies entirely outside the raster")]
    BandOutside { quadrant: usize },
    #[error("frame {index} is {got:?}, sequence is {want:?}")]
    SizeMismatch { index: usize, got: (usize, usize), want: (usize, usize) },
    #[error("orientation series does not cover t = {0:.3} s")]
    OrientationCoverage(f64),
    #[error("orientation gap of {gap:.3} s at t = {at:.3} s exceeds 0.5 s")]
    OrientationGap { at: f64, gap: f64 },
    #[error("threshold {0} must lie in (0, 1)")]
    Threshold(f64),
    #[error("empty batch")]
    EmptyBatch,
    #[error("malformed {what}: {detail}")]
    Parse { what: String, detail: String },
    #[error(transparent)]
    Sim(#[from] pneuma_sim::SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub mod ablate;
pub mod calibrate;
pub mod evaluate;
pub mod featurize;
pub mod label;
pub mod plot;
pub mod simulate;
pub mod train;

use cup_learn::Variant;

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

/// Horizon in file names: `30` rather than `30.0`.
pub fn h_tag(h: f64) -> String {
    format!("{h}")
}

//! Contact surfaces encoded as lip-leak conductances.
//!
//! Each conductance is the leak of one quadrant whose whole lip arc rests on
//! that surface. Partial coverage is handled by discretising the lip into
//! points and averaging.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::{diagonal, CHAMBERS};

/// Sandpaper grades available for texture scenarios.
pub const GRITS: [u32; 6] = [120, 180, 240, 320, 400, 600];

/// Lip radius of the cup (mm).
pub const LIP_RADIUS_MM: f64 = 10.0;
/// Radial width of the sealing lip (mm); partial coverage blends over it.
pub const LIP_WIDTH_MM: f64 = 2.0;
/// Lip sample points per quadrant.
pub const POINTS_PER_QUADRANT: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceCatalog {
    /// Per-quadrant leak on 600-grit sandpaper.
    pub grit_600: f64,
    /// Per-quadrant leak on 120-grit sandpaper.
    pub grit_120: f64,
    /// Smooth acrylic.
    pub smooth: f64,
    /// Wavy acrylic.
    pub wavy: f64,
    /// Ribbed acrylic.
    pub ribbed: f64,
    /// Lip hanging in free air.
    pub open: f64,
    /// Seal quality of the wavy texture in [0, 1] (1 = seals like smooth).
    pub wavy_seal: f64,
    /// Seal quality of the ribbed texture in [0, 1].
    pub ribbed_seal: f64,
    /// Single leak orifice used for the vertical/horizontal leak cases.
    pub orifice: f64,
    /// Share of a horizontal (under-lip) leak that reaches the diagonal chamber.
    pub horizontal_fraction: f64,
    /// Exponent shaping how fast leaks turn horizontal as the lip seals.
    pub seal_exponent: f64,
}

impl Default for SurfaceCatalog {
    fn default() -> Self {
        let cal = crate::calibrate::DEFAULT_CALIBRATION;
        Self {
            grit_600: cal.grit_600,
            grit_120: cal.grit_600 * crate::calibrate::GRIT_120_TO_600,
            smooth: cal.grit_600 * 0.25,
            wavy: cal.grit_600 * 1.6,
            ribbed: cal.grit_600 * 40.0,
            open: crate::calibrate::TUBE_G * 20.0,
            wavy_seal: 1.0,
            ribbed_seal: 0.35,
            orifice: crate::calibrate::ORIFICE_G,
            horizontal_fraction: 0.95,
            seal_exponent: 5.0,
        }
    }
}

impl SurfaceCatalog {
    /// Leak for a sandpaper grade: log-linear in log(grit) between the 120
    /// and 600 grit endpoints.
    pub fn grit_conductance(&self, grit: u32) -> Result<f64> {
        if !GRITS.contains(&grit) {
            return Err(SimError::UnknownGrit(grit));
        }
        let x = ((grit as f64).ln() - 120f64.ln()) / (600f64.ln() - 120f64.ln());
        Ok((self.grit_120.ln() * (1.0 - x) + self.grit_600.ln() * x).exp())
    }

    /// Horizontal share of every leak given the mean seal level of the lip.
    pub fn horizontal_share(&self, seal_level: f64) -> f64 {
        self.horizontal_fraction * seal_level.clamp(0.0, 1.0).powf(self.seal_exponent)
    }
}

/// Effective chamber leaks when `vertical[k]` enters chamber `k` directly
/// and `horizontal[k]` (leaking under the lip of quadrant `k`) sweeps across
/// the floor into the diagonal chamber.
pub fn route(vertical: &[f64; CHAMBERS], horizontal: &[f64; CHAMBERS]) -> [f64; CHAMBERS] {
    std::array::from_fn(|k| vertical[k] + horizontal[diagonal(k)])
}

/// Split per-quadrant leaks by a horizontal share and route them.
pub fn route_share(leaks: &[f64; CHAMBERS], share: &[f64; CHAMBERS]) -> [f64; CHAMBERS] {
    let v = std::array::from_fn(|k| leaks[k] * (1.0 - share[k]));
    let h = std::array::from_fn(|k| leaks[k] * share[k]);
    route(&v, &h)
}

/// Azimuth (rad) of lip point `j` of quadrant `k` in the cup frame.
pub fn lip_point_azimuth(k: usize, j: usize) -> f64 {
    let width = std::f64::consts::FRAC_PI_2;
    crate::chamber_azimuth(k) - 0.5 * width + (j as f64 + 0.5) / POINTS_PER_QUADRANT as f64 * width
}

/// Smooth 0→1 ramp over `[-w/2, w/2]`.
pub fn smoothstep(x: f64, width: f64) -> f64 {
    let u = (x / width + 0.5).clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grit_map_endpoints_and_monotone() {
        let c = SurfaceCatalog::default();
        assert!((c.grit_conductance(600).unwrap() - c.grit_600).abs() < 1e-18);
        assert!((c.grit_conductance(120).unwrap() - c.grit_120).abs() / c.grit_120 < 1e-12);
        let g: Vec<f64> = GRITS.iter().map(|&x| c.grit_conductance(x).unwrap()).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn unknown_grit_rejected() {
        assert!(matches!(SurfaceCatalog::default().grit_conductance(800), Err(SimError::UnknownGrit(800))));
    }

    #[test]
    fn routing_conserves_total() {
        let leaks = [1.0, 2.0, 3.0, 4.0];
        let routed = route_share(&leaks, &[0.5, 0.0, 1.0, 0.25]);
        assert!((routed.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        assert_eq!(routed[2], 3.0 * 0.0 + 0.5 * 1.0);
    }

    #[test]
    fn lip_points_cover_quadrant() {
        let a0 = lip_point_azimuth(1, 0).to_degrees();
        let a1 = lip_point_azimuth(1, POINTS_PER_QUADRANT - 1).to_degrees();
        assert!(a0 > 45.0 && a0 < 48.0);
        assert!(a1 < 135.0 && a1 > 132.0);
    }
}

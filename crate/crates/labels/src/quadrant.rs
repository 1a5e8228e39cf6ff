//! Quadrant segmentation and min-of-peaks contact labels.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{LabelError, Result};
use crate::image::Intensity;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandGeometry {
    /// Nominal ring radius (px).
    pub ring_radius: f64,
    /// Radial band width (px).
    pub dr: f64,
    /// Band centres sweep `[r_min, r_max] × ring_radius`.
    pub r_min: f64,
    pub r_max: f64,
    /// Step between band centres (px).
    pub r_step: f64,
    pub subsectors: usize,
    /// Azimuth samples per subsector.
    pub azimuth_samples: usize,
    /// Radial sample spacing inside a band (px).
    pub radial_step: f64,
}

impl Default for BandGeometry {
    fn default() -> Self {
        Self {
            ring_radius: 48.0,
            dr: 16.0,
            r_min: 0.6,
            r_max: 1.2,
            r_step: 2.0,
            subsectors: 9,
            azimuth_samples: 5,
            radial_step: 1.0,
        }
    }
}

impl BandGeometry {
    fn band_centres(&self) -> Vec<f64> {
        let lo = self.r_min * self.ring_radius;
        let hi = self.r_max * self.ring_radius;
        let n = ((hi - lo) / self.r_step + 1e-9).floor() as usize;
        (0..=n).map(|i| lo + i as f64 * self.r_step).collect()
    }

    fn band_offsets(&self) -> Vec<f64> {
        let half = 0.5 * self.dr;
        let n = (self.dr / self.radial_step + 1e-9).floor() as usize;
        (0..=n).map(|i| -half + i as f64 * self.radial_step).collect()
    }
}

/// Contact label of each quadrant. Quadrant `k` is centred at azimuth
/// `orientation + k·90°` about `center`.
pub fn quadrant_contact_label(img: &Intensity, center: (f64, f64), orientation: f64, geom: &BandGeometry) -> Result<[f64; 4]> {
    let (cx, cy) = center;
    if !img.contains(cx, cy) {
        return Err(LabelError::CenterOutside { x: cx, y: cy, width: img.width, height: img.height });
    }
    let radii = geom.band_centres();
    let offsets = geom.band_offsets();
    let sub_width = FRAC_PI_2 / geom.subsectors as f64;
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let start = orientation + k as f64 * FRAC_PI_2 - FRAC_PI_4;
        let mut weakest = f64::INFINITY;
        for s in 0..geom.subsectors {
            let dirs: Vec<(f64, f64)> = (0..geom.azimuth_samples)
                .map(|j| {
                    let a = start + (s as f64 + (j as f64 + 0.5) / geom.azimuth_samples as f64) * sub_width;
                    (a.cos(), a.sin())
                })
                .collect();
            let mut peak = f64::NEG_INFINITY;
            for &r in &radii {
                let (mut sum, mut n) = (0.0, 0usize);
                for &d in &offsets {
                    let rr = r + d;
                    for &(c, sn) in &dirs {
                        if let Some(v) = img.sample(cx + rr * c, cy + rr * sn) {
                            sum += v;
                            n += 1;
                        }
                    }
                }
                if n > 0 {
                    peak = peak.max(sum / n as f64);
                }
            }
            if peak.is_finite() {
                weakest = weakest.min(peak);
            }
        }
        if !weakest.is_finite() {
            return Err(LabelError::BandOutside { quadrant: k });
        }
        *o = weakest.clamp(0.0, 1.0);
    }
    Ok(out)
}

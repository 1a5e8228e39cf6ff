//! MPRLS-style pressure transducer model.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Lowest and highest vacuum a sample may report (Pa).
pub const P_VAC_RANGE: (f64, f64) = (-500.0, 86_000.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    /// Pa per count.
    pub resolution: f64,
    /// Gaussian noise standard deviation (Pa).
    pub noise_rms: f64,
    /// Nominal sample rate (Hz).
    pub rate: f64,
    pub noise_enabled: bool,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self { resolution: 0.01, noise_rms: 5.0, rate: crate::SAMPLE_RATE, noise_enabled: true }
    }
}

impl SensorModel {
    pub fn noiseless() -> Self {
        Self { noise_enabled: false, ..Self::default() }
    }

    /// Snap a reading to the count grid.
    pub fn quantize(&self, p_vac: f64) -> f64 {
        let per_pa = (1.0 / self.resolution).round();
        if (per_pa * self.resolution - 1.0).abs() < 1e-12 {
            (p_vac * per_pa).round() / per_pa
        } else {
            (p_vac / self.resolution).round() * self.resolution
        }
    }

    /// One vacuum reading of the true vacuum `p_vac` (Pa).
    pub fn sample<R: Rng + ?Sized>(&self, p_vac: f64, rng: &mut R) -> f64 {
        let noisy = if self.noise_enabled && self.noise_rms > 0.0 {
            let n = Normal::new(0.0, self.noise_rms).expect("finite sigma");
            p_vac + n.sample(rng)
        } else {
            p_vac
        };
        self.quantize(noisy.clamp(P_VAC_RANGE.0, P_VAC_RANGE.1))
    }
}

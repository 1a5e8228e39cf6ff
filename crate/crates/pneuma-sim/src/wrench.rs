//! Synthetic wrist force/torque for detachment trials.
//!
//! The wrench is the suction force `mean(P_vac) × A` at the cup centre, the
//! per-quadrant share of that force acting at the lip (which produces a
//! torque once the seal is uneven), the preload, and a linear spring-damper
//! reaction to the commanded twist. Everything except the suction term is
//! scaled by the mean contact so the reaction fades as the seal lets go.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::surface::LIP_RADIUS_MM;
use crate::{chamber_azimuth, CHAMBERS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WrenchModel {
    /// Effective suction area (m²).
    pub suction_area: f64,
    /// Lateral / axial translational stiffness (N/m).
    pub k_lateral: f64,
    pub k_axial: f64,
    /// Translational damping (N·s/m).
    pub c_lateral: f64,
    pub c_axial: f64,
    /// Rotational stiffness (N·m/rad) and damping (N·m·s/rad).
    pub k_rot: f64,
    pub c_rot: f64,
    /// Per-sample noise (N, N·m).
    pub force_noise: f64,
    pub torque_noise: f64,
    /// Standard deviation of the untared per-trial offset (N, N·m).
    pub force_bias: f64,
    pub torque_bias: f64,
}

impl Default for WrenchModel {
    fn default() -> Self {
        let r = LIP_RADIUS_MM * 1e-3;
        Self {
            suction_area: std::f64::consts::PI * r * r,
            k_lateral: 800.0,
            k_axial: 1500.0,
            c_lateral: 20.0,
            c_axial: 30.0,
            k_rot: 0.6,
            c_rot: 0.05,
            force_noise: 0.05,
            torque_noise: 0.002,
            force_bias: 0.3,
            torque_bias: 0.015,
        }
    }
}

/// Commanded motion at one instant, SI units.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TwistState {
    /// Translation from the start pose (m).
    pub displacement: [f64; 3],
    /// Linear velocity (m/s).
    pub velocity: [f64; 3],
    /// Rotation vector (axis × angle, rad).
    pub rotation: [f64; 3],
    /// Angular velocity (rad/s).
    pub angular_velocity: [f64; 3],
}

impl WrenchModel {
    /// Noise-free wrench `[fx, fy, fz, tx, ty, tz]`.
    pub fn wrench(&self, twist: &TwistState, contact: &[f64; CHAMBERS], mean_vac: f64, preload: f64) -> [f64; 6] {
        let attach = contact.iter().sum::<f64>() / CHAMBERS as f64;
        let suction = mean_vac.max(0.0) * self.suction_area;
        let d = twist.displacement;
        let v = twist.velocity;
        let fx = attach * (self.k_lateral * d[0] + self.c_lateral * v[0]);
        let fy = attach * (self.k_lateral * d[1] + self.c_lateral * v[1]);
        let fz = suction + attach * (preload + self.k_axial * d[2] + self.c_axial * v[2]);

        let r = LIP_RADIUS_MM * 1e-3;
        let mut tx = 0.0;
        let mut ty = 0.0;
        for (k, c) in contact.iter().enumerate() {
            let a = chamber_azimuth(k);
            let f = suction / CHAMBERS as f64 * c;
            tx += -r * a.sin() * f;
            ty += r * a.cos() * f;
        }
        let rot = twist.rotation;
        let w = twist.angular_velocity;
        tx += attach * (self.k_rot * rot[0] + self.c_rot * w[0]);
        ty += attach * (self.k_rot * rot[1] + self.c_rot * w[1]);
        let tz = attach * (self.k_rot * rot[2] + self.c_rot * w[2]);
        [fx, fy, fz, tx, ty, tz]
    }

    /// Draw a per-trial sensor offset.
    pub fn sample_bias<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 6] {
        let f = Normal::new(0.0, self.force_bias.max(0.0)).expect("finite sigma");
        let t = Normal::new(0.0, self.torque_bias.max(0.0)).expect("finite sigma");
        [f.sample(rng), f.sample(rng), f.sample(rng), t.sample(rng), t.sample(rng), t.sample(rng)]
    }

    /// Add bias and per-sample noise to a clean wrench.
    pub fn measure<R: Rng + ?Sized>(&self, clean: &[f64; 6], bias: &[f64; 6], noise: bool, rng: &mut R) -> [f64; 6] {
        let f = Normal::new(0.0, self.force_noise.max(0.0)).expect("finite sigma");
        let t = Normal::new(0.0, self.torque_noise.max(0.0)).expect("finite sigma");
        std::array::from_fn(|i| {
            let n = if !noise {
                0.0
            } else if i < 3 {
                f.sample(rng)
            } else {
                t.sample(rng)
            };
            clean[i] + bias[i] + n
        })
    }
}

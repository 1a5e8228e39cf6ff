//! Twist-driven detachment: lip peel kinematics and batch sampling.
//!
//! After a short hold the wrist rotates about the axis
//! `(cos φ cos θ, cos φ sin θ, sin φ)` and translates with a constant
//! velocity. Each lip point lifts by the rotation, a compliant share of the
//! axial pull and a shear term along the lateral velocity. A point opens
//! once its lift exceeds the lip compliance; a quadrant's gap is its largest
//! open point. When the mean contact falls below `pop_contact` the rest of
//! the seal lets go at `pop_speed_mm_s`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calibrate::TUBE_G;
use crate::error::{Result, SimError};
use crate::exec::Execution;
use crate::rng::{rng_for, stream};
use crate::scenario::{run_scenario, trial_seed, Boundary, Scenario};
use crate::surface::{lip_point_azimuth, route_share, LIP_RADIUS_MM, POINTS_PER_QUADRANT};
use crate::trace::Trace;
use crate::wrench::TwistState;
use crate::{SimConfig, CHAMBERS};

/// Standard gravity (m/s²).
const G0: f64 = 9.806_65;

/// Twist axis grid (degrees).
pub const PHI_STEP_DEG: f64 = 22.5;
pub const PHI_CELLS: usize = 9;
pub const THETA_STEP_DEG: f64 = 30.0;
pub const THETA_CELLS: usize = 12;
pub const GRID_CELLS: usize = PHI_CELLS * THETA_CELLS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LipModel {
    /// Stationary grip before the twist starts (s).
    pub hold_s: f64,
    /// Gap at which the lip leak saturates and contact reads 0 (mm).
    pub gap_max_mm: f64,
    /// Lift a lip point absorbs before it opens (mm).
    pub compliance_mm: f64,
    /// Relative per-trial spread of the compliance.
    pub compliance_jitter: f64,
    /// Share of the axial pull that reaches the lip.
    pub axial_coupling: f64,
    /// Lift per mm of lateral travel along the lip normal.
    pub shear_coupling: f64,
    pub pop_contact: f64,
    pub pop_speed_mm_s: f64,
    /// Leak of a sealed quadrant.
    pub seal: f64,
    /// Extra leak of a fully peeled quadrant.
    pub peel: f64,
    /// Horizontal share of a peel leak while the quadrant is still sealed.
    pub horizontal_fraction: f64,
    /// Give up if the cup has not detached by then (s).
    pub max_duration_s: f64,
    /// Initial suction loading (kg).
    pub preload_kg: f64,
    /// Image drift of the seal centre per mm of wrist travel (px/mm).
    pub drift_px_per_mm: f64,
}

impl Default for LipModel {
    fn default() -> Self {
        let cal = crate::calibrate::DEFAULT_CALIBRATION;
        Self {
            hold_s: 0.12,
            gap_max_mm: 1.2,
            compliance_mm: 0.8,
            compliance_jitter: 0.2,
            axial_coupling: 0.08,
            shear_coupling: 0.1,
            pop_contact: 0.5,
            pop_speed_mm_s: 30.0,
            seal: cal.grit_600 * 0.25,
            peel: 10.0 * TUBE_G,
            horizontal_fraction: 0.9,
            max_duration_s: 8.0,
            preload_kg: 0.45,
            drift_px_per_mm: 0.6,
        }
    }
}

/// Commanded twist of one detachment trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetachParams {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub angular_rate_deg_s: f64,
    /// Wrist translation velocity (mm/s).
    pub velocity_mm_s: [f64; 3],
    /// Multiplier on the lip compliance for this trial.
    pub compliance_scale: f64,
    /// Untared force/torque offset for this trial.
    pub ft_bias: [f64; 6],
}

impl Default for DetachParams {
    fn default() -> Self {
        Self {
            phi_deg: 0.0,
            theta_deg: 0.0,
            angular_rate_deg_s: 30.0,
            velocity_mm_s: [0.0, 0.0, 6.0],
            compliance_scale: 1.0,
            ft_bias: [0.0; 6],
        }
    }
}

impl DetachParams {
    pub fn axis(&self) -> [f64; 3] {
        let (p, t) = (self.phi_deg.to_radians(), self.theta_deg.to_radians());
        [p.cos() * t.cos(), p.cos() * t.sin(), p.sin()]
    }
}

/// Peel kinematics of one trial, precomputed for fast evaluation.
#[derive(Clone, Debug)]
pub struct DetachKinematics {
    params: DetachParams,
    lip: LipModel,
    axis: [f64; 3],
    omega: f64,
    compliance: f64,
    /// (cos a, sin a) of every lip point.
    points: Vec<(f64, f64)>,
    t_pop: f64,
    preload_n: f64,
    /// Running maximum of the peel gaps on a 1 ms grid: a peeled lip does
    /// not reseal.
    table: Vec<[f64; CHAMBERS]>,
}

const TABLE_STEP: f64 = 1e-3;

impl DetachKinematics {
    pub fn new(cfg: &SimConfig, params: &DetachParams) -> Result<Self> {
        let lip = cfg.lip.clone();
        let finite = [params.phi_deg, params.theta_deg, params.angular_rate_deg_s, params.compliance_scale]
            .iter()
            .chain(params.velocity_mm_s.iter())
            .all(|v| v.is_finite());
        if !finite || params.angular_rate_deg_s < 0.0 || params.compliance_scale <= 0.0 {
            return Err(SimError::Scenario(format!("invalid detach parameters {params:?}")));
        }
        let points = (0..CHAMBERS)
            .flat_map(|k| {
                (0..POINTS_PER_QUADRANT).map(move |j| {
                    let a = lip_point_azimuth(k, j);
                    (a.cos(), a.sin())
                })
            })
            .collect();
        let mut kin = Self {
            axis: params.axis(),
            omega: params.angular_rate_deg_s.to_radians(),
            compliance: lip.compliance_mm * params.compliance_scale,
            preload_n: lip.preload_kg * G0,
            params: params.clone(),
            points,
            t_pop: f64::INFINITY,
            lip,
            table: Vec::new(),
        };
        kin.build_table();
        kin.t_pop = kin.find_pop();
        if kin.lip.pop_speed_mm_s <= 0.0 && !kin.t_pop.is_finite() {
            return Err(SimError::Scenario("lip never releases".into()));
        }
        Ok(kin)
    }

    pub fn params(&self) -> &DetachParams {
        &self.params
    }

    pub fn preload_n(&self) -> f64 {
        self.preload_n
    }

    pub fn max_duration(&self) -> f64 {
        self.lip.max_duration_s
    }

    /// Time the remaining seal pops off.
    pub fn pop_time(&self) -> f64 {
        self.t_pop
    }

    fn elapsed(&self, t: f64) -> f64 {
        (t - self.lip.hold_s).max(0.0)
    }

    /// Instantaneous peel gap per quadrant (mm) from the kinematics alone.
    fn raw_gaps(&self, t: f64) -> [f64; CHAMBERS] {
        let tau = self.elapsed(t);
        let alpha = self.omega * tau;
        let (sa, ca) = alpha.sin_cos();
        let [ux, uy, uz] = self.axis;
        let v = self.params.velocity_mm_s;
        let uniform = self.lip.axial_coupling * v[2] * tau;
        let shear = self.lip.shear_coupling * tau;
        let mut gaps = [0.0f64; CHAMBERS];
        for (i, &(c, s)) in self.points.iter().enumerate() {
            let rot = LIP_RADIUS_MM * ((ux * s - uy * c) * sa + uz * (ux * c + uy * s) * (1.0 - ca));
            let lift = rot + uniform + shear * (v[0] * c + v[1] * s);
            let k = i / POINTS_PER_QUADRANT;
            gaps[k] = gaps[k].max(lift - self.compliance);
        }
        gaps
    }

    fn build_table(&mut self) {
        let n = (self.lip.max_duration_s / TABLE_STEP).ceil() as usize + 1;
        let mut table = Vec::with_capacity(n);
        let mut acc = [f64::NEG_INFINITY; CHAMBERS];
        for i in 0..n {
            let g = self.raw_gaps(i as f64 * TABLE_STEP);
            for k in 0..CHAMBERS {
                acc[k] = acc[k].max(g[k]);
            }
            table.push(acc);
        }
        self.table = table;
    }

    /// Peel gap per quadrant (mm) before the pop-off release.
    fn peel_gaps(&self, t: f64) -> [f64; CHAMBERS] {
        let x = (t.max(0.0) / TABLE_STEP).min((self.table.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.table.len() - 2);
        let w = x - i as f64;
        let (a, b) = (self.table[i], self.table[i + 1]);
        std::array::from_fn(|k| a[k] * (1.0 - w) + b[k] * w)
    }

    fn contact_from(&self, gaps: &[f64; CHAMBERS]) -> [f64; CHAMBERS] {
        gaps.map(|g| (1.0 - g / self.lip.gap_max_mm).clamp(0.0, 1.0))
    }

    fn find_pop(&self) -> f64 {
        for (i, g) in self.table.iter().enumerate() {
            let t = i as f64 * TABLE_STEP;
            let c = self.contact_from(g);
            if c.iter().sum::<f64>() / (CHAMBERS as f64) < self.lip.pop_contact {
                return t;
            }
        }
        // No pop within the budget: release at the end of the hold budget so
        // every trial still detaches.
        (self.lip.max_duration_s - 1.0).max(self.lip.hold_s)
    }

    pub fn gaps(&self, t: f64) -> [f64; CHAMBERS] {
        let pop = self.lip.pop_speed_mm_s * (t - self.t_pop).max(0.0);
        self.peel_gaps(t).map(|g| g.max(0.0) + pop)
    }

    pub fn contact(&self, t: f64) -> [f64; CHAMBERS] {
        self.contact_from(&self.gaps(t))
    }

    pub fn boundary(&self, t: f64) -> Boundary {
        let contact = self.contact(t);
        let leaks = contact.map(|c| self.lip.seal + self.lip.peel * (1.0 - c) * (1.0 - c));
        // Air sweeps under a lip that is still at least half sealed.
        let share = contact.map(|c| self.lip.horizontal_fraction * (2.0 * c).min(1.0));
        Boundary { leaks: route_share(&leaks, &share), contact, vacuum_on: true }
    }

    pub fn twist(&self, t: f64) -> TwistState {
        let tau = self.elapsed(t);
        let moving = if t > self.lip.hold_s { 1.0 } else { 0.0 };
        let v = self.params.velocity_mm_s.map(|x| x * 1e-3);
        let alpha = self.omega * tau;
        TwistState {
            displacement: v.map(|x| x * tau),
            velocity: v.map(|x| x * moving),
            rotation: self.axis.map(|u| u * alpha),
            angular_velocity: self.axis.map(|u| u * self.omega * moving),
        }
    }

    /// `[yaw (rad), drift_x (px), drift_y (px)]` of the seal in the camera.
    pub fn pose(&self, t: f64) -> [f64; 3] {
        let tau = self.elapsed(t);
        let v = self.params.velocity_mm_s;
        let k = self.lip.drift_px_per_mm * tau;
        [self.axis[2] * self.omega * tau, k * v[0], k * v[1]]
    }
}

/// One sampled detachment trial.
#[derive(Clone, Debug, PartialEq)]
pub struct DetachTrial {
    pub index: usize,
    /// (φ, θ) grid cell.
    pub cell: (usize, usize),
    pub seed: u64,
    pub params: DetachParams,
    pub trace: Trace,
}

/// Grid cell of trial `index`: trials cycle through all 108 cells.
pub fn grid_cell(index: usize) -> (usize, usize) {
    let c = index % GRID_CELLS;
    (c / THETA_CELLS, c % THETA_CELLS)
}

/// Draw the perturbed twist of trial `index`.
pub fn sample_params(cfg: &SimConfig, seed: u64, index: usize) -> DetachParams {
    let (i, j) = grid_cell(index);
    let mut rng = rng_for(trial_seed(seed, index as u64), stream::SCENARIO);
    let phi = (i as f64 + rng.random_range(-0.5..0.5)) * PHI_STEP_DEG;
    let theta = (j as f64 + rng.random_range(-0.5..0.5)) * THETA_STEP_DEG;
    let rate = 30.0 + rng.random_range(-5.0..5.0);
    let velocity = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(6.0..20.0)];
    let jitter = cfg.lip.compliance_jitter;
    let compliance_scale = 1.0 + rng.random_range(-jitter..=jitter);
    let ft_bias = cfg.wrench.sample_bias(&mut rng);
    DetachParams { phi_deg: phi, theta_deg: theta, angular_rate_deg_s: rate, velocity_mm_s: velocity, compliance_scale, ft_bias }
}

/// Simulate `n` detachment trials covering the 9 × 12 twist-axis grid.
///
/// Each trial derives its own seed from `(seed, index)`, so the result does
/// not depend on the execution mode.
pub fn sample_detach_batch(cfg: &SimConfig, n: usize, seed: u64, exec: Execution) -> Result<Vec<DetachTrial>> {
    if n == 0 {
        return Err(SimError::Scenario("batch size must be at least 1".into()));
    }
    exec.map_indexed(n, |index| {
        let params = sample_params(cfg, seed, index);
        let tseed = trial_seed(seed, index as u64);
        let trace = run_scenario(cfg, &Scenario::detach(params.clone()), tseed)?;
        Ok(DetachTrial { index, cell: grid_cell(index), seed: tseed, params, trace })
    })
    .into_iter()
    .collect()
}

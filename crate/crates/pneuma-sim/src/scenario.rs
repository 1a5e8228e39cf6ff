//! Scenario descriptions and their expansion into boundary schedules.
//!
//! A scenario expands into a [`Schedule`] that gives, at any time, the four
//! effective lip leaks, the ground-truth contact per quadrant and whether
//! the vacuum is switched on. [`run_scenario`] integrates the network under
//! that schedule and samples the sensors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calibrate::TUBE_G;
use crate::detach::{DetachKinematics, DetachParams};
use crate::error::{Result, SimError};
use crate::network::build_network;
use crate::rng::{derive_seed, rng_for, stream};
use crate::surface::{lip_point_azimuth, route_share, smoothstep, LIP_RADIUS_MM, LIP_WIDTH_MM, POINTS_PER_QUADRANT};
use crate::trace::{Trace, TraceMeta};
use crate::valve::ValveState;
use crate::{sample_time, SimConfig, CHAMBERS, DT, RIGHT_AXIS_AZIMUTH, STEPS_PER_SAMPLE};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VacuumMode {
    #[default]
    Full,
    Pwm,
}

/// Textured-smooth acrylic pairs used for sliding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePair {
    WavySmooth,
    RibbedSmooth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Static contact on sandpaper of the given grit.
    Texture { grit: u32 },
    /// Lateral slide from half contact on a textured plate onto smooth acrylic.
    Slide { pair: SurfacePair, speed_mm_s: f64 },
    /// Static press onto a curved tip at a tilt angle.
    Palpate { tip_radius_mm: f64, angle_deg: f64, preload_n: f64 },
    /// Twist-driven detachment from a flat plate.
    Detach(DetachParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    /// Simulated length (s); `None` uses the scenario's natural length.
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default)]
    pub vacuum_mode: VacuumMode,
}

impl Scenario {
    pub fn texture(grit: u32, mode: VacuumMode) -> Self {
        Self { kind: ScenarioKind::Texture { grit }, duration: None, vacuum_mode: mode }
    }

    pub fn slide(pair: SurfacePair) -> Self {
        Self { kind: ScenarioKind::Slide { pair, speed_mm_s: 6.5 }, duration: None, vacuum_mode: VacuumMode::Pwm }
    }

    pub fn palpate(tip_radius_mm: f64, angle_deg: f64, preload_n: f64) -> Self {
        Self {
            kind: ScenarioKind::Palpate { tip_radius_mm, angle_deg, preload_n },
            duration: None,
            vacuum_mode: VacuumMode::Pwm,
        }
    }

    pub fn detach(params: DetachParams) -> Self {
        Self { kind: ScenarioKind::Detach(params), duration: None, vacuum_mode: VacuumMode::Full }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ScenarioKind::Texture { .. } => "texture",
            ScenarioKind::Slide { .. } => "slide",
            ScenarioKind::Palpate { .. } => "palpate",
            ScenarioKind::Detach(_) => "detach",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextureModel {
    /// Vacuum switch-on time after the preload is reached (s).
    pub vacuum_on_s: f64,
    pub duration_s: f64,
    /// Relative per-quadrant spread of the sandpaper leak.
    pub jitter: f64,
}

impl Default for TextureModel {
    fn default() -> Self {
        Self { vacuum_on_s: 0.2, duration_s: 4.0, jitter: 0.03 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlideModel {
    pub vacuum_on_s: f64,
    /// Time the cup starts moving (s).
    pub start_s: f64,
    /// Width of the textured plate along the motion axis (mm).
    pub texture_width_mm: f64,
    /// Travel after the start (mm).
    pub travel_mm: f64,
    /// Leak of a lip quadrant hanging past the plate edge.
    pub overhang: f64,
}

impl Default for SlideModel {
    fn default() -> Self {
        Self { vacuum_on_s: 0.5, start_s: 1.5, texture_width_mm: 35.0, travel_mm: 50.0, overhang: 20.0 * TUBE_G }
    }
}

/// Lip gap model for pressing onto a curved tip.
///
/// The unloaded gap is `curvature_gain · (R_lip / R_tip)² − force_gain · F`;
/// tilting by θ adds `tilt_gain · θ` on the lifted side and removes it on the
/// pressed side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PalpationModel {
    pub vacuum_on_s: f64,
    pub duration_s: f64,
    pub curvature_gain_mm: f64,
    pub force_gain_mm_per_n: f64,
    pub tilt_gain_mm_per_deg: f64,
    /// Gap at which the lip leak saturates (mm).
    pub gap_saturation_mm: f64,
    pub gap_exponent: f64,
    /// Leak of a fully open quadrant.
    pub open: f64,
}

impl Default for PalpationModel {
    fn default() -> Self {
        Self {
            vacuum_on_s: 0.2,
            duration_s: 3.0,
            curvature_gain_mm: 1.75,
            force_gain_mm_per_n: 1.6,
            tilt_gain_mm_per_deg: 0.06,
            gap_saturation_mm: 0.6,
            gap_exponent: 2.0,
            open: 20.0 * TUBE_G,
        }
    }
}

impl PalpationModel {
    /// Signed lip gap (mm) on the left and right halves.
    pub fn side_gaps(&self, tip_radius_mm: f64, angle_deg: f64, preload_n: f64) -> (f64, f64) {
        let base = self.curvature_gain_mm * (LIP_RADIUS_MM / tip_radius_mm).powi(2) - self.force_gain_mm_per_n * preload_n;
        let tilt = self.tilt_gain_mm_per_deg * angle_deg;
        (base - tilt, base + tilt)
    }

    fn openness(&self, gap: f64) -> f64 {
        (gap.max(0.0) / self.gap_saturation_mm).min(1.0).powf(self.gap_exponent)
    }
}

/// Boundary conditions at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundary {
    /// Effective per-chamber leaks after horizontal routing.
    pub leaks: [f64; CHAMBERS],
    pub contact: [f64; CHAMBERS],
    pub vacuum_on: bool,
}

/// A scenario expanded against a configuration.
#[derive(Clone, Debug)]
pub enum Schedule {
    Static { leaks: [f64; CHAMBERS], contact: [f64; CHAMBERS], vacuum_on_s: f64, duration: f64 },
    Slide(SlideSchedule),
    Detach(Box<DetachKinematics>),
}

#[derive(Clone, Debug)]
pub struct SlideSchedule {
    pub model: SlideModel,
    pub speed_mm_s: f64,
    pub texture_leak: f64,
    pub texture_seal: f64,
    pub smooth_leak: f64,
    pub horizontal_fraction: f64,
    pub seal_exponent: f64,
    pub duration: f64,
    /// Projection of every lip point on the motion axis (mm).
    offsets: Vec<f64>,
}

impl SlideSchedule {
    /// Cup centre along the motion axis (mm); 0 puts it over the plate edge.
    pub fn position(&self, t: f64) -> f64 {
        self.speed_mm_s * (t - self.model.start_s).max(0.0)
    }

    /// Times when the leading and trailing edges of the lip cross `x` (mm).
    pub fn crossing_times(&self, x: f64) -> (f64, f64) {
        let lead = (x - LIP_RADIUS_MM) / self.speed_mm_s + self.model.start_s;
        let trail = (x + LIP_RADIUS_MM) / self.speed_mm_s + self.model.start_s;
        (lead, trail)
    }

    fn boundary(&self, t: f64) -> Boundary {
        let centre = self.position(t);
        let w = self.model.texture_width_mm;
        let mut leak = [0.0; CHAMBERS];
        let mut seal = [0.0; CHAMBERS];
        for k in 0..CHAMBERS {
            for j in 0..POINTS_PER_QUADRANT {
                let s = centre + self.offsets[k * POINTS_PER_QUADRANT + j];
                let on = smoothstep(s, LIP_WIDTH_MM);
                let smooth = smoothstep(s - w, LIP_WIDTH_MM);
                let surface_leak = (1.0 - smooth) * self.texture_leak + smooth * self.smooth_leak;
                let surface_seal = (1.0 - smooth) * self.texture_seal + smooth;
                leak[k] += (1.0 - on) * self.model.overhang + on * surface_leak;
                seal[k] += on * surface_seal;
            }
            leak[k] /= POINTS_PER_QUADRANT as f64;
            seal[k] /= POINTS_PER_QUADRANT as f64;
        }
        let level = seal.iter().sum::<f64>() / CHAMBERS as f64;
        let share = self.horizontal_fraction * level.clamp(0.0, 1.0).powf(self.seal_exponent);
        Boundary { leaks: route_share(&leak, &[share; CHAMBERS]), contact: seal, vacuum_on: t >= self.model.vacuum_on_s }
    }
}

impl Schedule {
    pub fn boundary(&self, t: f64) -> Boundary {
        match self {
            Schedule::Static { leaks, contact, vacuum_on_s, .. } => {
                Boundary { leaks: *leaks, contact: *contact, vacuum_on: t >= *vacuum_on_s }
            }
            Schedule::Slide(s) => s.boundary(t),
            Schedule::Detach(d) => d.boundary(t),
        }
    }

    /// Fixed length in seconds, or `None` when the run ends on detachment.
    pub fn duration(&self) -> Option<f64> {
        match self {
            Schedule::Static { duration, .. } => Some(*duration),
            Schedule::Slide(s) => Some(s.duration),
            Schedule::Detach(_) => None,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::Scenario(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Expand a scenario into its boundary schedule.
pub fn expand(cfg: &SimConfig, scenario: &Scenario, seed: u64) -> Result<Schedule> {
    let mut rng = rng_for(seed, stream::SCENARIO);
    let cat = &cfg.surfaces;
    let schedule = match &scenario.kind {
        ScenarioKind::Texture { grit } => {
            let g = cat.grit_conductance(*grit)?;
            let m = &cfg.texture;
            let leaks: [f64; CHAMBERS] = std::array::from_fn(|_| g * (1.0 + m.jitter * rng.random_range(-1.0..1.0)));
            Schedule::Static {
                leaks: route_share(&leaks, &[cat.horizontal_share(1.0); CHAMBERS]),
                contact: [1.0; CHAMBERS],
                vacuum_on_s: m.vacuum_on_s,
                duration: scenario.duration.unwrap_or(m.duration_s),
            }
        }
        ScenarioKind::Slide { pair, speed_mm_s } => {
            check_positive("speed_mm_s", *speed_mm_s)?;
            let (texture_leak, texture_seal) = match pair {
                SurfacePair::WavySmooth => (cat.wavy, cat.wavy_seal),
                SurfacePair::RibbedSmooth => (cat.ribbed, cat.ribbed_seal),
            };
            let m = cfg.slide.clone();
            let offsets = (0..CHAMBERS)
                .flat_map(|k| {
                    (0..POINTS_PER_QUADRANT).map(move |j| LIP_RADIUS_MM * (lip_point_azimuth(k, j) - RIGHT_AXIS_AZIMUTH).cos())
                })
                .collect();
            let duration = scenario.duration.unwrap_or(m.start_s + m.travel_mm / speed_mm_s);
            Schedule::Slide(SlideSchedule {
                model: m,
                speed_mm_s: *speed_mm_s,
                texture_leak,
                texture_seal,
                smooth_leak: cat.smooth,
                horizontal_fraction: cat.horizontal_fraction,
                seal_exponent: cat.seal_exponent,
                duration,
                offsets,
            })
        }
        ScenarioKind::Palpate { tip_radius_mm, angle_deg, preload_n } => {
            check_positive("tip_radius_mm", *tip_radius_mm)?;
            if !(preload_n.is_finite() && *preload_n >= 0.0 && angle_deg.is_finite()) {
                return Err(SimError::Scenario("palpation preload must be >= 0 and angle finite".into()));
            }
            let m = &cfg.palpation;
            let (left, right) = m.side_gaps(*tip_radius_mm, *angle_deg, *preload_n);
            let mut leaks = [0.0; CHAMBERS];
            let mut contact = [0.0; CHAMBERS];
            for k in 0..CHAMBERS {
                let gap = if crate::LEFT_PAIR.contains(&k) { left } else { right };
                let open = m.openness(gap);
                leaks[k] = cat.smooth + m.open * open;
                contact[k] = 1.0 - open;
            }
            let level = contact.iter().sum::<f64>() / CHAMBERS as f64;
            Schedule::Static {
                leaks: route_share(&leaks, &[cat.horizontal_share(level); CHAMBERS]),
                contact,
                vacuum_on_s: m.vacuum_on_s,
                duration: scenario.duration.unwrap_or(m.duration_s),
            }
        }
        ScenarioKind::Detach(p) => Schedule::Detach(Box::new(DetachKinematics::new(cfg, p)?)),
    };
    Ok(schedule)
}

/// Knots per sample period at which the schedule is evaluated; leaks are
/// interpolated linearly between knots.
const KNOTS_PER_SAMPLE: usize = 6;
const STEPS_PER_KNOT: usize = STEPS_PER_SAMPLE / KNOTS_PER_SAMPLE;

/// Simulate a scenario and sample every sensor.
pub fn run_scenario(cfg: &SimConfig, scenario: &Scenario, seed: u64) -> Result<Trace> {
    let schedule = expand(cfg, scenario, seed)?;
    let mut net = build_network(&cfg.cup)?;
    let mut valve = match scenario.vacuum_mode {
        VacuumMode::Full => ValveState::full(),
        VacuumMode::Pwm => ValveState::exploration(),
    };
    let detach = match &schedule {
        Schedule::Detach(d) => Some(d.as_ref()),
        _ => None,
    };
    if detach.is_some() {
        // Detachment starts from an established full-vacuum grip.
        let b0 = schedule.boundary(0.0);
        net.set_uniform_vacuum(cfg.cup.source_vacuum * 0.9);
        net.steady_state(1.0, &b0.leaks)?;
        valve.open_fraction = 1.0;
    }
    let max_samples = match (schedule.duration(), detach) {
        (Some(d), _) => (d / crate::SAMPLE_PERIOD).round() as usize + 1,
        (None, Some(d)) => (d.max_duration() / crate::SAMPLE_PERIOD).round() as usize + 1,
        (None, None) => unreachable!("only detach schedules are open-ended"),
    };

    let mut sensor_rng = rng_for(seed, stream::SENSOR);
    let mut ft_rng = rng_for(seed, stream::FORCE_TORQUE);
    let bias = detach.map(|d| d.params().ft_bias).unwrap_or([0.0; 6]);
    let mut trace = Trace::with_capacity(
        TraceMeta { scenario: scenario.clone(), seed, config_digest: None },
        max_samples,
    );

    let mut current = schedule.boundary(0.0);
    let mut step = 0usize;
    for i in 0..max_samples {
        let t = sample_time(i);
        let vac = net.chamber_vacuum();
        let p = vac.map(|v| cfg.sensor.sample(v, &mut sensor_rng));
        let (ft, pose) = match detach {
            Some(d) => {
                let twist = d.twist(t);
                let mean_vac = vac.iter().sum::<f64>() / CHAMBERS as f64;
                let clean = cfg.wrench.wrench(&twist, &current.contact, mean_vac, d.preload_n());
                (cfg.wrench.measure(&clean, &bias, cfg.sensor.noise_enabled, &mut ft_rng), d.pose(t))
            }
            None => ([0.0; 6], [0.0; 3]),
        };
        trace.push(t, p, ft, current.contact.map(|c| c.clamp(0.0, 1.0)), pose);
        if detach.is_some() && current.contact.iter().all(|&c| c < 0.1) {
            return Ok(trace);
        }
        if i + 1 == max_samples {
            break;
        }

        for knot in 0..KNOTS_PER_SAMPLE {
            let t_end = (i * STEPS_PER_SAMPLE + (knot + 1) * STEPS_PER_KNOT) as f64 * DT;
            let next = schedule.boundary(t_end);
            for s in 0..STEPS_PER_KNOT {
                let w = (s as f64 + 0.5) / STEPS_PER_KNOT as f64;
                let leaks: [f64; CHAMBERS] = std::array::from_fn(|k| current.leaks[k] * (1.0 - w) + next.leaks[k] * w);
                let t_step = step as f64 * DT;
                if current.vacuum_on {
                    valve.advance(t_step, DT);
                } else {
                    valve.relax(0.0, DT);
                }
                net.step(&valve, &leaks, DT)?;
                step += 1;
            }
            current = next;
        }
    }
    if detach.is_some() {
        return Err(SimError::Scenario(format!(
            "cup still attached after {:.2} s",
            sample_time(max_samples - 1)
        )));
    }
    Ok(trace)
}

/// Seed of trial `index` within a batch seeded by `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    derive_seed(seed, index)
}

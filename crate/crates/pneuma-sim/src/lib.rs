//! Lumped-parameter simulation of a four-chamber smart suction cup.
//!
//! The cup is modelled as seven gas nodes: a plenum that feeds four
//! chambers through necks, the ambient atmosphere, and the ejector's
//! suction port. Chambers leak to ambient through time-varying lip
//! conductances that encode the contact surface. All edges follow a
//! square-root orifice law and node pressures evolve under an isothermal
//! mass balance integrated with fixed-step RK4.
//!
//! Scenarios (texture grading, sliding, palpation, detachment) expand into
//! leak, contact and wrench schedules; [`run_scenario`] turns a scenario into
//! a sensor [`Trace`] sampled like the physical MPRLS transducers.

pub mod calibrate;
pub mod config;
pub mod detach;
pub mod error;
pub mod exec;
pub mod frame;
pub mod network;
pub mod rng;
pub mod scenario;
pub mod sensor;
pub mod surface;
pub mod trace;
pub mod valve;
pub mod wrench;

pub use config::SimConfig;
pub use detach::{sample_detach_batch, DetachParams, DetachTrial};
pub use error::{Result, SimError};
pub use exec::Execution;
pub use frame::{render_seal_frame, Frame, RenderOptions};
pub use network::{build_network, mass_flow, CupConfig, CupNetwork, SteadyState};
pub use scenario::{run_scenario, Scenario, ScenarioKind, SurfacePair, VacuumMode};
pub use sensor::SensorModel;
pub use trace::Trace;
pub use valve::ValveState;

/// Ambient absolute pressure (Pa).
pub const P_ATM: f64 = 101_325.0;
/// Maximum vacuum produced by the ejector (Pa below ambient).
pub const SOURCE_VACUUM: f64 = 85_000.0;
/// Specific gas constant of dry air (J·kg⁻¹·K⁻¹).
pub const R_SPECIFIC: f64 = 287.05;
/// Isothermal gas temperature (K).
pub const GAS_TEMPERATURE: f64 = 293.15;
/// Fixed integrator step (s).
pub const DT: f64 = 1e-4;
/// Integrator steps between two pressure samples.
pub const STEPS_PER_SAMPLE: usize = 60;
/// Pressure sensor sample period (s); 166.7 Hz.
pub const SAMPLE_PERIOD: f64 = 0.006;
/// Pressure sensor sample rate (Hz).
pub const SAMPLE_RATE: f64 = 1.0 / SAMPLE_PERIOD;

/// Timestamp of sample `i` (s). Computed from whole milliseconds so CSV
/// output stays short.
pub fn sample_time(i: usize) -> f64 {
    (i * 6) as f64 / 1000.0
}

/// Chamber count; chamber `k` (1-based) is centred at azimuth `(k-1)·90°`
/// in the cup frame.
pub const CHAMBERS: usize = 4;

/// Index of the chamber diagonally opposite `k` (0-based).
pub fn diagonal(k: usize) -> usize {
    (k + 2) % CHAMBERS
}

/// Azimuth (rad) of the centre of chamber `k` (0-based) in the cup frame.
pub fn chamber_azimuth(k: usize) -> f64 {
    k as f64 * std::f64::consts::FRAC_PI_2
}

/// Chambers on the "left" side of the cup (ch1, ch2), 0-based.
pub const LEFT_PAIR: [usize; 2] = [0, 1];
/// Chambers on the "right" side of the cup (ch3, ch4), 0-based.
pub const RIGHT_PAIR: [usize; 2] = [2, 3];
/// Azimuth of the left-to-right axis in the cup frame (225°).
pub const RIGHT_AXIS_AZIMUTH: f64 = 5.0 * std::f64::consts::FRAC_PI_4;

//! One-shot calibration of the default conductances.
//!
//! Three scalar bracketed searches, iterated to a fixed point:
//!
//! * neck conductance such that a single vertical orifice leak next to
//!   chamber 1 spreads the chamber vacuums by 0.4 kPa;
//! * per-quadrant 600-grit leak such that the full-vacuum steady vacuum is
//!   74 kPa;
//! * ejector vent conductance such that the 30 Hz / 30 % PWM mean vacuum on
//!   600 grit is 25× below the full-vacuum mean.
//!
//! The tube conductance fixes the absolute time scale and the orifice leak
//! is pinned relative to it; both are constants. [`DEFAULT_CALIBRATION`]
//! holds the frozen output of [`calibrate`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::network::{build_network, CupConfig};
use crate::surface::SurfaceCatalog;
use crate::valve::ValveState;
use crate::{CHAMBERS, DT, SAMPLE_PERIOD, STEPS_PER_SAMPLE};

/// Plenum↔ejector conductance (kg·s⁻¹·Pa⁻½).
pub const TUBE_G: f64 = 6.0e-7;
/// The single leak orifice used for the localisation cases.
pub const ORIFICE_G: f64 = 0.02 * TUBE_G;
/// Wall crosstalk as a fraction of the neck conductance.
pub const CROSSTALK_TO_NECK: f64 = 0.15;
/// 120-grit leak relative to the 600-grit leak.
pub const GRIT_120_TO_600: f64 = 2.5;

pub const TARGET_DIFFERENTIAL: f64 = 400.0;
pub const TARGET_600_GRIT: f64 = 74_000.0;
pub const TARGET_PWM_RATIO: f64 = 25.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub neck_g: f64,
    pub grit_600: f64,
    pub vent_g: f64,
}

/// Frozen output of [`calibrate`] on the default geometry.
pub const DEFAULT_CALIBRATION: Calibration =
    Calibration { neck_g: 1.362_613_986_001_464_5e-7, grit_600: 3.888_312_080_317_385e-8, vent_g: 6.120_560_097_090_167e-7 };

/// Quantities the calibration matches, evaluated for a given cup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub single_leak_differential: f64,
    pub grit_600_full: f64,
    pub grit_600_pwm: f64,
    pub pwm_ratio: f64,
}

fn cup_with(base: &CupConfig, cal: &Calibration) -> CupConfig {
    CupConfig {
        neck_g: [cal.neck_g; CHAMBERS],
        crosstalk_g: cal.neck_g * CROSSTALK_TO_NECK,
        vent_g: cal.vent_g,
        ..base.clone()
    }
}

/// Max − min of the steady chamber vacuums with one orifice leak on chamber 1.
pub fn single_leak_differential(cup: &CupConfig, orifice: f64) -> Result<f64> {
    let mut net = build_network(cup)?;
    net.set_uniform_vacuum(TARGET_600_GRIT);
    let s = net.solve_equilibrium(1.0, &[orifice, 0.0, 0.0, 0.0])?;
    let max = s.chamber_vac.iter().cloned().fold(f64::MIN, f64::max);
    let min = s.chamber_vac.iter().cloned().fold(f64::MAX, f64::min);
    Ok(max - min)
}

/// Full-vacuum steady mean chamber vacuum with a uniform per-quadrant leak.
pub fn uniform_leak_vacuum(cup: &CupConfig, leak: f64) -> Result<f64> {
    let mut net = build_network(cup)?;
    net.set_uniform_vacuum(TARGET_600_GRIT);
    let s = net.solve_equilibrium(1.0, &[leak; CHAMBERS])?;
    Ok(s.chamber_vac.iter().sum::<f64>() / CHAMBERS as f64)
}

/// Mean chamber vacuum under PWM with a uniform leak, averaged over
/// `window` seconds after `settle` seconds, sampled at the sensor rate.
pub fn pwm_mean_vacuum(cup: &CupConfig, leak: f64, settle: f64, window: f64) -> Result<f64> {
    let mut net = build_network(cup)?;
    let mut valve = ValveState::exploration();
    let total = ((settle + window) / SAMPLE_PERIOD).round() as usize;
    let skip = (settle / SAMPLE_PERIOD).round() as usize;
    let leaks = [leak; CHAMBERS];
    let mut acc = 0.0;
    let mut n = 0usize;
    let mut step = 0usize;
    for s in 0..total {
        for _ in 0..STEPS_PER_SAMPLE {
            let t = step as f64 * DT;
            valve.advance(t, DT);
            net.step(&valve, &leaks, DT)?;
            step += 1;
        }
        if s >= skip {
            acc += net.chamber_vacuum().iter().sum::<f64>() / CHAMBERS as f64;
            n += 1;
        }
    }
    Ok(acc / n as f64)
}

pub fn report(cup: &CupConfig, surfaces: &SurfaceCatalog) -> Result<CalibrationReport> {
    let full = uniform_leak_vacuum(cup, surfaces.grit_600)?;
    let pwm = pwm_mean_vacuum(cup, surfaces.grit_600, 1.5, 1.5)?;
    Ok(CalibrationReport {
        single_leak_differential: single_leak_differential(cup, surfaces.orifice)?,
        grit_600_full: full,
        grit_600_pwm: pwm,
        pwm_ratio: full / pwm,
    })
}

/// Geometric bisection for `f(x) = target` with `f` monotone on `[lo, hi]`.
fn solve_log<F>(mut lo: f64, mut hi: f64, target: f64, increasing: bool, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let (below, above) = if increasing { (f_lo, f_hi) } else { (f_hi, f_lo) };
    if !(below <= target && target <= above) {
        return Err(SimError::Config(format!(
            "calibration target {target} not bracketed by [{f_lo}, {f_hi}] on [{lo:e}, {hi:e}]"
        )));
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        let v = f(mid)?;
        if (v < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Run the calibration from scratch on the geometry of `base`.
pub fn calibrate(base: &CupConfig) -> Result<Calibration> {
    let mut cal = DEFAULT_CALIBRATION;
    for _ in 0..3 {
        // Larger necks shrink the chamber spread.
        cal.neck_g = solve_log(TUBE_G * 0.01, TUBE_G * 15.0, TARGET_DIFFERENTIAL, false, |g| {
            single_leak_differential(&cup_with(base, &Calibration { neck_g: g, ..cal }), ORIFICE_G)
        })?;
        let cup = cup_with(base, &cal);
        // Larger leaks lower the vacuum.
        cal.grit_600 = solve_log(TUBE_G * 1e-3, TUBE_G * 10.0, TARGET_600_GRIT, false, |g| uniform_leak_vacuum(&cup, g))?;
        let full = uniform_leak_vacuum(&cup, cal.grit_600)?;
        // A larger vent lowers the PWM mean and raises the ratio.
        cal.vent_g = solve_log(TUBE_G * 0.05, TUBE_G * 50.0, TARGET_PWM_RATIO, true, |g| {
            let cup = cup_with(base, &Calibration { vent_g: g, ..cal });
            Ok(full / pwm_mean_vacuum(&cup, cal.grit_600, 1.5, 1.5)?)
        })?;
    }
    Ok(cal)
}

/// Default configuration with a fresh calibration applied.
pub fn calibrated_config(base: &crate::SimConfig) -> Result<crate::SimConfig> {
    let cal = calibrate(&base.cup)?;
    let mut cfg = base.clone();
    cfg.cup = cup_with(&base.cup, &cal);
    let ratio_120 = cfg.surfaces.grit_120 / cfg.surfaces.grit_600;
    let scale = cal.grit_600 / cfg.surfaces.grit_600;
    cfg.surfaces.grit_600 = cal.grit_600;
    cfg.surfaces.grit_120 = cal.grit_600 * ratio_120;
    cfg.surfaces.smooth *= scale;
    cfg.surfaces.wavy *= scale;
    cfg.surfaces.ribbed *= scale;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_calibration_is_reproducible() {
        let fresh = calibrate(&CupConfig::default()).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(fresh.neck_g, DEFAULT_CALIBRATION.neck_g) < 1e-4, "{fresh:?}");
        assert!(rel(fresh.grit_600, DEFAULT_CALIBRATION.grit_600) < 1e-4, "{fresh:?}");
        assert!(rel(fresh.vent_g, DEFAULT_CALIBRATION.vent_g) < 1e-4, "{fresh:?}");
    }

    #[test]
    fn default_report_hits_targets() {
        let c = crate::SimConfig::default();
        let r = report(&c.cup, &c.surfaces).unwrap();
        assert!((r.single_leak_differential - TARGET_DIFFERENTIAL).abs() < 1.0, "{r:?}");
        assert!((r.grit_600_full - TARGET_600_GRIT).abs() < 10.0, "{r:?}");
        assert!((r.pwm_ratio - TARGET_PWM_RATIO).abs() < 0.05, "{r:?}");
    }
}

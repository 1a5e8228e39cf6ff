//! Solenoid valve gating the ejector's compressed-air supply.

use serde::{Deserialize, Serialize};

/// PWM-driven valve with a first-order opening lag.
///
/// `t_on` and `t_off` are the lag time constants toward the open and closed
/// positions respectively.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValveState {
    pub duty: f64,
    pub frequency: f64,
    pub open_fraction: f64,
    pub t_on: f64,
    pub t_off: f64,
}

pub const VALVE_T_ON: f64 = 3.5e-3;
pub const VALVE_T_OFF: f64 = 2.0e-3;
pub const PWM_FREQUENCY: f64 = 30.0;
pub const PWM_DUTY: f64 = 0.3;

impl ValveState {
    pub fn pwm(duty: f64, frequency: f64) -> Self {
        Self { duty: duty.clamp(0.0, 1.0), frequency, open_fraction: 0.0, t_on: VALVE_T_ON, t_off: VALVE_T_OFF }
    }

    /// 30 Hz, 30 % duty exploration setting.
    pub fn exploration() -> Self {
        Self::pwm(PWM_DUTY, PWM_FREQUENCY)
    }

    pub fn full() -> Self {
        Self::pwm(1.0, PWM_FREQUENCY)
    }

    pub fn closed() -> Self {
        Self::pwm(0.0, PWM_FREQUENCY)
    }

    /// Commanded square-wave position at time `t`.
    pub fn command(&self, t: f64) -> f64 {
        if self.duty <= 0.0 {
            return 0.0;
        }
        if self.duty >= 1.0 {
            return 1.0;
        }
        let phase = (t * self.frequency).rem_euclid(1.0);
        if phase < self.duty {
            1.0
        } else {
            0.0
        }
    }

    /// Relax `open_fraction` toward the command over `dt` (exact solution of
    /// the first-order lag for a piecewise-constant command).
    pub fn advance(&mut self, t: f64, dt: f64) {
        self.relax(self.command(t), dt);
    }

    /// Relax toward an explicit command (used when the vacuum is switched
    /// off entirely, overriding the square wave).
    pub fn relax(&mut self, target: f64, dt: f64) {
        let tau = if target > self.open_fraction { self.t_on } else { self.t_off };
        let alpha = 1.0 - (-dt / tau).exp();
        self.open_fraction += (target - self.open_fraction) * alpha;
        self.open_fraction = self.open_fraction.clamp(0.0, 1.0);
    }
}

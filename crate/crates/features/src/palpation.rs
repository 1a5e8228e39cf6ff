//! Steady-window carrier magnitudes and surface-normal seeking.

use pneuma_sim::{Trace, LEFT_PAIR, RIGHT_PAIR};
use serde::{Deserialize, Serialize};

use crate::dft::dft_mag_at;
use crate::error::{FeatureError, Result};
use crate::stft::{rate_of, PWM_HZ};

/// Length of the steady analysis window at the end of each trace (s).
pub const STEADY_WINDOW_S: f64 = 2.0;
/// Angles a palpation sweep must cover (deg).
pub const SWEEP_ANGLES: [f64; 5] = [-30.0, -15.0, 0.0, 15.0, 30.0];

fn steady_slice(trace: &Trace, window_s: f64) -> Result<(usize, usize)> {
    let n = (window_s * rate_of(trace)).round() as usize;
    if n == 0 || trace.len() < n {
        return Err(FeatureError::ShortTrace(format!("{} samples, need {n} for a {window_s} s window", trace.len())));
    }
    Ok((trace.len() - n, trace.len()))
}

/// |DFT₃₀| per chamber over the final `window_s` seconds.
pub fn steady_dft30(trace: &Trace, window_s: f64) -> Result<[f64; 4]> {
    let (a, b) = steady_slice(trace, window_s)?;
    let rate = rate_of(trace);
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let x: Vec<f64> = trace.p_vac[a..b].iter().map(|p| p[k]).collect();
        *o = dft_mag_at(&x, PWM_HZ, rate)?;
    }
    Ok(out)
}

/// Mean vacuum per chamber over the final `window_s` seconds.
pub fn steady_mean(trace: &Trace, window_s: f64) -> Result<[f64; 4]> {
    let (a, b) = steady_slice(trace, window_s)?;
    let mut out = [0.0; 4];
    for p in &trace.p_vac[a..b] {
        for k in 0..4 {
            out[k] += p[k];
        }
    }
    Ok(out.map(|s| s / (b - a) as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SealClass {
    Good,
    Poor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalSeek {
    pub best_angle: f64,
    /// `(angle, |DFT₃₀| per chamber)` sorted by angle.
    pub curves: Vec<(f64, [f64; 4])>,
    /// Mean |DFT₃₀| over chambers at the best angle.
    pub seal_quality: f64,
    pub class: SealClass,
}

/// Left-pair / right-pair imbalance of per-chamber magnitudes.
pub fn asymmetry(v: &[f64; 4]) -> f64 {
    let l = (v[LEFT_PAIR[0]] + v[LEFT_PAIR[1]]) / 2.0;
    let r = (v[RIGHT_PAIR[0]] + v[RIGHT_PAIR[1]]) / 2.0;
    (l - r).abs()
}

/// Pick the palpation angle with the most balanced carrier.
pub fn normal_seek_curves(mut curves: Vec<(f64, [f64; 4])>) -> Result<NormalSeek> {
    for a in SWEEP_ANGLES {
        if !curves.iter().any(|(x, _)| (x - a).abs() < 1e-9) {
            return Err(FeatureError::MissingAngle(a));
        }
    }
    curves.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mean = |v: &[f64; 4]| v.iter().sum::<f64>() / 4.0;
    let (best_angle, best) = curves
        .iter()
        .min_by(|a, b| asymmetry(&a.1).total_cmp(&asymmetry(&b.1)).then(a.0.abs().total_cmp(&b.0.abs())))
        .map(|(a, v)| (*a, *v))
        .expect("sweep is non-empty");
    let seal_quality = mean(&best);
    let max = curves.iter().map(|(_, v)| mean(v)).fold(f64::NEG_INFINITY, f64::max);
    let class = if seal_quality >= max { SealClass::Good } else { SealClass::Poor };
    Ok(NormalSeek { best_angle, curves, seal_quality, class })
}

/// Steady |DFT₃₀| per angle, then [`normal_seek_curves`].
pub fn normal_seek(sweep: &[(f64, Trace)]) -> Result<NormalSeek> {
    let curves = sweep.iter().map(|(a, t)| Ok((*a, steady_dft30(t, STEADY_WINDOW_S)?))).collect::<Result<Vec<_>>>()?;
    normal_seek_curves(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(values: [[f64; 4]; 5]) -> Vec<(f64, [f64; 4])> {
        SWEEP_ANGLES.iter().copied().zip(values).collect()
    }

    #[test]
    fn symmetric_peak_is_good() {
        let s = sweep([[1.0, 1.0, 5.0, 5.0], [2.0, 2.0, 6.0, 6.0], [9.0, 9.0, 9.0, 9.0], [6.0, 6.0, 2.0, 2.0], [5.0, 5.0, 1.0, 1.0]]);
        let r = normal_seek_curves(s).unwrap();
        assert_eq!(r.best_angle, 0.0);
        assert_eq!(r.class, SealClass::Good);
        assert_eq!(r.seal_quality, 9.0);
    }

    #[test]
    fn symmetric_dip_is_poor() {
        let s = sweep([[1.0, 1.0, 50.0, 50.0], [2.0, 2.0, 60.0, 60.0], [9.0, 9.0, 9.0, 9.0], [60.0, 60.0, 2.0, 2.0], [50.0, 50.0, 1.0, 1.0]]);
        let r = normal_seek_curves(s).unwrap();
        assert_eq!(r.best_angle, 0.0);
        assert_eq!(r.class, SealClass::Poor);
    }

    #[test]
    fn missing_angle() {
        let mut s = sweep([[1.0; 4]; 5]);
        s.remove(1);
        assert!(matches!(normal_seek_curves(s), Err(FeatureError::MissingAngle(a)) if a == -15.0));
    }
}

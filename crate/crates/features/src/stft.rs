//! Short-time |DFT| at the PWM carrier.

use std::f64::consts::TAU;

use pneuma_sim::Trace;
use serde::{Deserialize, Serialize};

use crate::dft::{bin_index, twiddles, weighted_magnitude, MIN_WINDOW};
use crate::error::{FeatureError, Result};

/// 0.5 s at 166.7 Hz.
pub const STFT_WINDOW: usize = 83;
/// PWM carrier frequency (Hz).
pub const PWM_HZ: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeature {
    /// 1-based chamber.
    pub channel: usize,
    /// |DFT| at the carrier bin (Pa).
    pub value: f64,
    /// Time of the first sample in the window (s).
    pub window_start: f64,
    pub window_len: usize,
    /// Time of the window centre (s).
    pub t: f64,
}

pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n).map(|i| 0.54 - 0.46 * (TAU * i as f64 / (n - 1) as f64).cos()).collect()
}

/// Hamming-windowed carrier magnitude for every window start
/// `0, hop, 2·hop, …` that fits inside `x`.
pub fn stft_at(x: &[f64], f_target: f64, rate: f64, window: usize, hop: usize) -> Result<Vec<f64>> {
    if hop == 0 {
        return Err(FeatureError::BadHop);
    }
    if window < MIN_WINDOW {
        return Err(FeatureError::WindowTooShort { len: window, min: MIN_WINDOW });
    }
    if x.len() < window {
        return Err(FeatureError::WindowTooShort { len: x.len(), min: window });
    }
    if !(f_target > 0.0 && f_target < rate / 2.0) {
        return Err(FeatureError::BadFrequency { f_target, rate });
    }
    let w = hamming(window);
    let table: Vec<(f64, f64)> =
        twiddles(window, bin_index(window, f_target, rate)).iter().zip(&w).map(|(&(c, s), &h)| (c * h, s * h)).collect();
    Ok((0..=x.len() - window).step_by(hop).map(|s| weighted_magnitude(&x[s..s + window], &table)).collect())
}

/// |STFT₃₀| of one series with the standard 83-sample window.
pub fn stft_30(x: &[f64], rate: f64, hop: usize) -> Result<Vec<f64>> {
    stft_at(x, PWM_HZ, rate, STFT_WINDOW, hop)
}

/// |STFT₃₀| of chamber `channel` (1-based) of a trace, stamped at window
/// centres.
pub fn stft_30_channel(trace: &Trace, channel: usize, hop: usize) -> Result<Vec<SpectralFeature>> {
    if !(1..=4).contains(&channel) {
        return Err(FeatureError::ShortTrace(format!("no chamber {channel}")));
    }
    let x = trace.channel(channel - 1);
    let values = stft_30(&x, rate_of(trace), hop)?;
    let half = (STFT_WINDOW - 1) / 2;
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let start = i * hop;
            SpectralFeature { channel, value, window_start: trace.t[start], window_len: STFT_WINDOW, t: trace.t[start + half] }
        })
        .collect())
}

/// Sample rate implied by a trace's timestamps (falls back to the sensor
/// default for single-sample traces).
pub fn rate_of(trace: &Trace) -> f64 {
    if trace.len() < 2 {
        return pneuma_sim::SAMPLE_RATE;
    }
    (trace.len() - 1) as f64 / trace.duration()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_window_centre() {
        let x = vec![0.0; 83];
        let v = stft_30(&x, 166.7, 1).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0], 0.0);
    }

    #[test]
    fn hop_counts() {
        let x = vec![1.0; 200];
        assert_eq!(stft_30(&x, 166.7, 1).unwrap().len(), 118);
        assert_eq!(stft_30(&x, 166.7, 10).unwrap().len(), 12);
        assert!(matches!(stft_30(&x, 166.7, 0), Err(FeatureError::BadHop)));
        assert!(stft_30(&x[..82], 166.7, 1).is_err());
    }

    #[test]
    fn hamming_endpoints() {
        let w = hamming(83);
        assert!((w[0] - 0.08).abs() < 1e-12 && (w[82] - 0.08).abs() < 1e-12);
        assert!((w[41] - 1.0).abs() < 1e-12);
    }
}

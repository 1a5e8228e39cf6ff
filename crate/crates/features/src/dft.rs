//! Single-bin DFT magnitudes.

use std::f64::consts::TAU;

use crate::error::{FeatureError, Result};

/// Shortest window accepted by [`dft_mag_at`].
pub const MIN_WINDOW: usize = 16;

/// Bin nearest to `f_target` for an `n`-point window at `rate`.
pub fn bin_index(n: usize, f_target: f64, rate: f64) -> usize {
    (f_target * n as f64 / rate).round() as usize
}

/// `(cos, sin)` of `2π k n / N` for every `n`, with `k·n` reduced mod `N`
/// first so the angle is exact.
pub fn twiddles(n: usize, k: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let a = TAU * ((k * i) % n) as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .collect()
}

/// `|Σ x[n] e^{−i2πkn/N}| · 2/N`.
pub fn bin_magnitude(x: &[f64], k: usize) -> f64 {
    weighted_magnitude(x, &twiddles(x.len(), k))
}

/// Magnitude against a precomputed (possibly windowed) twiddle table.
pub fn weighted_magnitude(x: &[f64], tw: &[(f64, f64)]) -> f64 {
    debug_assert_eq!(x.len(), tw.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (v, (c, s)) in x.iter().zip(tw) {
        re += v * c;
        im -= v * s;
    }
    re.hypot(im) * 2.0 / x.len() as f64
}

/// Amplitude-normalised DFT magnitude of `window` at the bin nearest
/// `f_target`.
pub fn dft_mag_at(window: &[f64], f_target: f64, rate: f64) -> Result<f64> {
    if window.is_empty() {
        return Err(FeatureError::EmptyWindow);
    }
    if window.len() < MIN_WINDOW {
        return Err(FeatureError::WindowTooShort { len: window.len(), min: MIN_WINDOW });
    }
    if !(f_target > 0.0 && f_target < rate / 2.0) {
        return Err(FeatureError::BadFrequency { f_target, rate });
    }
    Ok(bin_magnitude(window, bin_index(window.len(), f_target, rate)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pneuma_sim::SAMPLE_RATE;

    #[test]
    fn bin_fifteen_for_83_samples() {
        assert_eq!(bin_index(83, 30.0, SAMPLE_RATE), 15);
        assert_eq!(bin_index(83, 30.0, 166.7), 15);
    }

    #[test]
    fn constant_has_no_carrier() {
        let x = vec![1234.5; 83];
        assert!(dft_mag_at(&x, 30.0, SAMPLE_RATE).unwrap() < 1e-9);
    }

    #[test]
    fn bin_centred_sine() {
        let f = 15.0 * SAMPLE_RATE / 83.0;
        let x: Vec<f64> = (0..83).map(|n| 100.0 * (TAU * f * n as f64 / SAMPLE_RATE).sin()).collect();
        let m = dft_mag_at(&x, 30.0, SAMPLE_RATE).unwrap();
        assert!((m - 100.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(dft_mag_at(&[], 30.0, 166.7), Err(FeatureError::EmptyWindow)));
        assert!(matches!(dft_mag_at(&[0.0; 8], 30.0, 166.7), Err(FeatureError::WindowTooShort { .. })));
        assert!(matches!(dft_mag_at(&[0.0; 83], 90.0, 166.7), Err(FeatureError::BadFrequency { .. })));
    }
}

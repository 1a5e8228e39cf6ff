//! Forecast metrics: MSE, first-breaking-quadrant accuracy (BQA) and
//! break-time error (MBTE).
//!
//! Series are `[f64; 4]` per step on the shared 6 ms timeline. Predictions
//! are clamped to [0, 1] before scoring.

use serde::{Deserialize, Serialize};

use crate::data::SAMPLE_MS;
use crate::error::{LearnError, Result};

/// Thresholds reported by default.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.5, 0.6, 0.7];

fn clamp(v: &[f64; 4]) -> [f64; 4] {
    v.map(|x| x.clamp(0.0, 1.0))
}

/// Mean over steps and channels of the squared error.
pub fn metric_mse(pred: &[[f64; 4]], truth: &[[f64; 4]]) -> Result<f64> {
    let n = pred.len().min(truth.len());
    if n == 0 {
        return Err(LearnError::EmptyOverlap);
    }
    let s: f64 = pred.iter().zip(truth).map(|(p, t)| clamp(p).iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum();
    Ok(s / (4 * n) as f64)
}

/// `(step, quadrant)` of the first drop below `th`; among simultaneous
/// drops the lowest quadrant wins.
pub fn first_break(series: &[[f64; 4]], th: f64) -> Option<(usize, usize)> {
    series.iter().enumerate().find_map(|(i, v)| {
        let v = clamp(v);
        (0..4).find(|&k| v[k] < th).map(|k| (i, k))
    })
}

fn check_th(th: f64) -> Result<()> {
    if th > 0.0 && th < 1.0 {
        Ok(())
    } else {
        Err(LearnError::Threshold(th))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bqa {
    pub threshold: f64,
    pub accuracy: f64,
    pub trials: usize,
    /// Trials whose truth never crosses the threshold.
    pub excluded: usize,
}

/// Breaking-quadrant accuracy over a batch of `(pred, truth)` pairs.
pub fn metric_bqa(pairs: &[(&[[f64; 4]], &[[f64; 4]])], th: f64) -> Result<Bqa> {
    check_th(th)?;
    let (mut hit, mut n, mut excluded) = (0, 0, 0);
    for (p, t) in pairs {
        let Some((_, qt)) = first_break(t, th) else {
            excluded += 1;
            continue;
        };
        n += 1;
        if first_break(p, th).map(|b| b.1) == Some(qt) {
            hit += 1;
        }
    }
    let accuracy = if n == 0 { 0.0 } else { hit as f64 / n as f64 };
    Ok(Bqa { threshold: th, accuracy, trials: n, excluded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mbte {
    pub threshold: f64,
    /// Median break-time error (ms); positive when the prediction breaks
    /// before the truth.
    pub median_ms: f64,
    pub iqr_ms: f64,
    pub trials: usize,
    /// Truth crosses but the prediction never does.
    pub missed: usize,
    pub excluded: usize,
    /// Per-trial errors in whole samples.
    pub errors: Vec<i64>,
}

/// Break-time error of one trial in samples: `t_truth − t_pred`.
pub fn break_time_error(pred: &[[f64; 4]], truth: &[[f64; 4]], th: f64) -> Option<Option<i64>> {
    let t = first_break(truth, th)?.0 as i64;
    Some(first_break(pred, th).map(|p| t - p.0 as i64))
}

/// Nearest-rank percentile of sorted integers.
fn percentile(sorted: &[i64], q: f64) -> i64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn metric_mbte(pairs: &[(&[[f64; 4]], &[[f64; 4]])], th: f64) -> Result<Mbte> {
    check_th(th)?;
    let (mut missed, mut excluded) = (0, 0);
    let mut errors = Vec::new();
    for (p, t) in pairs {
        match break_time_error(p, t, th) {
            None => excluded += 1,
            Some(None) => missed += 1,
            Some(Some(e)) => errors.push(e),
        }
    }
    let mut sorted = errors.clone();
    sorted.sort_unstable();
    let (median_ms, iqr_ms) = if sorted.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let med = percentile(&sorted, 0.5);
        let iqr = percentile(&sorted, 0.75) - percentile(&sorted, 0.25);
        (med as f64 * SAMPLE_MS, iqr as f64 * SAMPLE_MS)
    };
    Ok(Mbte { threshold: th, median_ms, iqr_ms, trials: errors.len(), missed, excluded, errors })
}

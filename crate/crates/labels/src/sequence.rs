//! Whole-sequence labelling on the pressure timeline.

use pneuma_sim::{Execution, Frame};
use serde::{Deserialize, Serialize};

use crate::center::{track_center, TrackOptions};
use crate::error::{LabelError, Result};
use crate::image::Intensity;
use crate::quadrant::{quadrant_contact_label, BandGeometry};

/// Largest allowed spacing between orientation samples (s).
pub const MAX_ORIENTATION_GAP: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Divide by the brightest pixel of the sequence.
    #[default]
    SequenceMax,
    /// Divide by 255.
    FullScale,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelOptions {
    pub band: BandGeometry,
    pub track: TrackOptions,
    pub normalization: Normalization,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrantLabel {
    pub t: f64,
    pub values: [f64; 4],
    pub center: (f64, f64),
}

/// Linear interpolation of `ys(xs)` at `x`, clamped at the ends.
pub(crate) fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 1 || x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

/// Yaw at each frame time from a sparse `(t, yaw)` series.
pub fn orientation_at(orientation: &[(f64, f64)], times: &[f64]) -> Result<Vec<f64>> {
    let Some(&(t0, _)) = orientation.first() else {
        return Err(LabelError::OrientationCoverage(times.first().copied().unwrap_or(0.0)));
    };
    for w in orientation.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap > MAX_ORIENTATION_GAP {
            return Err(LabelError::OrientationGap { at: w[0].0, gap });
        }
        if gap <= 0.0 {
            return Err(LabelError::Parse { what: "orientation".into(), detail: format!("time {} is not increasing", w[1].0) });
        }
    }
    let t1 = orientation.last().expect("non-empty").0;
    let ts: Vec<f64> = orientation.iter().map(|o| o.0).collect();
    let ys: Vec<f64> = orientation.iter().map(|o| o.1).collect();
    times
        .iter()
        .map(|&t| {
            if t < t0 - 1e-9 || t > t1 + 1e-9 {
                Err(LabelError::OrientationCoverage(t))
            } else {
                Ok(interp(&ts, &ys, t))
            }
        })
        .collect()
}

fn normalise(frames: &[Frame], mode: Normalization) -> Result<Vec<Intensity>> {
    let first = frames.first().ok_or(LabelError::EmptySequence)?;
    let want = (first.width, first.height);
    for f in frames {
        if (f.width, f.height) != want {
            return Err(LabelError::SizeMismatch { index: f.index, got: (f.width, f.height), want });
        }
    }
    let scale = match mode {
        Normalization::FullScale => 255.0,
        Normalization::SequenceMax => frames.iter().flat_map(|f| f.pixels.iter()).copied().max().unwrap_or(0) as f64,
    };
    Ok(frames.iter().map(|f| Intensity::from_frame(f, scale)).collect())
}

/// One label per frame, at the frame timestamps.
pub fn label_frames(frames: &[Frame], orientation: &[(f64, f64)], opts: &LabelOptions, exec: Execution) -> Result<Vec<QuadrantLabel>> {
    let imgs = normalise(frames, opts.normalization)?;
    let times: Vec<f64> = frames.iter().map(|f| f.t).collect();
    let yaw = orientation_at(orientation, &times)?;
    let track = track_center(&imgs, &opts.track)?;
    exec.map_indexed(imgs.len(), |i| {
        let values = quadrant_contact_label(&imgs[i], track.centers[i], yaw[i], &opts.band)?;
        Ok(QuadrantLabel { t: times[i], values, center: track.centers[i] })
    })
    .into_iter()
    .collect()
}

/// Frame labels resampled onto `timeline` (typically the pressure samples).
pub fn label_sequence(
    frames: &[Frame],
    orientation: &[(f64, f64)],
    timeline: &[f64],
    opts: &LabelOptions,
    exec: Execution,
) -> Result<Vec<QuadrantLabel>> {
    let per_frame = label_frames(frames, orientation, opts, exec)?;
    let ts: Vec<f64> = per_frame.iter().map(|l| l.t).collect();
    let series = |f: &dyn Fn(&QuadrantLabel) -> f64| per_frame.iter().map(f).collect::<Vec<f64>>();
    let cols: [Vec<f64>; 4] = std::array::from_fn(|k| series(&|l| l.values[k]));
    let cx = series(&|l| l.center.0);
    let cy = series(&|l| l.center.1);
    Ok(timeline
        .iter()
        .map(|&t| QuadrantLabel {
            t,
            values: std::array::from_fn(|k| interp(&ts, &cols[k], t)),
            center: (interp(&ts, &cx, t), interp(&ts, &cy, t)),
        })
        .collect())
}

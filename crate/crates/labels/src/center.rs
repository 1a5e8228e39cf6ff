//! Ring centre tracking.
//!
//! Each frame's centre comes from an intensity-weighted circle fit of known
//! radius to the bright ring pixels, which stays centred when only part of
//! the ring is lit. The first frame is seeded by an algebraic fit, later
//! frames by the previous centre. Frames whose ring energy falls below a
//! fraction of the first frame's are treated as lost and extrapolated from
//! the preceding centres.

use serde::{Deserialize, Serialize};

use crate::error::{LabelError, Result};
use crate::image::Intensity;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackOptions {
    /// Nominal ring radius (px).
    pub ring_radius: f64,
    /// Pixels at or above `max(floor, rel · frame peak)` belong to the ring.
    pub floor: f64,
    pub rel: f64,
    /// A first frame peaking below this has no ring.
    pub detect: f64,
    /// Lost-track threshold as a fraction of the first frame's ring energy.
    pub lost_fraction: f64,
    /// Centres used for extrapolation.
    pub history: usize,
    /// Moving-average length.
    pub smooth: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self { ring_radius: 48.0, floor: 0.1, rel: 0.3, detect: 0.2, lost_fraction: 0.2, history: 10, smooth: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterTrack {
    pub centers: Vec<(f64, f64)>,
    /// Frames whose centre was extrapolated.
    pub lost: Vec<bool>,
}

/// Ring pixels of a frame as `(x, y, weight)`.
fn ring_pixels(img: &Intensity, opts: &TrackOptions) -> Vec<(f64, f64, f64)> {
    let thr = opts.floor.max(opts.rel * img.max());
    let mut out = Vec::new();
    for y in 0..img.height {
        for x in 0..img.width {
            let w = img.get(x, y);
            if w >= thr {
                out.push((x as f64, y as f64, w));
            }
        }
    }
    out
}

/// Weighted algebraic (Kasa) circle fit.
fn kasa(pts: &[(f64, f64, f64)], origin: (f64, f64)) -> Option<(f64, f64)> {
    // Normal equations of min Σ w (D x + E y + F + x² + y²)².
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(x, y, w) in pts {
        let (px, py) = (x - origin.0, y - origin.1);
        let row = [px, py, 1.0];
        let z = -(px * px + py * py);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += w * row[i] * row[j];
            }
            b[i] += w * row[i] * z;
        }
    }
    solve3(a, b).map(|s| (origin.0 - 0.5 * s[0], origin.1 - 0.5 * s[1])).filter(|c| c.0.is_finite() && c.1.is_finite())
}

/// Weighted least-squares circle of radius `r` by fixed-point iteration.
fn fixed_radius(pts: &[(f64, f64, f64)], r: f64, mut c: (f64, f64)) -> (f64, f64) {
    let total: f64 = pts.iter().map(|p| p.2).sum();
    for _ in 0..100 {
        let (mut sx, mut sy) = (0.0, 0.0);
        for &(x, y, w) in pts {
            let (dx, dy) = (x - c.0, y - c.1);
            let d = dx.hypot(dy).max(1e-9);
            sx += w * (x - r * dx / d);
            sy += w * (y - r * dy / d);
        }
        let next = (sx / total, sy / total);
        let step = (next.0 - c.0).hypot(next.1 - c.1);
        c = next;
        if step < 1e-4 {
            break;
        }
    }
    c
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Least-squares line through `pts` (indexed by frame), evaluated at `at`.
fn extrapolate(pts: &[(usize, (f64, f64))], at: usize) -> (f64, f64) {
    if pts.len() < 2 {
        return pts.last().map_or((0.0, 0.0), |p| p.1);
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mx = pts.iter().map(|p| p.1 .0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1 .1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 as f64 - mt).powi(2)).sum();
    let sx: f64 = pts.iter().map(|p| (p.0 as f64 - mt) * (p.1 .0 - mx)).sum();
    let sy: f64 = pts.iter().map(|p| (p.0 as f64 - mt) * (p.1 .1 - my)).sum();
    let dt = at as f64 - mt;
    (mx + sx / stt * dt, my + sy / stt * dt)
}

/// Centre of the ring in every frame.
pub fn track_center(frames: &[Intensity], opts: &TrackOptions) -> Result<CenterTrack> {
    let first = frames.first().ok_or(LabelError::EmptySequence)?;
    if first.max() <= opts.detect {
        return Err(LabelError::NoRing(first.max()));
    }
    let origin = ((first.width as f64 - 1.0) / 2.0, (first.height as f64 - 1.0) / 2.0);
    let pts = ring_pixels(first, opts);
    let e0: f64 = pts.iter().map(|p| p.2).sum();
    let seed = kasa(&pts, origin).ok_or(LabelError::NoRing(first.max()))?;
    let mut raw = vec![fixed_radius(&pts, opts.ring_radius, seed)];
    let mut lost = vec![false];
    for (i, img) in frames.iter().enumerate().skip(1) {
        let pts = ring_pixels(img, opts);
        let e: f64 = pts.iter().map(|p| p.2).sum();
        if e > 0.0 && e >= opts.lost_fraction * e0 {
            raw.push(fixed_radius(&pts, opts.ring_radius, raw[i - 1]));
            lost.push(false);
        } else {
            let lo = i.saturating_sub(opts.history);
            let prev: Vec<(usize, (f64, f64))> = (lo..i).map(|j| (j, raw[j])).collect();
            raw.push(extrapolate(&prev, i));
            lost.push(true);
        }
    }
    let half = opts.smooth.max(1) / 2;
    let n = raw.len();
    let centers = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(half), (i + half + 1).min(n));
            let m = (b - a) as f64;
            let s = raw[a..b].iter().fold((0.0, 0.0), |s, c| (s.0 + c.0, s.1 + c.1));
            (s.0 / m, s.1 / m)
        })
        .collect();
    Ok(CenterTrack { centers, lost })
}

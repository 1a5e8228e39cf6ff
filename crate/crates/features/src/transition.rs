//! Large-transition detection on a feature series.

use serde::{Deserialize, Serialize};

/// Window over which a change counts as one transition (s).
pub const TRANSITION_WINDOW_S: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Midpoint of the merged span (s).
    pub time: f64,
    /// Largest windowed change inside the span.
    pub magnitude: f64,
    pub start: f64,
    pub end: f64,
}

/// Spans where the series changes by more than half of its full range
/// within `window_s`, merged when they overlap and reported at their
/// midpoints.
pub fn detect_transition_window(times: &[f64], series: &[f64], window_s: f64) -> Vec<Transition> {
    let n = series.len().min(times.len());
    if n == 0 {
        return vec![];
    }
    let (lo, hi) = series[..n].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let threshold = 0.5 * (hi - lo);
    if !(threshold > 0.0) {
        return vec![];
    }
    let mut events: Vec<Transition> = Vec::new();
    let mut end = 0usize;
    for i in 0..n {
        end = end.max(i);
        while end + 1 < n && times[end + 1] - times[i] <= window_s + 1e-12 {
            end += 1;
        }
        let (wlo, whi) = series[i..=end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let change = whi - wlo;
        if change > threshold {
            match events.last_mut() {
                Some(last) if times[i] <= last.end => {
                    last.end = last.end.max(times[end]);
                    last.magnitude = last.magnitude.max(change);
                }
                _ => events.push(Transition { time: 0.0, magnitude: change, start: times[i], end: times[end] }),
            }
        }
    }
    for e in &mut events {
        e.time = 0.5 * (e.start + e.end);
    }
    events
}

pub fn detect_transition(times: &[f64], series: &[f64]) -> Vec<Transition> {
    detect_transition_window(times, series, TRANSITION_WINDOW_S)
}

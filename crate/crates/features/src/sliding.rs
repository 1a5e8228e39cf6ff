//! Sliding-exploration profile: mean and left/right difference of |STFT₃₀|.

use pneuma_sim::scenario::{ScenarioKind, SlideModel, VacuumMode};
use pneuma_sim::surface::{LIP_RADIUS_MM, LIP_WIDTH_MM};
use pneuma_sim::{Trace, LEFT_PAIR, RIGHT_PAIR};
use serde::{Deserialize, Serialize};

use crate::error::{FeatureError, Result};
use crate::stft::{rate_of, stft_30, STFT_WINDOW};
use crate::transition::{detect_transition, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    HalfContact,
    FullTexture,
    TextureToSmooth,
    Generic,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::HalfContact => "half-contact",
            EventKind::FullTexture => "full-texture",
            EventKind::TextureToSmooth => "texture-to-smooth",
            EventKind::Generic => "generic",
        }
    }
}

/// Interval of the slide during which a contact change of `kind` happens.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Milestone {
    pub kind: EventKind,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlideEvent {
    pub transition: Transition,
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlidingProfile {
    pub times: Vec<f64>,
    pub ch_all: Vec<f64>,
    pub ch_left: Vec<f64>,
    pub ch_right: Vec<f64>,
    /// `ch_right − ch_left`.
    pub ch_diff: Vec<f64>,
    pub events: Vec<SlideEvent>,
}

/// Contact milestones of a slide at `speed_mm_s` under `model`.
pub fn slide_milestones(model: &SlideModel, speed_mm_s: f64) -> Vec<Milestone> {
    let at = |x: f64| model.start_s + x / speed_mm_s;
    let r = LIP_RADIUS_MM + 0.5 * LIP_WIDTH_MM;
    let w = model.texture_width_mm;
    vec![
        Milestone { kind: EventKind::HalfContact, start: model.vacuum_on_s, end: model.start_s },
        Milestone { kind: EventKind::FullTexture, start: model.start_s, end: at(r) },
        Milestone { kind: EventKind::TextureToSmooth, start: at(w - r), end: at(w + r) },
    ]
}

fn classify(t: &Transition, milestones: &[Milestone]) -> EventKind {
    const SLACK: f64 = 0.5;
    milestones
        .iter()
        .filter(|m| t.time >= m.start - SLACK && t.time <= m.end + SLACK)
        .min_by(|a, b| {
            let da = (t.time - 0.5 * (a.start + a.end)).abs();
            let db = (t.time - 0.5 * (b.start + b.end)).abs();
            da.total_cmp(&db)
        })
        .map_or(EventKind::Generic, |m| m.kind)
}

/// Build the sliding profile of a PWM trace. `milestones` labels detected
/// transitions; pass an empty slice to leave them generic.
pub fn sliding_profile(trace: &Trace, hop: usize, milestones: &[Milestone]) -> Result<SlidingProfile> {
    if let Some(meta) = &trace.meta {
        if meta.scenario.vacuum_mode == VacuumMode::Full {
            return Err(FeatureError::NoCarrier);
        }
    }
    let rate = rate_of(trace);
    let per_channel: Vec<Vec<f64>> =
        (0..4).map(|k| stft_30(&trace.channel(k), rate, hop)).collect::<Result<_>>()?;
    let n = per_channel[0].len();
    let half = (STFT_WINDOW - 1) / 2;
    let times: Vec<f64> = (0..n).map(|i| trace.t[i * hop + half]).collect();
    let mean_of = |ks: &[usize], i: usize| ks.iter().map(|&k| per_channel[k][i]).sum::<f64>() / ks.len() as f64;
    let ch_all: Vec<f64> = (0..n).map(|i| mean_of(&[0, 1, 2, 3], i)).collect();
    let ch_left: Vec<f64> = (0..n).map(|i| mean_of(&LEFT_PAIR, i)).collect();
    let ch_right: Vec<f64> = (0..n).map(|i| mean_of(&RIGHT_PAIR, i)).collect();
    let ch_diff = ch_right.iter().zip(&ch_left).map(|(r, l)| r - l).collect();
    let events = detect_transition(&times, &ch_all)
        .into_iter()
        .map(|transition| SlideEvent { kind: classify(&transition, milestones), transition })
        .collect();
    Ok(SlidingProfile { times, ch_all, ch_left, ch_right, ch_diff, events })
}

/// Milestones for a trace whose metadata names a slide scenario.
pub fn milestones_for(trace: &Trace, model: &SlideModel) -> Vec<Milestone> {
    match trace.meta.as_ref().map(|m| &m.scenario.kind) {
        Some(ScenarioKind::Slide { speed_mm_s, .. }) => slide_milestones(model, *speed_mm_s),
        _ => vec![],
    }
}

//! Frequency-domain tactile features for the four-chamber suction cup.
//!
//! The PWM valve drives the cup at 30 Hz; how much of that carrier reaches
//! each chamber is a measure of how well the lip seals. This crate extracts
//! the carrier magnitude over a steady window (|DFT₃₀|) or a sliding
//! Hamming window (|STFT₃₀|), aggregates chambers into the sliding profile,
//! detects large transitions and picks the surface normal from a palpation
//! sweep.

pub mod dft;
pub mod error;
pub mod palpation;
pub mod sliding;
pub mod stft;
pub mod transition;

pub use dft::{bin_index, dft_mag_at};
pub use error::{FeatureError, Result};
pub use palpation::{asymmetry, normal_seek, normal_seek_curves, steady_dft30, steady_mean, NormalSeek, SealClass, STEADY_WINDOW_S, SWEEP_ANGLES};
pub use sliding::{milestones_for, sliding_profile, slide_milestones, EventKind, Milestone, SlideEvent, SlidingProfile};
pub use stft::{hamming, stft_30, stft_30_channel, stft_at, SpectralFeature, PWM_HZ, STFT_WINDOW};
pub use transition::{detect_transition, detect_transition_window, Transition};

//! Per-quadrant contact labels from seal-ring frames.
//!
//! Frames show the lip of the cup as a bright annulus wherever it touches
//! the surface. A sequence is labelled by tracking the ring centre, cutting
//! the annulus into four quadrants aligned with the end-effector yaw, and
//! taking the weakest subsector of each quadrant as its contact state.

pub mod center;
pub mod error;
pub mod image;
pub mod io;
pub mod quadrant;
pub mod sequence;
pub mod stats;

pub use center::{track_center, CenterTrack, TrackOptions};
pub use error::{LabelError, Result};
pub use image::Intensity;
pub use quadrant::{quadrant_contact_label, BandGeometry};
pub use sequence::{label_frames, label_sequence, LabelOptions, Normalization, QuadrantLabel};
pub use stats::{break_stats, BreakStats, DEFAULT_THRESHOLDS};

mod common;

use common::{notch, ring};
use cup_labels::{label_frames, label_sequence, track_center, Intensity, LabelError, LabelOptions, TrackOptions};
use pneuma_sim::frame::{orientation_10hz, render_trace_frames};
use pneuma_sim::{render_seal_frame, sample_detach_batch, Execution, Frame, RenderOptions, SimConfig};

fn stamp(mut f: Frame, i: usize) -> Frame {
    f.index = i;
    f.t = i as f64 / 240.0;
    f
}

fn imgs(frames: &[Frame]) -> Vec<Intensity> {
    frames.iter().map(|f| Intensity::from_frame(f, 255.0)).collect()
}

#[test]
fn static_ring_stays_at_midpoint() {
    let o = RenderOptions::default();
    let frames: Vec<Frame> = (0..20).map(|i| render_seal_frame(&[1.0; 4], o.midpoint(), 0.0, &o, i).unwrap()).collect();
    let tr = track_center(&imgs(&frames), &TrackOptions::default()).unwrap();
    for c in tr.centers {
        assert!((c.0 - 63.5).abs() <= 0.5 && (c.1 - 63.5).abs() <= 0.5, "{c:?}");
    }
}

#[test]
fn translating_ring_slope() {
    let o = RenderOptions::default();
    let n = 40;
    let frames: Vec<Frame> =
        (0..n).map(|i| render_seal_frame(&[1.0; 4], (55.0 + 0.2 * i as f64, 60.0), 0.0, &o, i as u64).unwrap()).collect();
    let tr = track_center(&imgs(&frames), &TrackOptions::default()).unwrap();
    // Interior frames avoid the truncated smoothing window.
    let (a, b) = (2, n - 3);
    let slope = (tr.centers[b].0 - tr.centers[a].0) / (b - a) as f64;
    assert!((slope - 0.2).abs() <= 0.02, "{slope}");
}

#[test]
fn partial_ring_is_centred() {
    let o = RenderOptions::noiseless();
    let full = render_seal_frame(&[1.0; 4], (62.0, 65.0), 0.3, &o, 0).unwrap();
    for c in [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [0.0, 0.6, 0.0, 0.3]] {
        let f = render_seal_frame(&c, (60.0, 67.0), 0.3, &o, 0).unwrap();
        let opts = TrackOptions { smooth: 1, ..TrackOptions::default() };
        let tr = track_center(&imgs(&[full.clone(), f]), &opts).unwrap();
        let e = (tr.centers[1].0 - 60.0).hypot(tr.centers[1].1 - 67.0);
        assert!(e < 2.0, "{c:?}: {e}");
    }
}

#[test]
fn empty_first_frame_is_an_error() {
    let f = Frame::new(128, 128);
    assert!(matches!(track_center(&imgs(&[f]), &TrackOptions::default()), Err(LabelError::NoRing(_))));
}

#[test]
fn static_full_ring_labels_are_one() {
    let o = RenderOptions::default();
    let frames: Vec<Frame> = (0..10).map(|i| stamp(render_seal_frame(&[1.0; 4], o.midpoint(), 0.0, &o, i as u64).unwrap(), i)).collect();
    let timeline: Vec<f64> = (0..7).map(|i| i as f64 * 0.006).collect();
    let labels = label_sequence(&frames, &[(0.0, 0.0), (0.1, 0.0)], &timeline, &LabelOptions::default(), Execution::Sequential).unwrap();
    assert_eq!(labels.len(), 7);
    for l in labels {
        assert!(l.values.iter().all(|v| *v >= 0.95), "{l:?}");
    }
}

#[test]
fn orientation_ramp_moves_the_notch_across_two_channels() {
    let frames: Vec<Frame> = (0..46).map(|i| stamp(ring(notch(0.0, 10.0), (63.5, 63.5)), i)).collect();
    let end = frames.last().unwrap().t;
    let orient: Vec<(f64, f64)> = (0..=10).map(|i| (end * i as f64 / 10.0, std::f64::consts::FRAC_PI_2 * i as f64 / 10.0)).collect();
    let labels = label_frames(&frames, &orient, &LabelOptions::default(), Execution::Sequential).unwrap();
    let mut lows = std::collections::BTreeSet::new();
    for l in &labels {
        let k = (0..4).min_by(|&a, &b| l.values[a].total_cmp(&l.values[b])).unwrap();
        lows.insert(k);
    }
    assert_eq!(lows.into_iter().collect::<Vec<_>>(), vec![0, 3]);
    assert!(labels[0].values[0] <= 0.2 && labels[45].values[3] <= 0.2);
}

#[test]
fn orientation_must_cover_the_frames() {
    let frames: Vec<Frame> = (0..30).map(|i| stamp(ring(|_| 1.0, (63.5, 63.5)), i)).collect();
    let r = label_frames(&frames, &[(0.0, 0.0), (0.05, 0.0)], &LabelOptions::default(), Execution::Sequential);
    assert!(matches!(r, Err(LabelError::OrientationCoverage(_))));
    let r = label_frames(&frames, &[(0.0, 0.0), (0.6, 0.0)], &LabelOptions::default(), Execution::Sequential);
    assert!(matches!(r, Err(LabelError::OrientationGap { .. })));
}

#[test]
fn detachment_sequences_track_and_decay() {
    let cfg = SimConfig::default();
    let batch = sample_detach_batch(&cfg, 12, 21, Execution::Parallel).unwrap();
    let opts = RenderOptions { stride: 2, ..RenderOptions::default() };
    for trial in &batch {
        let seq = render_trace_frames(&trial.trace, &opts, trial.seed).unwrap();
        let orient = orientation_10hz(&trial.trace);
        let labels = label_frames(&seq.frames, &orient, &LabelOptions::default(), Execution::Parallel).unwrap();
        for (l, c) in labels.iter().zip(&seq.centers) {
            let e = (l.center.0 - c.0).hypot(l.center.1 - c.1);
            assert!(e < 5.0, "trial {}: t = {} error {e}", trial.index, l.t);
        }
        for k in 0..4 {
            let v: Vec<f64> = labels.iter().map(|l| l.values[k]).collect();
            let top = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
            let mut low = v[top];
            for &x in &v[top..] {
                assert!(x <= low + 0.1, "trial {} q{k}: {x} after {low}", trial.index);
                low = low.min(x);
            }
        }
        let last = labels.last().unwrap().values;
        let truth = trial.trace.contact[seq.frames.len() * 2 - 2];
        for k in 0..4 {
            assert!((last[k] - truth[k]).abs() < 0.1, "{last:?} vs {truth:?}");
        }
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let o = RenderOptions::default();
    let frames: Vec<Frame> = (0..12)
        .map(|i| stamp(render_seal_frame(&[1.0, 0.5, 1.0 - i as f64 / 12.0, 0.8], o.midpoint(), 0.1, &o, i as u64).unwrap(), i))
        .collect();
    let orient = [(0.0, 0.1), (0.1, 0.1)];
    let a = label_frames(&frames, &orient, &LabelOptions::default(), Execution::Sequential).unwrap();
    let b = label_frames(&frames, &orient, &LabelOptions::default(), Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

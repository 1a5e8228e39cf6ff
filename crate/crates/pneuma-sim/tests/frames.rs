use pneuma_sim::frame::render_trace_frames;
use pneuma_sim::{render_seal_frame, run_scenario, DetachParams, Frame, RenderOptions, Scenario, SimConfig};

/// Mean intensity of the ring band inside quadrant `k`, away from the
/// quadrant edges.
fn band_mean(f: &Frame, k: usize, center: (f64, f64)) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for y in 0..f.height {
        for x in 0..f.width {
            let (dx, dy) = (x as f64 - center.0, y as f64 - center.1);
            let r = dx.hypot(dy);
            if !(40.0..=56.0).contains(&r) {
                continue;
            }
            let a = dy.atan2(dx).to_degrees();
            let rel = (a - 90.0 * k as f64 + 540.0).rem_euclid(360.0) - 180.0;
            if rel.abs() < 30.0 {
                sum += f.intensity(x, y);
                n += 1;
            }
        }
    }
    sum / n as f64
}

#[test]
fn full_seal_is_a_bright_ring() {
    let o = RenderOptions::default();
    let f = render_seal_frame(&[1.0; 4], o.midpoint(), 0.0, &o, 3).unwrap();
    for k in 0..4 {
        assert!(band_mean(&f, k, o.midpoint()) >= 0.95);
    }
}

#[test]
fn broken_quadrant_is_dark() {
    let o = RenderOptions::default();
    let f = render_seal_frame(&[0.0, 1.0, 1.0, 1.0], o.midpoint(), 0.0, &o, 3).unwrap();
    assert!(band_mean(&f, 0, o.midpoint()) <= 0.1);
    assert!(band_mean(&f, 2, o.midpoint()) >= 0.95);
}

#[test]
fn trace_frames_follow_the_pose() {
    let cfg = SimConfig::default();
    let p = DetachParams { velocity_mm_s: [8.0, -5.0, 10.0], ..Default::default() };
    let tr = run_scenario(&cfg, &Scenario::detach(p), 4).unwrap();
    let opts = RenderOptions { stride: 3, ..RenderOptions::default() };
    let seq = render_trace_frames(&tr, &opts, 9).unwrap();
    assert_eq!(seq.frames.len(), tr.len().div_ceil(3));
    let (mx, my) = opts.midpoint();
    let last = seq.centers.last().unwrap();
    assert!(last.0 > mx && last.1 < my, "{last:?}");
    assert_eq!(seq.frames[1].t, tr.t[3]);
}

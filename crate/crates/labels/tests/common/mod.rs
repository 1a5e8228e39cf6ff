#![allow(dead_code)]

use pneuma_sim::Frame;
use std::f64::consts::PI;

/// Ring of radius 48 whose brightness at image azimuth `a` (deg) is `profile(a)`.
pub fn ring(profile: impl Fn(f64) -> f64, center: (f64, f64)) -> Frame {
    let mut f = Frame::new(128, 128);
    for y in 0..128 {
        for x in 0..128 {
            let (dx, dy) = (x as f64 - center.0, y as f64 - center.1);
            let d = (dx.hypot(dy) - 48.0).abs() - 10.0;
            let radial = if d <= 0.0 {
                1.0
            } else if d >= 2.0 {
                0.0
            } else {
                0.5 * (1.0 + (PI * d / 2.0).cos())
            };
            let a = dy.atan2(dx).to_degrees().rem_euclid(360.0);
            f.pixels[y * 128 + x] = (radial * profile(a) * 255.0).round() as u8;
        }
    }
    f
}

pub fn notch(centre_deg: f64, width_deg: f64) -> impl Fn(f64) -> f64 {
    move |a| {
        let d = (a - centre_deg + 540.0).rem_euclid(360.0) - 180.0;
        if d.abs() < width_deg / 2.0 {
            0.1
        } else {
            1.0
        }
    }
}

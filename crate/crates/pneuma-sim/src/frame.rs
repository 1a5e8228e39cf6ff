//! Synthetic FTIR seal-ring frames.
//!
//! The ring is an annulus whose brightness along azimuth equals the contact
//! state of the quadrant underneath. Where two quadrants meet, the brighter
//! value bleeds into the dimmer quadrant over a cosine blend, so the dim
//! quadrant's core and the whole bright quadrant keep their exact values.
//!
//! Pixel `(x, y)` has its centre at integer coordinates; azimuth is measured
//! from +x toward +y (row index), and the cup frame is rotated by the
//! orientation angle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{BufRead, Write};
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::rng::{derive_seed, rng_for, stream};
use crate::trace::Trace;
use crate::CHAMBERS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub width: usize,
    pub height: usize,
    /// Nominal ring radius (px).
    pub ring_radius: f64,
    /// Half-width of the flat bright band (px).
    pub half_width: f64,
    /// Width of the radial cosine edge outside the flat band (px).
    pub edge: f64,
    /// Azimuthal blend across quadrant boundaries (deg).
    pub blend_deg: f64,
    /// Additive pixel noise (fraction of full scale).
    pub noise: f64,
    pub noise_enabled: bool,
    /// Render every n-th trace sample.
    pub stride: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width: 128,
            height: 128,
            ring_radius: 48.0,
            half_width: 10.0,
            edge: 2.0,
            blend_deg: 10.0,
            noise: 0.02,
            noise_enabled: true,
            stride: 1,
        }
    }
}

impl RenderOptions {
    pub fn noiseless() -> Self {
        Self { noise_enabled: false, ..Self::default() }
    }

    pub fn midpoint(&self) -> (f64, f64) {
        ((self.width as f64 - 1.0) / 2.0, (self.height as f64 - 1.0) / 2.0)
    }

    fn radial(&self, r: f64) -> f64 {
        let d = (r - self.ring_radius).abs() - self.half_width;
        if d <= 0.0 {
            1.0
        } else if d >= self.edge {
            0.0
        } else {
            0.5 * (1.0 + (PI * d / self.edge).cos())
        }
    }
}

/// 8-bit grayscale raster.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub index: usize,
    pub t: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![0; width * height], index: 0, t: 0.0 }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Intensity in [0, 1].
    pub fn intensity(&self, x: usize, y: usize) -> f64 {
        self.get(x, y) as f64 / 255.0
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        Ok(())
    }

    pub fn read_pgm<R: BufRead>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let bad = |detail: &str| SimError::Parse { what: "pgm".into(), detail: detail.into() };
        // Header: magic, width, height, maxval, each separated by whitespace
        // with optional comments.
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        pos += 1;
        if fields[0] != "P5" {
            return Err(bad("only binary P5 is supported"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
        if fields[3] != "255" {
            return Err(bad("maxval must be 255"));
        }
        let end = pos + width * height;
        if bytes.len() < end {
            return Err(bad("truncated pixel data"));
        }
        Ok(Self { width, height, pixels: bytes[pos..end].to_vec(), index: 0, t: 0.0 })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_pgm(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_pgm(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Contact value seen at cup-frame azimuth `a` (rad).
pub fn azimuth_value(contact: &[f64; CHAMBERS], a: f64, blend_deg: f64) -> f64 {
    let quarter = FRAC_PI_2;
    let a = (a + quarter / 2.0).rem_euclid(TAU);
    let k = ((a / quarter) as usize).min(CHAMBERS - 1);
    let local = a - k as f64 * quarter;
    let own = contact[k];
    let blend = blend_deg.to_radians();
    let mut v = own;
    if blend > 0.0 {
        for (n, d) in [((k + CHAMBERS - 1) % CHAMBERS, local), ((k + 1) % CHAMBERS, quarter - local)] {
            let other = contact[n];
            if other > own && d < blend {
                v = v.max(own + (other - own) * 0.5 * (1.0 + (PI * d / blend).cos()));
            }
        }
    }
    v
}

/// Render one seal frame.
pub fn render_seal_frame(
    contact: &[f64; CHAMBERS],
    center: (f64, f64),
    orientation: f64,
    opts: &RenderOptions,
    seed: u64,
) -> Result<Frame> {
    let (cx, cy) = center;
    if !(cx >= 0.0 && cy >= 0.0 && cx <= (opts.width - 1) as f64 && cy <= (opts.height - 1) as f64) {
        return Err(SimError::CenterOutside { x: cx, y: cy, width: opts.width, height: opts.height });
    }
    if contact.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(SimError::Scenario(format!("contact outside [0, 1]: {contact:?}")));
    }
    let mut rng = rng_for(seed, stream::FRAMES);
    let noise = Normal::new(0.0, opts.noise.max(0.0)).expect("finite sigma");
    let mut frame = Frame::new(opts.width, opts.height);
    for y in 0..opts.height {
        for x in 0..opts.width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let radial = opts.radial(dx.hypot(dy));
            let mut v = if radial > 0.0 {
                radial * azimuth_value(contact, dy.atan2(dx) - orientation, opts.blend_deg)
            } else {
                0.0
            };
            if opts.noise_enabled && opts.noise > 0.0 {
                v += noise.sample(&mut rng);
            }
            frame.pixels[y * opts.width + x] = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    Ok(frame)
}

/// A trial's frame sequence with the ground truth used to draw it.
#[derive(Clone, Debug)]
pub struct FrameSequence {
    pub frames: Vec<Frame>,
    pub centers: Vec<(f64, f64)>,
    pub orientation: Vec<f64>,
}

/// Render every `opts.stride`-th sample of a detachment trace.
pub fn render_trace_frames(trace: &Trace, opts: &RenderOptions, seed: u64) -> Result<FrameSequence> {
    let (mx, my) = opts.midpoint();
    let stride = opts.stride.max(1);
    let mut seq = FrameSequence { frames: vec![], centers: vec![], orientation: vec![] };
    for (n, i) in (0..trace.len()).step_by(stride).enumerate() {
        let [yaw, dx, dy] = trace.pose[i];
        let center = (mx + dx, my + dy);
        let mut f = render_seal_frame(&trace.contact[i], center, yaw, opts, derive_seed(seed, n as u64))?;
        f.index = n;
        f.t = trace.t[i];
        seq.frames.push(f);
        seq.centers.push(center);
        seq.orientation.push(yaw);
    }
    Ok(seq)
}

/// Sample a trace's yaw at 10 Hz, covering the whole trace.
pub fn orientation_10hz(trace: &Trace) -> Vec<(f64, f64)> {
    if trace.is_empty() {
        return vec![];
    }
    let end = *trace.t.last().expect("non-empty");
    let n = (end / 0.1).ceil() as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 / 10.0;
            (t, interp(&trace.t, &trace.pose.iter().map(|p| p[0]).collect::<Vec<_>>(), t))
        })
        .collect()
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_ring_is_bright() {
        let o = RenderOptions::noiseless();
        let f = render_seal_frame(&[1.0; 4], o.midpoint(), 0.0, &o, 0).unwrap();
        let (cx, cy) = o.midpoint();
        for deg in (0..360).step_by(7) {
            let a = (deg as f64).to_radians();
            let x = (cx + 48.0 * a.cos()).round() as usize;
            let y = (cy + 48.0 * a.sin()).round() as usize;
            assert_eq!(f.get(x, y), 255);
        }
        assert_eq!(f.get(64, 64), 0);
    }

    #[test]
    fn dark_quadrant_away_from_blend() {
        let o = RenderOptions::noiseless();
        let (cx, cy) = o.midpoint();
        let f = render_seal_frame(&[0.0, 1.0, 1.0, 1.0], o.midpoint(), 0.0, &o, 0).unwrap();
        for deg in -34..=34 {
            let a = (deg as f64).to_radians();
            let x = (cx + 48.0 * a.cos()).round() as usize;
            let y = (cy + 48.0 * a.sin()).round() as usize;
            assert!(f.intensity(x, y) <= 0.1, "{deg}");
        }
    }

    #[test]
    fn blend_only_on_dim_side() {
        let c = [0.2, 0.9, 0.9, 0.9];
        assert_eq!(azimuth_value(&c, 44f64.to_radians(), 10.0), (0.2 + 0.7 * 0.5 * (1.0 + (PI * 0.1).cos())));
        assert_eq!(azimuth_value(&c, 46f64.to_radians(), 10.0), 0.9);
        assert_eq!(azimuth_value(&c, 20f64.to_radians(), 10.0), 0.2);
    }

    #[test]
    fn center_outside_rejected() {
        let o = RenderOptions::default();
        assert!(matches!(
            render_seal_frame(&[1.0; 4], (-1.0, 10.0), 0.0, &o, 0),
            Err(SimError::CenterOutside { .. })
        ));
    }

    #[test]
    fn pgm_round_trip() {
        let o = RenderOptions::default();
        let f = render_seal_frame(&[0.3, 0.6, 0.9, 1.0], (60.0, 70.0), 0.4, &o, 5).unwrap();
        let mut buf = Vec::new();
        f.write_pgm(&mut buf).unwrap();
        let back = Frame::read_pgm(&buf[..]).unwrap();
        assert_eq!(back.pixels, f.pixels);
        assert_eq!((back.width, back.height), (128, 128));
    }
}

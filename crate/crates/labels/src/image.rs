use pneuma_sim::Frame;

/// Intensity raster with values in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Intensity {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Intensity {
    /// Pixels divided by `scale` (the brightest value of the sequence, or
    /// 255 for full scale), clamped to [0, 1].
    pub fn from_frame(frame: &Frame, scale: f64) -> Self {
        let s = scale.max(1.0);
        Self {
            width: frame.width,
            height: frame.height,
            data: frame.pixels.iter().map(|&p| (p as f64 / s).min(1.0)).collect(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= (self.width - 1) as f64 && y <= (self.height - 1) as f64
    }

    /// Bilinear sample; `None` outside the raster.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        if !self.contains(x, y) {
            return None;
        }
        let x0 = (x.floor() as usize).min(self.width - 1);
        let y0 = (y.floor() as usize).min(self.height - 1);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bottom = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        Some(top * (1.0 - fy) + bottom * fy)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }
}

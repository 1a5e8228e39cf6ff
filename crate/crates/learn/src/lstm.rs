//! Stacked LSTM with an affine output head, batched over trials.
//!
//! Rows of every activation matrix are ordered `t * batch + b`, so one
//! time step is a contiguous block of `batch` rows. Input projections of
//! all steps are computed in a single product before the recurrence.

use std::fmt::Debug;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis, LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Element type of network parameters and activations.
pub trait Real:
    LinalgScalar + ScalarOperand + Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + Serialize + DeserializeOwned + 'static
{
    fn act_tanh(self) -> Self;

    fn act_sigmoid(self) -> Self {
        let half = Self::from_f64(0.5).expect("representable");
        half + half * (half * self).act_tanh()
    }
}

impl Real for f32 {
    /// Rational approximation, accurate to a few ulp in single precision.
    fn act_tanh(self) -> f32 {
        let x = self.clamp(-9.0, 9.0);
        let x2 = x * x;
        let p = x2 * -2.760_768_5e-16 + 2.000_187_9e-13;
        let p = x2 * p + -8.604_671_5e-11;
        let p = x2 * p + 5.122_297e-8;
        let p = x2 * p + 1.485_722_4e-5;
        let p = x2 * p + 6.372_619_3e-4;
        let p = x2 * p + 4.893_524_6e-3;
        let q = x2 * 1.198_258_4e-6 + 1.185_347_1e-4;
        let q = x2 * q + 2.268_434_6e-3;
        let q = x2 * q + 4.893_525e-3;
        x * p / q
    }
}

impl Real for f64 {
    fn act_tanh(self) -> f64 {
        self.tanh()
    }
}

fn r<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("representable")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LstmLayer<T> {
    /// `input × 4H`, gate blocks ordered i, f, g, o.
    pub wx: Array2<T>,
    /// `H × 4H`.
    pub wh: Array2<T>,
    pub b: Array1<T>,
}

impl<T: Real> LstmLayer<T> {
    fn new(input: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let k = 1.0 / (hidden as f64).sqrt();
        let mut u = || r::<T>(rng.random_range(-k..k));
        let wx = Array2::from_shape_fn((input, 4 * hidden), |_| u());
        let wh = Array2::from_shape_fn((hidden, 4 * hidden), |_| u());
        let mut b = Array1::from_shape_fn(4 * hidden, |_| u());
        b.slice_mut(s![hidden..2 * hidden]).mapv_inplace(|v| v + T::one());
        Self { wx, wh, b }
    }

    fn zeros_like(&self) -> Self {
        Self { wx: Array2::zeros(self.wx.raw_dim()), wh: Array2::zeros(self.wh.raw_dim()), b: Array1::zeros(self.b.raw_dim()) }
    }

    pub fn hidden(&self) -> usize {
        self.wh.nrows()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Lstm<T> {
    pub layers: Vec<LstmLayer<T>>,
    /// `H × outputs`.
    pub wy: Array2<T>,
    pub by: Array1<T>,
}

/// Per-layer forward activations kept for backpropagation.
struct LayerCache<T> {
    /// Post-activation gates, `TB × 4H`.
    gates: Array2<T>,
    c: Array2<T>,
    tanh_c: Array2<T>,
    h: Array2<T>,
}

pub struct Forward<T> {
    caches: Vec<LayerCache<T>>,
    /// `TB × outputs`.
    pub y: Array2<T>,
}

impl<T: Real> Lstm<T> {
    pub fn new(input: usize, hidden: usize, layers: usize, outputs: usize, rng: &mut impl Rng) -> Self {
        let layers = (0..layers).map(|l| LstmLayer::new(if l == 0 { input } else { hidden }, hidden, rng)).collect();
        let k = 1.0 / (hidden as f64).sqrt();
        let wy = Array2::from_shape_fn((hidden, outputs), |_| r::<T>(rng.random_range(-k..k)));
        let by = Array1::from_shape_fn(outputs, |_| r::<T>(rng.random_range(-k..k)));
        Self { layers, wy, by }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self.layers.iter().map(LstmLayer::zeros_like).collect(),
            wy: Array2::zeros(self.wy.raw_dim()),
            by: Array1::zeros(self.by.raw_dim()),
        }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].wx.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.layers[0].hidden()
    }

    pub fn outputs(&self) -> usize {
        self.wy.ncols()
    }

    pub fn param_count(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn slices(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.push(l.wx.as_slice().expect("standard layout"));
            out.push(l.wh.as_slice().expect("standard layout"));
            out.push(l.b.as_slice().expect("standard layout"));
        }
        out.push(self.wy.as_slice().expect("standard layout"));
        out.push(self.by.as_slice().expect("standard layout"));
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.push(l.wx.as_slice_mut().expect("standard layout"));
            out.push(l.wh.as_slice_mut().expect("standard layout"));
            out.push(l.b.as_slice_mut().expect("standard layout"));
        }
        out.push(self.wy.as_slice_mut().expect("standard layout"));
        out.push(self.by.as_slice_mut().expect("standard layout"));
        out
    }

    /// Run `x` (`steps·batch × input`) through the network.
    pub fn forward(&self, x: ArrayView2<T>, batch: usize) -> Forward<T> {
        let steps = x.nrows() / batch;
        let mut caches: Vec<LayerCache<T>> = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate() {
            let input = if li == 0 { x } else { caches[li - 1].h.view() };
            caches.push(layer_forward(layer, input, batch, steps));
        }
        let top = &caches.last().expect("at least one layer").h;
        let y = top.dot(&self.wy) + &self.by;
        Forward { caches, y }
    }

    /// Gradient of the loss given `dy = ∂L/∂y`; returns parameter gradients.
    pub fn backward(&self, x: ArrayView2<T>, batch: usize, fw: &Forward<T>, dy: &Array2<T>) -> Lstm<T> {
        let mut g = self.zeros_like();
        let top = &fw.caches.last().expect("at least one layer").h;
        g.wy = top.t().dot(dy);
        g.by = dy.sum_axis(Axis(0));
        let mut dh = dy.dot(&self.wy.t());
        for li in (0..self.layers.len()).rev() {
            let input = if li == 0 { x } else { fw.caches[li - 1].h.view() };
            let need_dx = li > 0;
            dh = layer_backward(&self.layers[li], &mut g.layers[li], input, &fw.caches[li], batch, &dh, need_dx);
        }
        g
    }
}

fn layer_forward<T: Real>(layer: &LstmLayer<T>, x: ArrayView2<T>, batch: usize, steps: usize) -> LayerCache<T> {
    let hd = layer.hidden();
    let rows = x.nrows();
    let mut gates = x.dot(&layer.wx) + &layer.b;
    let mut c = Array2::zeros((rows, hd));
    let mut tanh_c = Array2::zeros((rows, hd));
    let mut h = Array2::<T>::zeros((rows, hd));
    for t in 0..steps {
        if t > 0 {
            let hp = h.slice(s![(t - 1) * batch..t * batch, ..]);
            let mut z = gates.slice_mut(s![t * batch..(t + 1) * batch, ..]);
            general_mat_mul(T::one(), &hp, &layer.wh, T::one(), &mut z);
        }
        let gs = gates.as_slice_mut().expect("standard layout");
        let cs = c.as_slice_mut().expect("standard layout");
        let ts = tanh_c.as_slice_mut().expect("standard layout");
        let hs = h.as_slice_mut().expect("standard layout");
        for b in 0..batch {
            let row = t * batch + b;
            let z = &mut gs[row * 4 * hd..(row + 1) * 4 * hd];
            let (zi, rest) = z.split_at_mut(hd);
            let (zf, rest) = rest.split_at_mut(hd);
            let (zg, zo) = rest.split_at_mut(hd);
            let (before, now) = cs.split_at_mut(row * hd);
            let cp: &[T] = if t > 0 { &before[(row - batch) * hd..(row - batch + 1) * hd] } else { &[] };
            let ct = &mut now[..hd];
            let tc = &mut ts[row * hd..(row + 1) * hd];
            let ht = &mut hs[row * hd..(row + 1) * hd];
            for j in 0..hd {
                let i = zi[j].act_sigmoid();
                let f = zf[j].act_sigmoid();
                let g = zg[j].act_tanh();
                let o = zo[j].act_sigmoid();
                zi[j] = i;
                zf[j] = f;
                zg[j] = g;
                zo[j] = o;
                let prev = if t > 0 { cp[j] } else { T::zero() };
                let cv = f * prev + i * g;
                let tv = cv.act_tanh();
                ct[j] = cv;
                tc[j] = tv;
                ht[j] = o * tv;
            }
        }
    }
    LayerCache { gates, c, tanh_c, h }
}

/// Accumulates into `grad` and returns `∂L/∂x` when `need_dx`.
fn layer_backward<T: Real>(
    layer: &LstmLayer<T>,
    grad: &mut LstmLayer<T>,
    x: ArrayView2<T>,
    cache: &LayerCache<T>,
    batch: usize,
    dh_above: &Array2<T>,
    need_dx: bool,
) -> Array2<T> {
    let hd = layer.hidden();
    let rows = x.nrows();
    let steps = rows / batch;
    let one = T::one();
    let mut dz = Array2::<T>::zeros((rows, 4 * hd));
    let mut dh_next = Array2::<T>::zeros((batch, hd));
    let mut dc_next = Array2::<T>::zeros((batch, hd));
    let gs = cache.gates.as_slice().expect("standard layout");
    let cs = cache.c.as_slice().expect("standard layout");
    let ts = cache.tanh_c.as_slice().expect("standard layout");
    let above = dh_above.as_slice().expect("standard layout");
    for t in (0..steps).rev() {
        {
            let dzs = dz.as_slice_mut().expect("standard layout");
            let dhn = dh_next.as_slice().expect("standard layout");
            let dcn = dc_next.as_slice_mut().expect("standard layout");
            for b in 0..batch {
                let row = t * batch + b;
                let gz = &gs[row * 4 * hd..(row + 1) * 4 * hd];
                let d = &mut dzs[row * 4 * hd..(row + 1) * 4 * hd];
                let tc = &ts[row * hd..(row + 1) * hd];
                let cp: &[T] = if t > 0 { &cs[(row - batch) * hd..(row - batch + 1) * hd] } else { &[] };
                let dha = &above[row * hd..(row + 1) * hd];
                let dhn = &dhn[b * hd..(b + 1) * hd];
                let dcn = &mut dcn[b * hd..(b + 1) * hd];
                for j in 0..hd {
                    let (i, f, g, o) = (gz[j], gz[hd + j], gz[2 * hd + j], gz[3 * hd + j]);
                    let tv = tc[j];
                    let prev = if t > 0 { cp[j] } else { T::zero() };
                    let dh = dha[j] + dhn[j];
                    let dc = dh * o * (one - tv * tv) + dcn[j];
                    d[j] = dc * g * i * (one - i);
                    d[hd + j] = dc * prev * f * (one - f);
                    d[2 * hd + j] = dc * i * (one - g * g);
                    d[3 * hd + j] = dh * tv * o * (one - o);
                    dcn[j] = dc * f;
                }
            }
        }
        let dzt = dz.slice(s![t * batch..(t + 1) * batch, ..]);
        general_mat_mul(one, &dzt, &layer.wh.t(), T::zero(), &mut dh_next);
    }
    // Hidden state entering each step: zero at t = 0.
    if steps > 1 {
        let hp = cache.h.slice(s![..(steps - 1) * batch, ..]);
        let dzs = dz.slice(s![batch.., ..]);
        general_mat_mul(one, &hp.t(), &dzs, one, &mut grad.wh);
    }
    general_mat_mul(one, &x.t(), &dz, one, &mut grad.wx);
    grad.b.zip_mut_with(&dz.sum_axis(Axis(0)), |a, &b| *a = *a + b);
    if need_dx {
        dz.dot(&layer.wx.t())
    } else {
        Array2::zeros((0, 0))
    }
}

/// Masked mean squared error and its gradient with respect to `y`.
pub fn masked_mse<T: Real>(y: &Array2<T>, target: &Array2<T>, mask: &[bool]) -> (f64, Array2<T>) {
    let count = mask.iter().filter(|m| **m).count() * y.ncols();
    let mut dy = Array2::zeros(y.raw_dim());
    if count == 0 {
        return (0.0, dy);
    }
    let scale = r::<T>(2.0 / count as f64);
    let mut loss = 0.0;
    for (row, _) in mask.iter().enumerate().filter(|(_, m)| **m) {
        for k in 0..y.ncols() {
            let e = y[[row, k]] - target[[row, k]];
            let e64 = e.to_f64().unwrap_or(f64::NAN);
            loss += e64 * e64;
            dy[[row, k]] = scale * e;
        }
    }
    (loss / count as f64, dy)
}

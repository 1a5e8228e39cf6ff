//! Recurrent-model training: full-trial BPTT with Adam and best-epoch
//! selection on the validation trials.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{horizon_steps, SeqDataset, Trial, Variant, OUTPUT_WIDTH};
use crate::error::{LearnError, Result};
use crate::lstm::{masked_mse, Lstm};
use crate::metrics::metric_mse;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Trials per optimisation step.
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Final learning rate as a share of the initial one (cosine decay).
    pub lr_floor: f64,
    pub hidden: usize,
    pub layers: usize,
    /// Global gradient-norm cap.
    pub clip_norm: Option<f64>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 30, batch_size: 8, learning_rate: 3e-3, lr_floor: 0.1, hidden: 200, layers: 2, clip_norm: Some(1.0), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrentModel {
    pub variant: Variant,
    pub horizon_ms: f64,
    pub net: Lstm<f32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub val_mse: Vec<f64>,
    pub best_epoch: usize,
}

pub struct Adam {
    lr: f32,
    m: Vec<Vec<f32>>,
    v: Vec<Vec<f32>>,
    t: i32,
}

impl Adam {
    const B1: f32 = 0.9;
    const B2: f32 = 0.999;
    const EPS: f32 = 1e-8;

    pub fn new(shapes: &[&[f32]], lr: f64) -> Self {
        let zeros = || shapes.iter().map(|s| vec![0.0; s.len()]).collect();
        Self { lr: lr as f32, m: zeros(), v: zeros(), t: 0 }
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.lr = lr as f32;
    }

    pub fn step(&mut self, params: Vec<&mut [f32]>, grads: &[&[f32]], scale: f32) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for (((p, g), m), v) in params.into_iter().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            for i in 0..p.len() {
                let gi = g[i] * scale;
                m[i] = Self::B1 * m[i] + (1.0 - Self::B1) * gi;
                v[i] = Self::B2 * v[i] + (1.0 - Self::B2) * gi * gi;
                p[i] -= self.lr * (m[i] / c1) / ((v[i] / c2).sqrt() + Self::EPS);
            }
        }
    }
}

/// Stack trials time-major into one padded batch.
pub fn assemble(xs: &[&Array2<f32>], ys: &[&Array2<f32>]) -> (Array2<f32>, Array2<f32>, Vec<bool>) {
    let b = xs.len();
    let steps = xs.iter().map(|x| x.nrows()).max().unwrap_or(0);
    let width = xs.first().map_or(0, |x| x.ncols());
    let mut x = Array2::zeros((steps * b, width));
    let mut y = Array2::zeros((steps * b, OUTPUT_WIDTH));
    let mut mask = vec![false; steps * b];
    for (j, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        for t in 0..xi.nrows() {
            x.row_mut(t * b + j).assign(&xi.row(t));
            y.row_mut(t * b + j).assign(&yi.row(t));
            mask[t * b + j] = true;
        }
    }
    (x, y, mask)
}

/// Batches of similar length: shuffle, sort inside large chunks, then
/// shuffle the batch order.
fn make_batches(lens: &[usize], batch: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..lens.len()).collect();
    idx.shuffle(rng);
    let mut out = Vec::new();
    for chunk in idx.chunks(batch * 8) {
        let mut c = chunk.to_vec();
        c.sort_by_key(|&i| lens[i]);
        out.extend(c.chunks(batch).map(|c| c.to_vec()));
    }
    out.shuffle(rng);
    out
}

impl RecurrentModel {
    /// One estimate per input row.
    pub fn predict_many(&self, inputs: &[&Array2<f64>]) -> Result<Vec<Vec<[f64; 4]>>> {
        let w = self.net.input_width();
        if let Some(x) = inputs.iter().find(|x| x.ncols() != w) {
            return Err(LearnError::WidthMismatch { want: w, got: x.ncols() });
        }
        let xs: Vec<Array2<f32>> = inputs.iter().map(|x| x.mapv(|v| v as f32)).collect();
        self.predict_f32(&xs)
    }

    fn predict_f32(&self, xs: &[Array2<f32>]) -> Result<Vec<Vec<[f64; 4]>>> {
        let mut out = Vec::with_capacity(xs.len());
        for chunk in xs.chunks(64) {
            let refs: Vec<&Array2<f32>> = chunk.iter().collect();
            let ys: Vec<Array2<f32>> = chunk.iter().map(|x| Array2::zeros((x.nrows(), OUTPUT_WIDTH))).collect();
            let yr: Vec<&Array2<f32>> = ys.iter().collect();
            let (x, _, _) = assemble(&refs, &yr);
            let b = chunk.len();
            let y = self.net.forward(x.view(), b).y;
            for (j, xi) in chunk.iter().enumerate() {
                out.push((0..xi.nrows()).map(|t| std::array::from_fn(|k| y[[t * b + j, k]] as f64)).collect());
            }
        }
        Ok(out)
    }
}

fn to_rows(a: &Array2<f32>) -> Vec<[f64; 4]> {
    a.rows().into_iter().map(|r| std::array::from_fn(|k| r[k] as f64)).collect()
}

/// Mean per-trial MSE of `model` on prepared trials.
fn mean_mse(model: &RecurrentModel, xs: &[Array2<f32>], ys: &[Array2<f32>]) -> Result<f64> {
    let preds = model.predict_f32(xs)?;
    let mut s = 0.0;
    for (p, y) in preds.iter().zip(ys) {
        s += metric_mse(p, &to_rows(y))?;
    }
    Ok(s / xs.len() as f64)
}

fn prepare(trials: &[&Trial], variant: Variant, steps: usize) -> (Vec<Array2<f32>>, Vec<Array2<f32>>) {
    let f = |a: Array2<f64>| a.mapv(|v| v as f32);
    (
        trials.iter().map(|t| f(t.variant_inputs(variant))).collect(),
        trials.iter().map(|t| f(t.shifted_targets(steps))).collect(),
    )
}

pub fn train_recurrent(ds: &SeqDataset, variant: Variant, h_ms: f64, cfg: &TrainConfig) -> Result<(RecurrentModel, TrainReport)> {
    let steps = horizon_steps(h_ms)?;
    if cfg.epochs == 0 || cfg.batch_size == 0 || cfg.hidden == 0 || cfg.layers == 0 {
        return Err(LearnError::Config("epochs, batch size, hidden width and layer count must be positive".into()));
    }
    if ds.split.train.is_empty() {
        return Err(LearnError::EmptySplit("train"));
    }
    let val_idx = if ds.split.val.is_empty() { &ds.split.train } else { &ds.split.val };
    let (tx, ty) = prepare(&ds.subset(&ds.split.train), variant, steps);
    let (vx, vy) = prepare(&ds.subset(val_idx), variant, steps);
    let lens: Vec<usize> = tx.iter().map(|x| x.nrows()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model =
        RecurrentModel { variant, horizon_ms: h_ms, net: Lstm::new(variant.width(), cfg.hidden, cfg.layers, OUTPUT_WIDTH, &mut rng) };
    let mut adam = Adam::new(&model.net.slices(), cfg.learning_rate);
    let mut report = TrainReport::default();
    let mut best = (f64::INFINITY, model.net.clone());
    for epoch in 0..cfg.epochs {
        let progress = if cfg.epochs > 1 { epoch as f64 / (cfg.epochs - 1) as f64 } else { 0.0 };
        let decay = cfg.lr_floor + (1.0 - cfg.lr_floor) * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos());
        adam.set_lr(cfg.learning_rate * decay);
        let mut total = 0.0;
        let batches = make_batches(&lens, cfg.batch_size, &mut rng);
        for (bi, batch) in batches.iter().enumerate() {
            let bx: Vec<&Array2<f32>> = batch.iter().map(|&i| &tx[i]).collect();
            let by: Vec<&Array2<f32>> = batch.iter().map(|&i| &ty[i]).collect();
            let (x, y, mask) = assemble(&bx, &by);
            let fw = model.net.forward(x.view(), batch.len());
            let (loss, dy) = masked_mse(&fw.y, &y, &mask);
            if !loss.is_finite() {
                return Err(LearnError::NonFinite { epoch, batch: bi });
            }
            total += loss;
            let g = model.net.backward(x.view(), batch.len(), &fw, &dy);
            let gs = g.slices();
            let norm = gs.iter().flat_map(|s| s.iter()).map(|&v| v as f64 * v as f64).sum::<f64>().sqrt();
            if !norm.is_finite() {
                return Err(LearnError::NonFinite { epoch, batch: bi });
            }
            let scale = match cfg.clip_norm {
                Some(c) if norm > c => (c / norm) as f32,
                _ => 1.0,
            };
            adam.step(model.net.slices_mut(), &gs, scale);
        }
        report.train_loss.push(total / batches.len() as f64);
        let v = mean_mse(&model, &vx, &vy)?;
        report.val_mse.push(v);
        if v < best.0 {
            best = (v, model.net.clone());
            report.best_epoch = epoch;
        }
    }
    model.net = best.1;
    Ok((model, report))
}

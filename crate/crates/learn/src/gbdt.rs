//! Histogram gradient-boosted regression trees on sliding windows.
//!
//! Each output channel gets its own additive ensemble fitted to the
//! squared error. Features are quantile-binned once; splits maximise the
//! regularised variance reduction over bin boundaries.

use pneuma_sim::Execution;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Histogram bins per feature (≤ 256).
    pub bins: usize,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { rounds: 50, max_depth: 5, learning_rate: 1.0, bins: 64, lambda: 1.0, min_leaf: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// `None` for leaves.
    pub feature: Option<u32>,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            let n = &self.nodes[i];
            match n.feature {
                None => return n.value,
                Some(f) => i = if x[f as usize] <= n.threshold { n.left } else { n.right } as usize,
            }
        }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            let n = &t.nodes[i];
            match n.feature {
                None => 0,
                Some(_) => 1 + go(t, n.left as usize).max(go(t, n.right as usize)),
            }
        }
        go(self, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub base: f64,
    pub trees: Vec<Tree>,
}

impl Ensemble {
    /// Base score plus the sum of leaf values.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Quantile bin boundaries of one feature.
fn cut_points(values: &mut [f64], bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut cuts: Vec<f64> = (1..bins).map(|b| values[(b * n / bins).min(n - 1)]).collect();
    cuts.dedup();
    // The largest value needs no boundary above it.
    if cuts.last() == values.last() {
        cuts.pop();
    }
    cuts
}

/// Feature matrix in bin space.
struct Binned {
    rows: usize,
    features: usize,
    bins: Vec<u8>,
    cuts: Vec<Vec<f64>>,
}

impl Binned {
    fn new(x: &[f64], features: usize, bins: usize) -> Self {
        let rows = x.len() / features;
        let bins = bins.clamp(2, 256);
        let cuts: Vec<Vec<f64>> = (0..features)
            .map(|f| {
                let stride = (rows / 50_000).max(1);
                let mut col: Vec<f64> = (0..rows).step_by(stride).map(|r| x[r * features + f]).collect();
                cut_points(&mut col, bins)
            })
            .collect();
        let mut out = vec![0u8; rows * features];
        for r in 0..rows {
            for f in 0..features {
                out[r * features + f] = cuts[f].partition_point(|&c| c < x[r * features + f]) as u8;
            }
        }
        Self { rows, features, bins: out, cuts }
    }
}

struct Grower<'a> {
    data: &'a Binned,
    grad: &'a [f64],
    cfg: &'a TreeConfig,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn leaf(&mut self, g: f64, n: usize) -> u32 {
        let value = self.cfg.learning_rate * g / (n as f64 + self.cfg.lambda);
        self.nodes.push(Node { feature: None, threshold: 0.0, left: 0, right: 0, value });
        (self.nodes.len() - 1) as u32
    }

    fn grow(&mut self, rows: Vec<u32>, depth: usize) -> u32 {
        let lam = self.cfg.lambda;
        let g: f64 = rows.iter().map(|&r| self.grad[r as usize]).sum();
        let n = rows.len();
        if depth >= self.cfg.max_depth || n < 2 * self.cfg.min_leaf.max(1) {
            return self.leaf(g, n);
        }
        let nf = self.data.features;
        let nb = 256;
        let mut hg = vec![0.0; nf * nb];
        let mut hn = vec![0u32; nf * nb];
        for &r in &rows {
            let row = &self.data.bins[r as usize * nf..(r as usize + 1) * nf];
            let gr = self.grad[r as usize];
            for (f, &b) in row.iter().enumerate() {
                hg[f * nb + b as usize] += gr;
                hn[f * nb + b as usize] += 1;
            }
        }
        let parent = g * g / (n as f64 + lam);
        let mut best: Option<(f64, usize, usize)> = None;
        for f in 0..nf {
            let (mut gl, mut nl) = (0.0, 0usize);
            for b in 0..self.data.cuts[f].len() {
                gl += hg[f * nb + b];
                nl += hn[f * nb + b] as usize;
                let nr = n - nl;
                if nl < self.cfg.min_leaf.max(1) || nr < self.cfg.min_leaf.max(1) {
                    continue;
                }
                let gr = g - gl;
                let gain = gl * gl / (nl as f64 + lam) + gr * gr / (nr as f64 + lam) - parent;
                if gain > 1e-12 && best.is_none_or(|(bg, _, _)| gain > bg) {
                    best = Some((gain, f, b));
                }
            }
        }
        let Some((_, f, b)) = best else {
            return self.leaf(g, n);
        };
        let (left, right): (Vec<u32>, Vec<u32>) = rows.into_iter().partition(|&r| self.data.bins[r as usize * nf + f] as usize <= b);
        let id = self.nodes.len();
        self.nodes.push(Node { feature: Some(f as u32), threshold: self.data.cuts[f][b], left: 0, right: 0, value: 0.0 });
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id].left = l;
        self.nodes[id].right = r;
        id as u32
    }
}

fn fit_ensemble(data: &Binned, x: &[f64], y: &[f64], cfg: &TreeConfig) -> Ensemble {
    let nf = data.features;
    let base = y.iter().sum::<f64>() / y.len() as f64;
    let mut pred = vec![base; y.len()];
    let mut trees = Vec::with_capacity(cfg.rounds);
    for _ in 0..cfg.rounds {
        let grad: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let mut grower = Grower { data, grad: &grad, cfg, nodes: Vec::new() };
        grower.grow((0..data.rows as u32).collect(), 0);
        let tree = Tree { nodes: grower.nodes };
        for (r, p) in pred.iter_mut().enumerate() {
            *p += tree.predict(&x[r * nf..(r + 1) * nf]);
        }
        trees.push(tree);
    }
    Ensemble { base, trees }
}

/// Fit one ensemble per target column. `x` is row-major `rows × features`,
/// `y` row-major `rows × outputs`.
pub fn fit_boosted(x: &[f64], features: usize, y: &[f64], outputs: usize, cfg: &TreeConfig, exec: Execution) -> Result<Vec<Ensemble>> {
    if cfg.rounds == 0 || cfg.max_depth == 0 {
        return Err(LearnError::Config("trees need at least one round and depth 1".into()));
    }
    let rows = x.len() / features;
    if rows == 0 {
        return Err(LearnError::EmptySplit("train"));
    }
    let data = Binned::new(x, features, cfg.bins);
    Ok(exec.map_indexed(outputs, |k| {
        let col: Vec<f64> = (0..rows).map(|r| y[r * outputs + k]).collect();
        fit_ensemble(&data, x, &col, cfg)
    }))
}

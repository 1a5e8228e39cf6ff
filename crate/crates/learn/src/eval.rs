//! Test-set evaluation and horizon sweeps.

use pneuma_sim::Execution;
use serde::{Deserialize, Serialize};

use crate::data::{SeqDataset, Variant};
use crate::error::{LearnError, Result};
use crate::metrics::{metric_bqa, metric_mbte, metric_mse, Bqa, Mbte};
use crate::model::Model;
use crate::recurrent::{train_recurrent, TrainConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub variant: Variant,
    pub horizon_ms: f64,
    /// Mean over trials of the per-trial MSE.
    pub mse: f64,
    pub bqa: Vec<Bqa>,
    pub mbte: Vec<Mbte>,
    pub trials: usize,
    /// Trials too short to predict.
    pub empty: usize,
}

/// Score `model` on the trials `idx` of `ds`.
pub fn evaluate(model: &Model, ds: &SeqDataset, idx: &[usize], thresholds: &[f64]) -> Result<EvalReport> {
    let trials = ds.subset(idx);
    let preds = model.predict_batch(&trials)?;
    let mut pairs = Vec::new();
    let mut empty = 0;
    for (t, p) in trials.iter().zip(&preds) {
        if p.is_empty() {
            empty += 1;
            continue;
        }
        pairs.push((p.values.clone(), model.aligned_truth(t, p)?));
    }
    if pairs.is_empty() {
        return Err(LearnError::EmptyOverlap);
    }
    let mse = pairs.iter().map(|(p, t)| metric_mse(p, t)).sum::<Result<f64>>()? / pairs.len() as f64;
    let refs: Vec<(&[[f64; 4]], &[[f64; 4]])> = pairs.iter().map(|(p, t)| (p.as_slice(), t.as_slice())).collect();
    let bqa = thresholds.iter().map(|&th| metric_bqa(&refs, th)).collect::<Result<_>>()?;
    let mbte = thresholds.iter().map(|&th| metric_mbte(&refs, th)).collect::<Result<_>>()?;
    Ok(EvalReport {
        model: model.kind().into(),
        variant: model.variant(),
        horizon_ms: model.horizon_ms(),
        mse,
        bqa,
        mbte,
        trials: pairs.len(),
        empty,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ablation {
    pub rows: Vec<EvalReport>,
    /// Least-squares slope of MSE against h, per 60 ms.
    pub slope_per_60ms: f64,
}

/// `start:stop:step` in ms, inclusive of `stop` when it lands on a step.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || LearnError::Config(format!("horizon range {spec:?} is not start:stop:step"));
    let parts: Vec<f64> = spec.split(':').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    let [a, b, s] = parts[..] else { return Err(bad()) };
    if s <= 0.0 || b < a {
        return Err(bad());
    }
    let n = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * s).collect())
}

pub fn ablate_horizon(
    ds: &SeqDataset,
    variant: Variant,
    horizons: &[f64],
    cfg: &TrainConfig,
    thresholds: &[f64],
    exec: Execution,
) -> Result<Ablation> {
    let rows = exec
        .map_slice(horizons, |&h| {
            let wrap = |e| LearnError::Horizon { h, source: Box::new(e) };
            let (m, _) = train_recurrent(ds, variant, h, cfg).map_err(wrap)?;
            evaluate(&Model::Recurrent(m), ds, &ds.split.test, thresholds).map_err(wrap)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let mh = rows.iter().map(|r| r.horizon_ms).sum::<f64>() / n;
    let mm = rows.iter().map(|r| r.mse).sum::<f64>() / n;
    let sxx: f64 = rows.iter().map(|r| (r.horizon_ms - mh).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.horizon_ms - mh) * (r.mse - mm)).sum();
    let slope_per_60ms = if sxx > 0.0 { 60.0 * sxy / sxx } else { 0.0 };
    Ok(Ablation { rows, slope_per_60ms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("30:330:60").unwrap(), vec![30.0, 90.0, 150.0, 210.0, 270.0, 330.0]);
        assert!(parse_range("30:330").is_err());
        assert!(parse_range("30:10:6").is_err());
    }
}

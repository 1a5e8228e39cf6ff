//! First-break statistics over a batch of label series.

use serde::{Deserialize, Serialize};

use crate::error::{LabelError, Result};

/// Threshold rows reported by default.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.5, 0.6, 0.7];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakStats {
    pub threshold: f64,
    /// Share of counted trials in which each quadrant broke first. Ties
    /// count for every quadrant involved, so rates may sum above 1.
    pub rates: [f64; 4],
    pub counts: [usize; 4],
    pub trials: usize,
    /// Trials in which no quadrant ever dropped below the threshold.
    pub excluded: usize,
}

/// Index of the first sample below `th` for each quadrant.
fn first_crossings(series: &[[f64; 4]], th: f64) -> [Option<usize>; 4] {
    std::array::from_fn(|k| series.iter().position(|v| v[k] < th))
}

pub fn break_stats<S: AsRef<[[f64; 4]]>>(batch: &[S], th: f64) -> Result<BreakStats> {
    if !(th > 0.0 && th < 1.0) {
        return Err(LabelError::Threshold(th));
    }
    if batch.is_empty() {
        return Err(LabelError::EmptyBatch);
    }
    let mut counts = [0usize; 4];
    let (mut trials, mut excluded) = (0, 0);
    for s in batch {
        let first = first_crossings(s.as_ref(), th);
        let Some(earliest) = first.iter().flatten().min().copied() else {
            excluded += 1;
            continue;
        };
        trials += 1;
        for k in 0..4 {
            if first[k] == Some(earliest) {
                counts[k] += 1;
            }
        }
    }
    let rates = counts.map(|c| if trials == 0 { 0.0 } else { c as f64 / trials as f64 });
    Ok(BreakStats { threshold: th, rates, counts, trials, excluded })
}

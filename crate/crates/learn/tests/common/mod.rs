#![allow(dead_code)]

use cup_learn::TrialRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random-walk sensors with labels that decay from the sealed state after
/// a trial-specific onset.
pub fn synthetic(n: usize, len: usize, seed: u64) -> Vec<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|id| {
            let onset = rng.random_range(len / 4..len / 2);
            let t = (0..len).map(|i| i as f64 * 0.006).collect();
            let mut p = [60.0; 4];
            let p_vac = (0..len)
                .map(|_| {
                    for v in &mut p {
                        *v += rng.random_range(-1.0..1.0);
                    }
                    p
                })
                .collect();
            let ft = (0..len).map(|_| std::array::from_fn(|_| rng.random_range(-5.0..5.0))).collect();
            let labels = (0..len)
                .map(|i| {
                    let x = i.saturating_sub(onset) as f64 / len as f64;
                    std::array::from_fn(|k| (1.0 - x * (2 + k) as f64).max(0.0))
                })
                .collect();
            TrialRecord { id, t, p_vac, ft, labels }
        })
        .collect()
}

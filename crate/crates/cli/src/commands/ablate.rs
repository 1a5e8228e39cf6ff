use std::path::PathBuf;

use clap::Args;
use cup_learn::{ablate_horizon, horizon_steps, parse_range, Variant};

use super::evaluate::{metrics_header, metrics_row};
use super::parse_variant;
use super::train::{dataset, recurrent_config};
use crate::error::Result;
use crate::table::{num, write_csv};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct AblateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant, default_value = "ft-vac")]
    variant: Variant,
    /// Horizons as start:stop:step (ms).
    #[arg(long, default_value = "30:330:60")]
    h: String,
    #[arg(long)]
    epochs: Option<usize>,
}

pub fn run(ctx: &mut Ctx, a: AblateArgs) -> Result<()> {
    let hs = parse_range(&a.h)?;
    for &h in &hs {
        horizon_steps(h)?;
    }
    let ds = dataset(ctx, &a.input, a.labels.as_ref())?;
    let cfg = recurrent_config(ctx, a.epochs)?;
    let th = ctx.config.thresholds.clone();
    let ab = ablate_horizon(&ds, a.variant, &hs, &cfg, &th, ctx.exec)?;
    let rows: Vec<Vec<String>> = ab.rows.iter().map(metrics_row).collect();
    write_csv(&ctx.out_path("ablation.csv"), &metrics_header(&th), &rows)?;
    write_csv(&ctx.out_path("ablation_fit.csv"), &["slope_mse_per_60ms".to_string()], &[vec![num(ab.slope_per_60ms)]])?;
    for r in &ab.rows {
        println!("h {:>4} ms  mse {:.5}  mbte@{} {} ms", r.horizon_ms, r.mse, th[0], r.mbte[0].median_ms);
    }
    println!("MSE slope {:.5} per 60 ms", ab.slope_per_60ms);
    Ok(())
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use cup_learn::{build_dataset, train_recurrent, train_trees, Model, ModelFile, SeqDataset, TrainConfig, TrainReport, Variant};

use super::{h_tag, parse_variant};
use crate::error::Result;
use crate::table::{num, write_csv};
use crate::trials::load_records;
use crate::Ctx;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Recurrent,
    Trees,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Recurrent => "recurrent",
            ModelKind::Trees => "trees",
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Detachment batch written by `simulate`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Label directory written by `label`; defaults to the simulated contact state.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Model families, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "recurrent")]
    model: Vec<ModelKind>,
    /// Input variants (ft, vac, ft-vac), comma separated.
    #[arg(long, value_parser = parse_variant, value_delimiter = ',', default_value = "ft-vac")]
    variant: Vec<Variant>,
    /// Forecast horizon (ms, multiple of 6).
    #[arg(long, default_value_t = 30.0)]
    h: f64,
    /// Override the configured epoch count.
    #[arg(long)]
    epochs: Option<usize>,
}

/// Shared by `train`, `evaluate` and `ablate`.
pub fn dataset(ctx: &mut Ctx, input: &PathBuf, labels: Option<&PathBuf>) -> Result<SeqDataset> {
    ctx.input(input);
    if let Some(l) = labels {
        ctx.input(l);
    }
    let records = load_records(input, labels.map(|p| p.as_path()))?;
    Ok(build_dataset(&records, ctx.config.split(ctx.seed()?))?)
}

pub fn recurrent_config(ctx: &Ctx, epochs: Option<usize>) -> Result<TrainConfig> {
    let mut cfg = ctx.config.train.clone();
    cfg.seed = ctx.seed()?;
    if let Some(e) = epochs {
        cfg.epochs = e;
    }
    Ok(cfg)
}

pub fn model_file_name(kind: &str, variant: Variant, h: f64) -> String {
    format!("{kind}-{}-h{}.json", variant.as_str(), h_tag(h))
}

pub fn run(ctx: &mut Ctx, a: TrainArgs) -> Result<()> {
    cup_learn::horizon_steps(a.h)?;
    let ds = dataset(ctx, &a.input, a.labels.as_ref())?;
    let rcfg = recurrent_config(ctx, a.epochs)?;
    let jobs: Vec<(ModelKind, Variant)> = a.model.iter().flat_map(|&k| a.variant.iter().map(move |&v| (k, v))).collect();
    let exec = ctx.exec;
    let tcfg = &ctx.config.trees;
    let trained = exec.map_slice(&jobs, |&(kind, variant)| -> Result<(Model, Option<TrainReport>)> {
        Ok(match kind {
            ModelKind::Recurrent => {
                let (m, rep) = train_recurrent(&ds, variant, a.h, &rcfg)?;
                (Model::Recurrent(m), Some(rep))
            }
            ModelKind::Trees => (Model::Trees(train_trees(&ds, variant, a.h, tcfg, exec)?), None),
        })
    });
    for ((kind, variant), res) in jobs.iter().zip(trained) {
        let (model, report) = res?;
        let name = model_file_name(kind.as_str(), *variant, a.h);
        ModelFile::new(model, ds.normalization.clone()).save(&ctx.out_path(&name))?;
        if let Some(rep) = report {
            let rows: Vec<Vec<String>> = rep
                .train_loss
                .iter()
                .zip(&rep.val_mse)
                .enumerate()
                .map(|(e, (l, v))| vec![e.to_string(), num(*l), num(*v)])
                .collect();
            let log = name.replace(".json", ".train.csv");
            write_csv(&ctx.out_path(&log), &["epoch", "train_loss", "val_mse"].map(String::from), &rows)?;
            println!("{name}: best epoch {} val mse {:.5}", rep.best_epoch, rep.val_mse[rep.best_epoch]);
        } else {
            println!("{name}: trained");
        }
    }
    let mut rows = Vec::new();
    for (set, idx) in [("train", &ds.split.train), ("val", &ds.split.val), ("test", &ds.split.test)] {
        rows.extend(idx.iter().map(|&i| vec![ds.trials[i].id.to_string(), set.to_string()]));
    }
    rows.sort_by_key(|r| r[0].parse::<usize>().unwrap_or(0));
    write_csv(&ctx.out_path("split.csv"), &["trial", "set"].map(String::from), &rows)?;
    Ok(())
}

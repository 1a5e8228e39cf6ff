use std::path::{Path, PathBuf};

use clap::Args;
use cup_learn::{evaluate, EvalReport, ModelFile, Variant};

use super::parse_variant;
use super::train::{dataset, ModelKind};
use crate::error::{CliError, Result};
use crate::manifest::MANIFEST;
use crate::table::{num, write_csv};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Detachment batch the models were trained on.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Model files, or directories holding them.
    #[arg(long = "models", required = true, num_args = 1..)]
    models: Vec<PathBuf>,
    /// Only these model families.
    #[arg(long, value_enum, value_delimiter = ',')]
    model: Vec<ModelKind>,
    /// Only these input variants.
    #[arg(long, value_parser = parse_variant, value_delimiter = ',')]
    variant: Vec<Variant>,
    /// Break thresholds; defaults to the configured ones.
    #[arg(long, value_delimiter = ',')]
    th: Vec<f64>,
}

fn model_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|e| CliError::io(p, e))?;
            let mut files: Vec<PathBuf> = rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json") && f.file_name().is_some_and(|n| n != MANIFEST))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load(path: &Path) -> Result<ModelFile> {
    ModelFile::load(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn metrics_header(th: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = ["model", "variant", "h_ms", "trials", "empty", "mse"].map(String::from).to_vec();
    for t in th {
        h.extend([format!("bqa@{t}"), format!("mbte_median_ms@{t}"), format!("mbte_iqr_ms@{t}"), format!("missed@{t}")]);
    }
    h
}

pub fn metrics_row(r: &EvalReport) -> Vec<String> {
    let mut row = vec![r.model.clone(), r.variant.as_str().into(), num(r.horizon_ms), r.trials.to_string(), r.empty.to_string(), num(r.mse)];
    for (b, m) in r.bqa.iter().zip(&r.mbte) {
        row.extend([num(b.accuracy), num(m.median_ms), num(m.iqr_ms), m.missed.to_string()]);
    }
    row
}

pub fn run(ctx: &mut Ctx, a: EvaluateArgs) -> Result<()> {
    let th = if a.th.is_empty() { ctx.config.thresholds.clone() } else { a.th.clone() };
    let ds = dataset(ctx, &a.input, a.labels.as_ref())?;
    let mut selected = Vec::new();
    for path in model_files(&a.models)? {
        let file = load(&path)?;
        let kind_ok = a.model.is_empty() || a.model.iter().any(|k| k.as_str() == file.model.kind());
        let variant_ok = a.variant.is_empty() || a.variant.contains(&file.model.variant());
        if !(kind_ok && variant_ok) {
            continue;
        }
        if file.normalization != ds.normalization {
            return Err(CliError::Config(format!(
                "{} was trained on a different dataset or split (check --in, --labels and --seed)",
                path.display()
            )));
        }
        ctx.input(&path);
        selected.push(file);
    }
    if selected.is_empty() {
        return Err(CliError::Config("no model files match the requested --model/--variant".into()));
    }
    let test = &ds.split.test;
    let reports = ctx.exec.map_slice(&selected, |f| evaluate(&f.model, &ds, test, &th));
    let reports = reports.into_iter().collect::<cup_learn::Result<Vec<_>>>()?;
    let header = metrics_header(&th);
    let rows: Vec<Vec<String>> = reports.iter().map(metrics_row).collect();
    write_csv(&ctx.out_path("metrics.csv"), &header, &rows)?;
    print_grid(&reports, &th);
    Ok(())
}

fn print_grid(reports: &[EvalReport], th: &[f64]) {
    let mut head = format!("{:<10} {:<7} {:>5} {:>8}", "model", "variant", "h", "MSE");
    for t in th {
        head += &format!(" {:>8} {:>14}", format!("BQA@{t}"), format!("MBTE@{t}"));
    }
    println!("{head}");
    for r in reports {
        let mut line = format!("{:<10} {:<7} {:>5} {:>8.5}", r.model, r.variant.as_str(), r.horizon_ms, r.mse);
        for (b, m) in r.bqa.iter().zip(&r.mbte) {
            line += &format!(" {:>7.1}% {:>14}", 100.0 * b.accuracy, format!("{} ± {}", m.median_ms, m.iqr_ms));
        }
        println!("{line}");
    }
}

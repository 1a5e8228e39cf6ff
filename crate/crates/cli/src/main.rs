//! `smartcup`: simulate, featurize, label, train, evaluate, ablate, plot
//! and calibrate from the command line.
//!
//! Every run writes its outputs plus a `manifest.json` into `--out`.
//! Global flags can also come from `SUCTION_SEED`, `SUCTION_CONFIG`,
//! `SUCTION_OUT` and `SUCTION_THREADS`. Exit status is 0 on success, 2 for
//! configuration or input errors and 3 for numeric failures.

mod commands;
mod config;
mod error;
mod manifest;
mod svg;
mod table;
mod trials;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pneuma_sim::Execution;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::manifest::{digest_outputs, RunManifest};

#[derive(Parser)]
#[command(name = "smartcup", version, about = "Smart suction cup simulation and seal-failure forecasting pipeline")]
struct Cli {
    /// Seed for every random draw; required by subcommands that sample or split.
    #[arg(long, global = true, env = "SUCTION_SEED")]
    seed: Option<u64>,
    /// JSON pipeline configuration; defaults are used for missing fields.
    #[arg(long, global = true, env = "SUCTION_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "SUCTION_OUT")]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, env = "SUCTION_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write traces (and seal frames for detachment).
    Simulate(commands::simulate::SimulateArgs),
    /// Carrier-magnitude features from traces.
    Featurize(commands::featurize::FeaturizeArgs),
    /// Quadrant contact labels from seal frames.
    Label(commands::label::LabelArgs),
    /// Train forecasting models.
    Train(commands::train::TrainArgs),
    /// Score trained models on the test split.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Sweep the forecast horizon.
    Ablate(commands::ablate::AblateArgs),
    /// Render a CSV output as SVG.
    Plot(commands::plot::PlotArgs),
    /// Re-derive the calibrated cup parameters.
    Calibrate(commands::calibrate::CalibrateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Featurize(_) => "featurize",
            Command::Label(_) => "label",
            Command::Train(_) => "train",
            Command::Evaluate(_) => "evaluate",
            Command::Ablate(_) => "ablate",
            Command::Plot(_) => "plot",
            Command::Calibrate(_) => "calibrate",
        }
    }
}

/// State shared by all subcommands.
pub struct Ctx {
    seed: Option<u64>,
    pub out: PathBuf,
    pub config: PipelineConfig,
    pub exec: Execution,
    inputs: Vec<String>,
}

impl Ctx {
    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| CliError::Config("this subcommand needs --seed (or SUCTION_SEED)".into()))
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn run(cli: Cli) -> Result<()> {
    let name = cli.command.name();
    let out = cli.out.ok_or_else(|| CliError::Config("--out (or SUCTION_OUT) is required".into()))?;
    let config = PipelineConfig::load(cli.config.as_deref())?;
    let exec = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    };
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let started = manifest::run_marker(&out)?;
    let mut ctx = Ctx { seed: cli.seed, out, config, exec, inputs: vec![] };
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(&mut ctx, a)?,
        Command::Featurize(a) => commands::featurize::run(&mut ctx, a)?,
        Command::Label(a) => commands::label::run(&mut ctx, a)?,
        Command::Train(a) => commands::train::run(&mut ctx, a)?,
        Command::Evaluate(a) => commands::evaluate::run(&mut ctx, a)?,
        Command::Ablate(a) => commands::ablate::run(&mut ctx, a)?,
        Command::Plot(a) => commands::plot::run(&mut ctx, a)?,
        Command::Calibrate(a) => commands::calibrate::run(&mut ctx, a)?,
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: name.into(),
        args: std::env::args().skip(1).collect(),
        seed: ctx.seed,
        config: cli.config.map(|p| p.display().to_string()),
        config_sha256: ctx.config.digest(),
        inputs: ctx.inputs,
        outputs: digest_outputs(&ctx.out, started)?,
    };
    manifest.write(&ctx.out)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use cup_labels::io::{read_sequence, write_break_stats, write_labels};
use cup_labels::{break_stats, label_sequence, Normalization};
use pneuma_sim::Execution;

use crate::error::{CliError, Result};
use crate::trials::{load_trace, trial_dir_name, trial_dirs, FRAME_DIR, LABEL_FILE};
use crate::Ctx;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    SequenceMax,
    FullScale,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    /// Detachment batch written by `simulate --scenario detach`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Intensity normalization (overrides the configuration).
    #[arg(long, value_enum)]
    normalization: Option<NormArg>,
}

pub fn run(ctx: &mut Ctx, a: LabelArgs) -> Result<()> {
    ctx.input(&a.input);
    let mut opts = ctx.config.labels.clone();
    match a.normalization {
        Some(NormArg::SequenceMax) => opts.normalization = Normalization::SequenceMax,
        Some(NormArg::FullScale) => opts.normalization = Normalization::FullScale,
        None => {}
    }
    let dirs = trial_dirs(&a.input)?;
    let out = &ctx.out;
    let series = ctx.exec.map_slice(&dirs, |(idx, dir)| -> Result<Vec<[f64; 4]>> {
        let frames = dir.join(FRAME_DIR);
        if !frames.is_dir() {
            return Err(CliError::Config(format!("{} has no frames; simulate without --no-frames", dir.display())));
        }
        let seq = read_sequence(&frames)?;
        let trace = load_trace(dir)?;
        let labels = label_sequence(&seq.frames, &seq.orientation, &trace.t, &opts, Execution::Sequential)?;
        let target = out.join(trial_dir_name(*idx));
        std::fs::create_dir_all(&target).map_err(|e| CliError::io(&target, e))?;
        write_labels(&target.join(LABEL_FILE), &labels)?;
        Ok(labels.iter().map(|l| l.values).collect())
    });
    let series = series.into_iter().collect::<Result<Vec<_>>>()?;
    let stats = ctx.config.thresholds.iter().map(|&th| break_stats(&series, th)).collect::<cup_labels::Result<Vec<_>>>()?;
    write_break_stats(&ctx.out_path("break_stats.csv"), &stats)?;
    for s in &stats {
        println!(
            "th {:.1}: first break q1..q4 = {:.3} {:.3} {:.3} {:.3} ({} trials, {} excluded)",
            s.threshold, s.rates[0], s.rates[1], s.rates[2], s.rates[3], s.trials, s.excluded
        );
    }
    Ok(())
}

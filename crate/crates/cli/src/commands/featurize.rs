use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use cup_features::{asymmetry, milestones_for, normal_seek, sliding_profile, steady_dft30, steady_mean, stft_30_channel, STEADY_WINDOW_S};
use pneuma_sim::scenario::ScenarioKind;
use pneuma_sim::Trace;

use crate::error::{CliError, Result};
use crate::table::{num, write_csv};
use crate::trials::{load_trace, trial_dir_name, trial_dirs, TRACE_FILE};
use crate::Ctx;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FeatureKind {
    /// |STFT30| per chamber.
    Stft,
    /// Mean vacuum and |DFT30| over the final steady window.
    Steady,
    /// Sliding profile (ch_all, ch_diff) and detected transitions.
    Sliding,
    /// Surface-normal seeking over a palpation sweep directory.
    Normal,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    /// Trace CSV, trace directory, detachment batch or palpation sweep.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "stft")]
    kind: FeatureKind,
    /// STFT hop (samples).
    #[arg(long, default_value_t = 1)]
    hop: usize,
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn write_stft(path: &Path, trace: &Trace, hop: usize) -> Result<()> {
    let chans = (1..=4).map(|k| stft_30_channel(trace, k, hop)).collect::<cup_features::Result<Vec<_>>>()?;
    let rows = (0..chans[0].len())
        .map(|i| std::iter::once(num(chans[0][i].t)).chain(chans.iter().map(|c| num(c[i].value))).collect())
        .collect::<Vec<Vec<String>>>();
    write_csv(path, &header(&["t", "ch1", "ch2", "ch3", "ch4"]), &rows)
}

pub fn run(ctx: &mut Ctx, a: FeaturizeArgs) -> Result<()> {
    ctx.input(&a.input);
    let batch = a.input.is_dir() && !a.input.join(TRACE_FILE).exists();
    match a.kind {
        FeatureKind::Stft if batch => {
            let dirs = trial_dirs(&a.input)?;
            let out = &ctx.out;
            let res = ctx.exec.map_slice(&dirs, |(idx, dir)| {
                let target = out.join(trial_dir_name(*idx));
                std::fs::create_dir_all(&target).map_err(|e| CliError::io(&target, e))?;
                match write_stft(&target.join("stft.csv"), &load_trace(dir)?, a.hop) {
                    // trials that fail within the first window have no spectrum
                    Err(CliError::Feature(cup_features::FeatureError::WindowTooShort { len, .. })) => {
                        let _ = std::fs::remove_dir(&target);
                        Ok(Some((*idx, len)))
                    }
                    other => other.map(|_| None),
                }
            });
            let skipped = res.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect::<Vec<_>>();
            if !skipped.is_empty() {
                let rows = skipped.iter().map(|(i, n)| vec![i.to_string(), n.to_string()]).collect::<Vec<_>>();
                write_csv(&ctx.out_path("skipped.csv"), &header(&["trial", "samples"]), &rows)?;
                eprintln!("{} trials shorter than one STFT window; listed in skipped.csv", skipped.len());
            }
        }
        FeatureKind::Stft => write_stft(&ctx.out_path("stft.csv"), &load_trace(&a.input)?, a.hop)?,
        FeatureKind::Steady => {
            let trace = load_trace(&a.input)?;
            let mean = steady_mean(&trace, STEADY_WINDOW_S)?;
            let dft = steady_dft30(&trace, STEADY_WINDOW_S)?;
            let rows: Vec<Vec<String>> = (0..4).map(|k| vec![(k + 1).to_string(), num(mean[k]), num(dft[k])]).collect();
            write_csv(&ctx.out_path("steady.csv"), &header(&["channel", "mean_pa", "dft30_pa"]), &rows)?;
        }
        FeatureKind::Sliding => {
            let trace = load_trace(&a.input)?;
            let p = sliding_profile(&trace, a.hop, &milestones_for(&trace, &ctx.config.sim.slide))?;
            let rows: Vec<Vec<String>> = (0..p.times.len())
                .map(|i| [p.times[i], p.ch_all[i], p.ch_left[i], p.ch_right[i], p.ch_diff[i]].map(num).to_vec())
                .collect();
            write_csv(&ctx.out_path("profile.csv"), &header(&["t", "ch_all", "ch_left", "ch_right", "ch_diff"]), &rows)?;
            let rows: Vec<Vec<String>> = p
                .events
                .iter()
                .map(|e| {
                    let t = &e.transition;
                    vec![num(t.time), num(t.magnitude), num(t.start), num(t.end), e.kind.as_str().into()]
                })
                .collect();
            write_csv(&ctx.out_path("events.csv"), &header(&["t", "magnitude", "start", "end", "kind"]), &rows)?;
        }
        FeatureKind::Normal => {
            let mut sweep = Vec::new();
            let rd = std::fs::read_dir(&a.input).map_err(|e| CliError::io(&a.input, e))?;
            let mut dirs: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join(TRACE_FILE).exists()).collect();
            dirs.sort();
            for dir in dirs {
                let trace = load_trace(&dir)?;
                let angle = match trace.meta.as_ref().map(|m| &m.scenario.kind) {
                    Some(ScenarioKind::Palpate { angle_deg, .. }) => *angle_deg,
                    _ => return Err(CliError::Config(format!("{} is not a palpation trace", dir.display()))),
                };
                sweep.push((angle, trace));
            }
            let seek = normal_seek(&sweep)?;
            let rows: Vec<Vec<String>> = seek
                .curves
                .iter()
                .map(|(angle, v)| {
                    let mut r = vec![num(*angle)];
                    r.extend(v.iter().map(|x| num(*x)));
                    r.push(num(asymmetry(v)));
                    r.push(num(v.iter().sum::<f64>() / 4.0));
                    r
                })
                .collect();
            write_csv(&ctx.out_path("normal.csv"), &header(&["angle", "ch1", "ch2", "ch3", "ch4", "asymmetry", "mean"]), &rows)?;
            let summary = serde_json::json!({
                "best_angle": seek.best_angle,
                "seal_quality": seek.seal_quality,
                "class": seek.class,
            });
            let path = ctx.out_path("normal.json");
            std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n").map_err(|e| CliError::io(&path, e))?;
            println!("best angle {} deg, seal quality {:.3} Pa, {:?}", seek.best_angle, seek.seal_quality, seek.class);
        }
    }
    Ok(())
}

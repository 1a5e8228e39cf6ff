use clap::{Args, ValueEnum};
use cup_labels::io::write_sequence;
use pneuma_sim::detach::{sample_detach_batch, DetachTrial};
use pneuma_sim::frame::{orientation_10hz, render_trace_frames};
use pneuma_sim::rng::{derive_seed, stream};
use pneuma_sim::scenario::{run_scenario, trial_seed, Scenario, ScenarioKind, SurfacePair, VacuumMode};

use crate::error::Result;
use crate::table::{num, write_csv};
use crate::trials::{save_trace, trial_dir_name, FRAME_DIR};
use crate::Ctx;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ScenarioArg {
    Texture,
    Slide,
    Palpate,
    Detach,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Full,
    Pwm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PairArg {
    Wavy,
    Ribbed,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Sandpaper grit (texture).
    #[arg(long, default_value_t = 600)]
    grit: u32,
    /// Vacuum mode; texture defaults to full, slide and palpate to PWM.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Textured plate (slide).
    #[arg(long, value_enum, default_value = "wavy")]
    pair: PairArg,
    /// Slide speed (mm/s).
    #[arg(long)]
    speed: Option<f64>,
    /// Palpation tip radius (mm).
    #[arg(long, default_value_t = 11.0)]
    tip_radius: f64,
    /// Palpation preload (N).
    #[arg(long, default_value_t = 1.0)]
    preload: f64,
    /// Single palpation angle (deg); omit for the full sweep.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    /// Detachment trials; trials cycle through the 108 twist-axis cells.
    #[arg(long, default_value_t = 108)]
    batch: usize,
    /// Skip rendering seal frames for detachment trials.
    #[arg(long)]
    no_frames: bool,
    /// Simulated length (s) instead of the scenario's natural length.
    #[arg(long)]
    duration: Option<f64>,
}

fn mode(m: Option<ModeArg>, default: VacuumMode) -> VacuumMode {
    match m {
        Some(ModeArg::Full) => VacuumMode::Full,
        Some(ModeArg::Pwm) => VacuumMode::Pwm,
        None => default,
    }
}

pub fn run(ctx: &mut Ctx, a: SimulateArgs) -> Result<()> {
    let seed = ctx.seed()?;
    let cfg = &ctx.config.sim;
    let one = |mut sc: Scenario, seed: u64| -> Result<pneuma_sim::Trace> {
        sc.duration = a.duration.or(sc.duration);
        Ok(run_scenario(cfg, &sc, seed)?)
    };
    match a.scenario {
        ScenarioArg::Texture => {
            let trace = one(Scenario::texture(a.grit, mode(a.mode, VacuumMode::Full)), seed)?;
            save_trace(&ctx.out, &trace)?;
        }
        ScenarioArg::Slide => {
            let pair = match a.pair {
                PairArg::Wavy => SurfacePair::WavySmooth,
                PairArg::Ribbed => SurfacePair::RibbedSmooth,
            };
            let mut sc = Scenario::slide(pair);
            sc.vacuum_mode = mode(a.mode, VacuumMode::Pwm);
            if let (Some(v), ScenarioKind::Slide { speed_mm_s, .. }) = (a.speed, &mut sc.kind) {
                *speed_mm_s = v;
            }
            save_trace(&ctx.out, &one(sc, seed)?)?;
        }
        ScenarioArg::Palpate => {
            let scenario = |angle: f64| {
                let mut sc = Scenario::palpate(a.tip_radius, angle, a.preload);
                sc.vacuum_mode = mode(a.mode, VacuumMode::Pwm);
                sc
            };
            match a.angle {
                Some(angle) => save_trace(&ctx.out, &one(scenario(angle), seed)?)?,
                None => {
                    let angles = cup_features::SWEEP_ANGLES;
                    let traces = ctx.exec.map_indexed(angles.len(), |i| one(scenario(angles[i]), trial_seed(seed, i as u64)));
                    for (angle, trace) in angles.iter().zip(traces) {
                        save_trace(&ctx.out.join(format!("angle_{angle}")), &trace?)?;
                    }
                }
            }
        }
        ScenarioArg::Detach => {
            let trials = sample_detach_batch(cfg, a.batch, seed, ctx.exec)?;
            let render = &cfg.render;
            let out = &ctx.out;
            let written = ctx.exec.map_slice(&trials, |t: &DetachTrial| -> Result<()> {
                let dir = out.join(trial_dir_name(t.index));
                save_trace(&dir, &t.trace)?;
                if !a.no_frames {
                    let seq = render_trace_frames(&t.trace, render, derive_seed(t.seed, stream::FRAMES))?;
                    write_sequence(&dir.join(FRAME_DIR), &seq, &orientation_10hz(&t.trace))?;
                }
                Ok(())
            });
            written.into_iter().collect::<Result<Vec<()>>>()?;
            let header = ["trial", "phi_cell", "theta_cell", "phi_deg", "theta_deg", "rate_deg_s", "samples"].map(String::from);
            let rows: Vec<Vec<String>> = trials
                .iter()
                .map(|t| {
                    vec![
                        t.index.to_string(),
                        t.cell.0.to_string(),
                        t.cell.1.to_string(),
                        num(t.params.phi_deg),
                        num(t.params.theta_deg),
                        num(t.params.angular_rate_deg_s),
                        t.trace.len().to_string(),
                    ]
                })
                .collect();
            write_csv(&ctx.out_path("trials.csv"), &header, &rows)?;
        }
    }
    Ok(())
}

use clap::Args;
use pneuma_sim::calibrate::{calibrated_config, report, TARGET_600_GRIT, TARGET_DIFFERENTIAL, TARGET_PWM_RATIO};

use crate::error::{CliError, Result};
use crate::table::{num, write_csv};
use crate::Ctx;

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Only report how the current configuration meets the targets.
    #[arg(long)]
    check: bool,
}

pub fn run(ctx: &mut Ctx, a: CalibrateArgs) -> Result<()> {
    let mut cfg = ctx.config.clone();
    if !a.check {
        cfg.sim = calibrated_config(&cfg.sim)?;
        let path = ctx.out_path("config.json");
        std::fs::write(&path, serde_json::to_string_pretty(&cfg)? + "\n").map_err(|e| CliError::io(&path, e))?;
    }
    let r = report(&cfg.sim.cup, &cfg.sim.surfaces)?;
    let rows = vec![
        vec!["single_leak_differential_pa".into(), num(r.single_leak_differential), num(TARGET_DIFFERENTIAL)],
        vec!["grit_600_full_pa".into(), num(r.grit_600_full), num(TARGET_600_GRIT)],
        vec!["grit_600_pwm_pa".into(), num(r.grit_600_pwm), String::new()],
        vec!["pwm_ratio".into(), num(r.pwm_ratio), num(TARGET_PWM_RATIO)],
    ];
    write_csv(&ctx.out_path("calibration.csv"), &["quantity", "value", "target"].map(String::from), &rows)?;
    for r in &rows {
        println!("{:<30} {:>14} (target {})", r[0], r[1], if r[2].is_empty() { "-" } else { &r[2] });
    }
    Ok(())
}

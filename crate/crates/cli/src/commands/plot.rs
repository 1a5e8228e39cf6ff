use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::error::{CliError, Result};
use crate::svg::{render, Panel, Series};
use crate::table::Table;
use crate::Ctx;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PlotKind {
    /// Chamber vacuum and contact of a `trace.csv`.
    Trace,
    /// |STFT30| per chamber from `stft.csv`.
    Stft,
    /// ch_all and ch_diff panels from `profile.csv`.
    Sliding,
    /// |DFT30| per chamber against palpation angle from `normal.csv`.
    Normal,
    /// Quadrant labels from `labels.csv`.
    Labels,
    /// MSE and break-time error against horizon from `ablation.csv`.
    Ablation,
}

impl PlotKind {
    fn name(self) -> &'static str {
        match self {
            PlotKind::Trace => "trace",
            PlotKind::Stft => "stft",
            PlotKind::Sliding => "sliding",
            PlotKind::Normal => "normal",
            PlotKind::Labels => "labels",
            PlotKind::Ablation => "ablation",
        }
    }

    /// File read when `--in` is a directory.
    fn default_file(self) -> &'static str {
        match self {
            PlotKind::Trace => "trace.csv",
            PlotKind::Stft => "stft.csv",
            PlotKind::Sliding => "profile.csv",
            PlotKind::Normal => "normal.csv",
            PlotKind::Labels => "labels.csv",
            PlotKind::Ablation => "ablation.csv",
        }
    }
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// CSV file, or a directory holding the kind's default file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    title: Option<String>,
}

fn series(t: &Table, x: &str, ys: &[&str], scale: f64) -> Result<Vec<Series>> {
    let xs = t.column(x)?;
    ys.iter()
        .map(|name| Ok(Series { name: name.to_string(), xs: xs.clone(), ys: t.column(name)?.iter().map(|v| v * scale).collect() }))
        .collect()
}

fn panel(y_label: &str, series: Vec<Series>) -> Panel {
    Panel { y_label: y_label.into(), series, markers: false }
}

pub fn run(ctx: &mut Ctx, mut a: PlotArgs) -> Result<()> {
    if a.input.is_dir() {
        a.input = a.input.join(a.kind.default_file());
    }
    ctx.input(&a.input);
    let t = Table::read(&a.input)?;
    if t.rows.is_empty() {
        return Err(CliError::Config(format!("{} has no data rows", a.input.display())));
    }
    let chans = ["ch1", "ch2", "ch3", "ch4"];
    let (x_label, panels, default_title) = match a.kind {
        PlotKind::Trace => (
            "time (s)",
            vec![
                panel("P_vac (kPa)", series(&t, "t", &["p1", "p2", "p3", "p4"], 1e-3)?),
                panel("contact", series(&t, "t", &["c1", "c2", "c3", "c4"], 1.0)?),
            ],
            "Chamber vacuum",
        ),
        PlotKind::Stft => ("time (s)", vec![panel("|STFT30| (Pa)", series(&t, "t", &chans, 1.0)?)], "Carrier magnitude per chamber"),
        PlotKind::Sliding => (
            "time (s)",
            vec![
                panel("ch_all: mean |STFT30| (Pa)", series(&t, "t", &["ch_all"], 1.0)?),
                panel("ch_diff: right - left (Pa)", series(&t, "t", &["ch_diff"], 1.0)?),
            ],
            "Sliding exploration",
        ),
        PlotKind::Normal => (
            "palpation angle (deg)",
            vec![
                Panel { y_label: "|DFT30| (Pa)".into(), series: series(&t, "angle", &chans, 1.0)?, markers: true },
                Panel { y_label: "left/right asymmetry (Pa)".into(), series: series(&t, "angle", &["asymmetry"], 1.0)?, markers: true },
            ],
            "Surface normal seeking",
        ),
        PlotKind::Labels => ("time (s)", vec![panel("contact label", series(&t, "t", &["c1", "c2", "c3", "c4"], 1.0)?)], "Quadrant contact labels"),
        PlotKind::Ablation => {
            let mbte = t.columns_with_prefix("mbte_median_ms@");
            let refs: Vec<&str> = mbte.iter().map(String::as_str).collect();
            let mut p = vec![Panel { y_label: "test MSE".into(), series: series(&t, "h_ms", &["mse"], 1.0)?, markers: true }];
            if !refs.is_empty() {
                p.push(Panel { y_label: "median break-time error (ms)".into(), series: series(&t, "h_ms", &refs, 1.0)?, markers: true });
            }
            ("horizon h (ms)", p, "Horizon ablation")
        }
    };
    let svg = render(a.title.as_deref().unwrap_or(default_title), x_label, &panels);
    let path = ctx.out_path(&format!("{}.svg", a.kind.name()));
    std::fs::write(&path, svg).map_err(|e| CliError::io(&path, e))
}

//! On-disk layout of simulated trials and their labels.

use std::path::{Path, PathBuf};

use cup_learn::TrialRecord;
use pneuma_sim::trace::TraceMeta;
use pneuma_sim::Trace;

use crate::error::{CliError, Result};

pub const TRACE_FILE: &str = "trace.csv";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const LABEL_FILE: &str = "labels.csv";
pub const FRAME_DIR: &str = "frames";

pub fn trial_dir_name(index: usize) -> String {
    format!("trial_{index:04}")
}

/// `trial_NNNN` subdirectories of `root`, ordered by index.
pub fn trial_dirs(root: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let rd = std::fs::read_dir(root).map_err(|e| CliError::io(root, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| CliError::io(root, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(idx) = name.strip_prefix("trial_").and_then(|s| s.parse::<usize>().ok()) {
            if entry.path().is_dir() {
                out.push((idx, entry.path()));
            }
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(CliError::Config(format!("{} contains no trial_NNNN directories", root.display())));
    }
    Ok(out)
}

/// Trace plus its scenario metadata when present.
pub fn load_trace(dir_or_file: &Path) -> Result<Trace> {
    let (file, dir) = if dir_or_file.is_dir() {
        (dir_or_file.join(TRACE_FILE), dir_or_file.to_path_buf())
    } else {
        (dir_or_file.to_path_buf(), dir_or_file.parent().map(Path::to_path_buf).unwrap_or_default())
    };
    let mut trace = Trace::load(&file).map_err(|e| match e {
        pneuma_sim::SimError::Io(io) => CliError::io(&file, io),
        other => other.into(),
    })?;
    let meta = dir.join(SCENARIO_FILE);
    if meta.exists() {
        let text = std::fs::read_to_string(&meta).map_err(|e| CliError::io(&meta, e))?;
        trace.meta = Some(serde_json::from_str::<TraceMeta>(&text)?);
    }
    Ok(trace)
}

pub fn save_trace(dir: &Path, trace: &Trace) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    trace.save(&dir.join(TRACE_FILE))?;
    if let Some(meta) = &trace.meta {
        let path = dir.join(SCENARIO_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(meta)? + "\n").map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

/// Trial records from a simulated batch. Labels come from `labels` when
/// given (one `trial_NNNN/labels.csv` per trial), otherwise from the
/// simulated contact state.
pub fn load_records(sim: &Path, labels: Option<&Path>) -> Result<Vec<TrialRecord>> {
    trial_dirs(sim)?
        .into_iter()
        .map(|(idx, dir)| {
            let trace = load_trace(&dir)?;
            let Some(root) = labels else { return Ok(TrialRecord::from_trace(idx, &trace)) };
            let path = root.join(trial_dir_name(idx)).join(LABEL_FILE);
            if !path.exists() {
                return Err(CliError::Config(format!("missing labels for trial {idx}: {}", path.display())));
            }
            let rows = cup_labels::io::read_labels(&path)?;
            if rows.len() != trace.len() {
                return Err(CliError::Config(format!(
                    "{}: {} label rows for a {}-sample trace",
                    path.display(),
                    rows.len(),
                    trace.len()
                )));
            }
            Ok(TrialRecord::with_labels(idx, &trace, rows.into_iter().map(|r| r.1).collect()))
        })
        .collect()
}

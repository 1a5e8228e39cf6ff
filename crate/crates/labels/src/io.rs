//! On-disk frame sequences and label tables.
//!
//! A trial directory holds `frame_<index>.pgm`, `centers.csv`
//! (`index,t,x,y,yaw`, the renderer's ground truth; only `t` is used for
//! labelling) and `orientation.csv` (`t,yaw` at 10 Hz).

use std::path::Path;

use pneuma_sim::frame::FrameSequence;
use pneuma_sim::Frame;

use crate::error::{LabelError, Result};
use crate::sequence::QuadrantLabel;
use crate::stats::BreakStats;

/// A trial read back from disk.
#[derive(Clone, Debug)]
pub struct StoredSequence {
    pub frames: Vec<Frame>,
    pub truth: Vec<(f64, f64)>,
    pub orientation: Vec<(f64, f64)>,
}

pub fn write_sequence(dir: &Path, seq: &FrameSequence, orientation: &[(f64, f64)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("centers.csv"))?;
    w.write_record(["index", "t", "x", "y", "yaw"])?;
    for ((f, c), yaw) in seq.frames.iter().zip(&seq.centers).zip(&seq.orientation) {
        f.save(&dir.join(format!("frame_{}.pgm", f.index)))?;
        w.write_record([f.index.to_string(), f.t.to_string(), c.0.to_string(), c.1.to_string(), yaw.to_string()])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("orientation.csv"))?;
    w.write_record(["t", "yaw"])?;
    for (t, y) in orientation {
        w.write_record([t.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse(what: &str, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| LabelError::Parse { what: what.into(), detail: format!("not a number: {s:?}") })
}

fn read_table(path: &Path, cols: usize) -> Result<Vec<Vec<f64>>> {
    let name = path.display().to_string();
    let mut r = csv::Reader::from_path(path)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() < cols {
                return Err(LabelError::Parse { what: name.clone(), detail: format!("expected {cols} columns, got {}", rec.len()) });
            }
            rec.iter().take(cols).map(|s| parse(&name, s)).collect()
        })
        .collect()
}

pub fn read_orientation(path: &Path) -> Result<Vec<(f64, f64)>> {
    Ok(read_table(path, 2)?.into_iter().map(|r| (r[0], r[1])).collect())
}

pub fn read_sequence(dir: &Path) -> Result<StoredSequence> {
    let rows = read_table(&dir.join("centers.csv"), 4)?;
    let mut frames = Vec::with_capacity(rows.len());
    let mut truth = Vec::with_capacity(rows.len());
    for r in rows {
        let index = r[0] as usize;
        let mut f = Frame::load(&dir.join(format!("frame_{index}.pgm")))?;
        f.index = index;
        f.t = r[1];
        frames.push(f);
        truth.push((r[2], r[3]));
    }
    let orientation = read_orientation(&dir.join("orientation.csv"))?;
    Ok(StoredSequence { frames, truth, orientation })
}

pub fn write_labels(path: &Path, labels: &[QuadrantLabel]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "c1", "c2", "c3", "c4"])?;
    for l in labels {
        let mut row = vec![l.t.to_string()];
        row.extend(l.values.iter().map(|v| format!("{v:.6}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labels(path: &Path) -> Result<Vec<(f64, [f64; 4])>> {
    Ok(read_table(path, 5)?.into_iter().map(|r| (r[0], [r[1], r[2], r[3], r[4]])).collect())
}

pub fn write_break_stats(path: &Path, rows: &[BreakStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["threshold", "q1", "q2", "q3", "q4", "trials", "excluded"])?;
    for s in rows {
        let mut row = vec![s.threshold.to_string()];
        row.extend(s.rates.iter().map(|v| format!("{v:.4}")));
        row.push(s.trials.to_string());
        row.push(s.excluded.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

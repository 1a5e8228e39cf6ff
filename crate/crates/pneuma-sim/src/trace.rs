//! Time-aligned multichannel record of one run.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scenario::Scenario;
use crate::CHAMBERS;

pub const TRACE_HEADER: [&str; 15] =
    ["t", "p1", "p2", "p3", "p4", "fx", "fy", "fz", "tx", "ty", "tz", "c1", "c2", "c3", "c4"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub t: Vec<f64>,
    /// Vacuum pressure per chamber (Pa).
    pub p_vac: Vec<[f64; CHAMBERS]>,
    /// `[fx, fy, fz, tx, ty, tz]` (N, N·m).
    pub ft: Vec<[f64; 6]>,
    pub contact: Vec<[f64; CHAMBERS]>,
    /// `[yaw (rad), drift_x (px), drift_y (px)]` of the seal seen by the camera.
    pub pose: Vec<[f64; 3]>,
    pub meta: Option<TraceMeta>,
}

impl Trace {
    pub fn with_capacity(meta: TraceMeta, n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            p_vac: Vec::with_capacity(n),
            ft: Vec::with_capacity(n),
            contact: Vec::with_capacity(n),
            pose: Vec::with_capacity(n),
            meta: Some(meta),
        }
    }

    pub fn push(&mut self, t: f64, p: [f64; CHAMBERS], ft: [f64; 6], contact: [f64; CHAMBERS], pose: [f64; 3]) {
        self.t.push(t);
        self.p_vac.push(p);
        self.ft.push(ft);
        self.contact.push(contact);
        self.pose.push(pose);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, k: usize) -> Vec<f64> {
        self.p_vac.iter().map(|p| p[k]).collect()
    }

    pub fn duration(&self) -> f64 {
        match (self.t.first(), self.t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if [self.p_vac.len(), self.ft.len(), self.contact.len(), self.pose.len()].iter().any(|&m| m != n) {
            return Err(SimError::Parse { what: "trace".into(), detail: "channel lengths differ".into() });
        }
        if self.t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::Parse { what: "trace".into(), detail: "timestamps not strictly increasing".into() });
        }
        if self.contact.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(SimError::Parse { what: "trace".into(), detail: "contact outside [0, 1]".into() });
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(TRACE_HEADER).map_err(csv_err)?;
        for i in 0..self.len() {
            let mut row = Vec::with_capacity(15);
            row.push(self.t[i].to_string());
            row.extend(self.p_vac[i].iter().map(f64::to_string));
            row.extend(self.ft[i].iter().map(f64::to_string));
            row.extend(self.contact[i].iter().map(f64::to_string));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_err)?.clone();
        if header.iter().ne(TRACE_HEADER.iter().copied()) {
            return Err(SimError::Parse {
                what: "trace header".into(),
                detail: format!("expected {}, got {}", TRACE_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut trace = Trace { t: vec![], p_vac: vec![], ft: vec![], contact: vec![], pose: vec![], meta: None };
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let v: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| SimError::Parse { what: format!("trace row {}", line + 2), detail: e.to_string() })?;
            if v.len() != 15 {
                return Err(SimError::Parse { what: format!("trace row {}", line + 2), detail: "expected 15 fields".into() });
            }
            trace.push(
                v[0],
                [v[1], v[2], v[3], v[4]],
                [v[5], v[6], v[7], v[8], v[9], v[10]],
                [v[11], v[12], v[13], v[14]],
                [0.0; 3],
            );
        }
        trace.validate()?;
        Ok(trace)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Parse { what: "csv".into(), detail: e.to_string() }
}

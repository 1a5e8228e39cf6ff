//! Per-run manifest: what was run, on what, and the hash of every output.

use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub config: Option<String>,
    pub config_sha256: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> =
        std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(|e| CliError::io(dir, e))?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(root, &p, out)?;
        } else if p != root.join(MANIFEST) {
            out.push(p);
        }
    }
    Ok(())
}

/// Start time of a run on the output filesystem's clock, which can lag the
/// system clock by a scheduler tick.
pub fn run_marker(out: &Path) -> Result<SystemTime> {
    let marker = out.join(".run-start");
    std::fs::write(&marker, b"").map_err(|e| CliError::io(&marker, e))?;
    let t = std::fs::metadata(&marker).and_then(|m| m.modified()).map_err(|e| CliError::io(&marker, e))?;
    std::fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    Ok(t)
}

/// Hash every file under `out` written since `since`, except the manifest.
pub fn digest_outputs(out: &Path, since: SystemTime) -> Result<Vec<FileDigest>> {
    let mut files = Vec::new();
    walk(out, out, &mut files)?;
    files.retain(|p| std::fs::metadata(p).and_then(|m| m.modified()).is_ok_and(|t| t >= since));
    files
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/");
            Ok(FileDigest { path: rel, sha256: sha256_file(p)? })
        })
        .collect()
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> Result<()> {
        let path = out.join(MANIFEST);
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

//! Reproducibility manifests written next to every output artifact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ModelIoError;

/// Everything needed to re-run the command that produced a set of outputs:
/// the subcommand, its full flag set, the seed, the library version, and
/// timestamps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn begin(command: &str, args: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            args,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: chrono::Utc::now().to_rfc3339(),
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes `manifest.json` into `dir` atomically (temp file + rename).
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf, ModelIoError> {
        self.finished_at = chrono::Utc::now().to_rfc3339();
        let target = dir.join("manifest.json");
        let io_err = |source| ModelIoError::Io {
            path: target.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        serde_json::to_writer_pretty(&mut tmp, &self).map_err(|e| ModelIoError::Malformed {
            path: target.clone(),
            message: e.to_string(),
        })?;
        tmp.write_all(b"\n").map_err(io_err)?;
        tmp.flush().map_err(io_err)?;
        tmp.persist(&target).map_err(|e| ModelIoError::Io {
            path: target.clone(),
            source: e.error,
        })?;
        Ok(target)
    }
}

/// Reads a manifest back; used by tests and tooling.
pub fn load_manifest(path: &Path) -> Result<RunManifest, ModelIoError> {
    let text = fs::read_to_string(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ModelIoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::begin("synth", vec!["--dim".into(), "5".into()], Some(7));
        m.record_output(&dir.path().join("train.csv"));
        let path = m.finish(dir.path()).unwrap();
        let loaded = load_manifest(&path).unwrap();
        assert_eq!(loaded.command, "synth");
        assert_eq!(loaded.seed, Some(7));
        assert_eq!(loaded.outputs.len(), 1);
        assert!(!loaded.finished_at.is_empty());
    }
}

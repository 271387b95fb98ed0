//! Run manifests: a JSON record of what a pipeline run did, written next to
//! its artifacts so experiments can be resumed or audited per stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError};

/// Outcome of one pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Failed,
    /// Not reached because an earlier stage failed.
    Skipped,
}

/// One stage's record in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    /// Files the stage wrote, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub duration_ms: u64,
    /// Single-line error for failed stages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The manifest for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Deterministic id derived from the configuration and command inputs,
    /// so identical runs share an id.
    pub run_id: String,
    /// Hash of the effective configuration.
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    /// Builds a manifest shell; `input_digest` distinguishes runs of the
    /// same config on different command inputs.
    pub fn new(config_hash: &str, seed: u64, input_digest: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(config_hash.as_bytes());
        hasher.update([0]);
        hasher.update(seed.to_le_bytes());
        hasher.update([0]);
        hasher.update(input_digest.as_bytes());
        let run_id = hex::encode(&hasher.finalize()[..8]);
        RunManifest {
            run_id,
            config_hash: config_hash.to_string(),
            seed,
            stages: Vec::new(),
        }
    }

    /// Every output path across all stages.
    pub fn all_outputs(&self) -> Vec<&str> {
        self.stages
            .iter()
            .flat_map(|s| s.outputs.iter().map(String::as_str))
            .collect()
    }

    /// This manifest with every duration zeroed, for comparisons that must
    /// ignore timing.
    pub fn without_timings(&self) -> RunManifest {
        let mut copy = self.clone();
        for stage in &mut copy.stages {
            stage.duration_ms = 0;
        }
        copy
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let json =
            serde_json::to_string_pretty(self).expect("manifest serialization cannot fail");
        std::fs::write(path, json + "\n").map_err(|source| io_error(path, source))
    }

    pub fn load(path: &Path) -> Result<RunManifest, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| io_error(path, source))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad manifest {}: {e}", path.display())))
    }
}

/// Renders a path relative to `base` when possible (manifests should not
/// leak absolute directories), absolute otherwise.
pub fn relative_to(path: &Path, base: &Path) -> String {
    path.strip_prefix(base)
        .map(|p| p.display().to_string())
        .unwrap_or_else(|_| path.display().to_string())
}

/// Timing helper: runs `f`, returning its result and elapsed milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = std::time::Instant::now();
    let value = f();
    (value, start.elapsed().as_millis() as u64)
}

/// Joins `dir` and a file name, creating `dir` first.
pub fn prepare_output(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| io_error(dir, source))?;
    Ok(dir.join(name))
}

//! Run manifests: content-hashed run ids, artifact digests, replay support.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fracshe_core::error::{Error, Result};

pub fn code_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Run id: hash of the resolved config and the code version — identical
/// inputs always map to the same id, timestamps never enter.
pub fn run_id(resolved_config: &str, version: &str) -> String {
    let mut h = Sha256::new();
    h.update(resolved_config.as_bytes());
    h.update(b"\x00");
    h.update(version.as_bytes());
    hex::encode(&h.finalize()[..8])
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub experiment: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub metrics: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub code_version: String,
    pub command: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub resolved_config: serde_json::Value,
    pub artifacts: Vec<ArtifactRecord>,
    pub verdicts: Vec<VerdictRecord>,
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writer that collects artifacts under `<output_dir>/<run_id>/` and records
/// their digests for the manifest.
pub struct RunWriter {
    dir: PathBuf,
    artifacts: Vec<ArtifactRecord>,
}

impl RunWriter {
    /// Create the run directory and persist the resolved config immediately:
    /// the manifest exists (artifacts pending) before any computation runs.
    pub fn create(output_dir: &Path, run_id: &str, record: &RunRecord) -> Result<Self> {
        let dir = output_dir.join(run_id);
        fs::create_dir_all(&dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        let text = serde_json::to_string_pretty(record)
            .map_err(|e| Error::Config(format!("manifest serialize: {e}")))?;
        fs::write(dir.join("manifest.json"), text)
            .map_err(|e| Error::Config(format!("cannot write manifest: {e}")))?;
        Ok(RunWriter {
            dir,
            artifacts: Vec::new(),
        })
    }

    pub fn write_artifact(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(ArtifactRecord {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn finish(self, record: &mut RunRecord) -> Result<PathBuf> {
        record.artifacts = self.artifacts;
        record.finished_unix = now_unix();
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(record)
            .map_err(|e| Error::Config(format!("manifest serialize: {e}")))?;
        fs::write(&path, text).map_err(|e| Error::Config(format!("cannot write manifest: {e}")))?;
        Ok(path)
    }
}

pub fn load_manifest(output_dir: &Path, run_id: &str) -> Result<RunRecord> {
    let path = output_dir.join(run_id).join("manifest.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("manifest parse: {e}")))
}

//! `manifest.json`: what a run read, how it was configured and what it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Ok,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub finished_at: Option<u64>,
    pub status: Status,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    /// Hex SHA-256 of each input, keyed by role (`inputs`, `corpus`, `lexicon`, ...).
    pub fingerprints: BTreeMap<String, String>,
    pub config: Config,
    pub stages: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<PathBuf>,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            started_at: now(),
            finished_at: None,
            status: Status::Running,
            failed_stage: None,
            error: None,
            fingerprints: BTreeMap::new(),
            config: config.clone(),
            stages: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn stage<T: Serialize>(&mut self, name: &str, counts: &T) {
        self.stages.insert(
            name.to_string(),
            serde_json::to_value(counts).expect("counts serialize"),
        );
    }

    pub fn succeed(&mut self) {
        self.status = Status::Ok;
        self.finished_at = Some(now());
    }

    pub fn fail(&mut self, stage: &str, error: &Error) {
        self.status = Status::Failed;
        self.failed_stage = Some(stage.to_string());
        self.error = Some(error.to_string());
        self.finished_at = Some(now());
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Hex SHA-256 of a file's bytes.
pub fn file_fingerprint(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// One digest over several files, order sensitive. Unreadable files hash
/// as the empty marker so the value still describes what was attempted.
pub fn files_fingerprint(paths: &[PathBuf]) -> String {
    let mut hasher = Sha256::new();
    for p in paths {
        let digest = file_fingerprint(p).unwrap_or_else(|_| "unreadable".into());
        hasher.update(digest.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

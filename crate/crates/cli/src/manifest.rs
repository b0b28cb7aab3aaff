//! Run manifest: tool version, input and output hashes, per-stage timings
//! and the complete resolved configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::pipeline::run;
use crate::Failure;

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "roadnet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: ToolInfo,
    pub threads: usize,
    pub inputs: BTreeMap<String, InputRecord>,
    /// Output path relative to the output directory, mapped to its hash.
    pub outputs: BTreeMap<String, String>,
    pub timing_ms: BTreeMap<String, u64>,
    pub config: RunConfig,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_bytes(&std::fs::read(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub output_dir: PathBuf,
    pub matched: usize,
    /// Outputs whose hash differs, plus outputs present on only one side.
    pub mismatched: Vec<String>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Re-runs the configuration echoed in a manifest, optionally into another
/// directory, and compares every output hash. Inputs must be unchanged.
pub fn replay(manifest_path: &Path, output_dir: Option<&Path>) -> Result<ReplayReport, Failure> {
    let manifest = Manifest::load(manifest_path)?;
    for (label, rec) in &manifest.inputs {
        let now = sha256_file(&rec.path)
            .map_err(|e| Failure::validation(format!("input {label} {}: {e}", rec.path.display())))?;
        if now != rec.sha256 {
            return Err(Failure::validation(format!(
                "input {label} {} changed since the manifest was written",
                rec.path.display()
            )));
        }
    }
    let mut config = manifest.config.clone();
    if let Some(dir) = output_dir {
        config.output_dir = dir.to_path_buf();
    }
    let report = run(&config)?;
    let mut mismatched = Vec::new();
    let mut matched = 0;
    for (path, hash) in &manifest.outputs {
        match report.outputs.get(path) {
            Some(h) if h == hash => matched += 1,
            _ => mismatched.push(path.clone()),
        }
    }
    mismatched.extend(report.outputs.keys().filter(|p| !manifest.outputs.contains_key(*p)).cloned());
    Ok(ReplayReport {
        output_dir: config.output_dir,
        matched,
        mismatched,
    })
}

//! Executing a resolved config into an output directory.

use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.json";
/// Overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "INVLAB_OUTPUT_DIR";
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Succeeded,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationRecord {
    pub id: String,
    pub op: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub name: String,
    pub config_hash: String,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub operations: Vec<OperationRecord>,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn all_succeeded(&self) -> bool {
        self.operations.iter().all(|o| o.status == Status::Succeeded)
    }

    pub fn artifact(&self, path: &str) -> Option<&ArtifactRecord> {
        self.artifacts.iter().find(|a| a.path == path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory after the environment override.
pub fn effective_output_dir(config: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => config.output_dir.clone(),
    }
}

/// Writes via a temporary sibling and a rename, so readers never observe a
/// partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(name)).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Runs every operation in order into `out_dir`. Engine failures are
/// recorded per operation; only operations listing a failed one in `after`
/// are skipped. I/O errors on the output directory abort the run.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> std::io::Result<RunManifest> {
    let started_at = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
    fs::create_dir_all(out_dir)?;
    let resolved = config.to_json();
    let mut artifacts = Vec::new();
    let mut records: Vec<OperationRecord> = Vec::new();

    let emit = |name: &str, bytes: &[u8], artifacts: &mut Vec<ArtifactRecord>| -> std::io::Result<()> {
        write_atomic(out_dir, name, bytes)?;
        artifacts.push(ArtifactRecord {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    };
    emit(RESOLVED_CONFIG_FILE, resolved.as_bytes(), &mut artifacts)?;

    for op in &config.operations {
        let blocked = op.after.iter().find(|dep| {
            records
                .iter()
                .find(|r| &r.id == *dep)
                .is_none_or(|r| r.status != Status::Succeeded)
        });
        let mut record = OperationRecord {
            id: op.id.clone(),
            op: op.kind.name().to_string(),
            status: Status::Succeeded,
            error: None,
            artifacts: Vec::new(),
        };
        if let Some(dep) = blocked {
            record.status = Status::Skipped;
            record.error = Some(format!("dependency '{dep}' did not succeed"));
            records.push(record);
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(|| op.kind.execute(&op.id, config)))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "operation panicked".into());
                Err(format!("internal error: {msg}"))
            });
        match outcome {
            Ok(files) => {
                for f in files {
                    emit(&f.name, &f.bytes, &mut artifacts)?;
                    record.artifacts.push(f.name);
                }
            }
            Err(e) => {
                record.status = Status::Failed;
                record.error = Some(e);
            }
        }
        records.push(record);
    }

    let manifest = RunManifest {
        name: config.name.clone(),
        config_hash: sha256_hex(resolved.as_bytes()),
        tool_version: TOOL_VERSION.to_string(),
        started_at,
        finished_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        operations: records,
        artifacts,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    write_atomic(out_dir, MANIFEST_FILE, &bytes)?;
    Ok(manifest)
}

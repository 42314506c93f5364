//! Rendering a finished run from its manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use crate::run::{sha256_hex, RunManifest, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("integrity error: {file} {problem}")]
    Integrity { file: PathBuf, problem: String },
}

fn read(path: &Path) -> Result<Vec<u8>, ReportError> {
    std::fs::read(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a manifest and checks every artifact against its digest.
pub fn load_verified(manifest_path: &Path) -> Result<RunManifest, ReportError> {
    let bytes = read(manifest_path)?;
    let manifest: RunManifest = serde_json::from_slice(&bytes).map_err(|e| ReportError::Manifest {
        path: manifest_path.to_path_buf(),
        message: e.to_string(),
    })?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    for a in &manifest.artifacts {
        let file = dir.join(&a.path);
        let content = std::fs::read(&file).map_err(|e| ReportError::Integrity {
            file: file.clone(),
            problem: format!("is unreadable ({e})"),
        })?;
        if sha256_hex(&content) != a.sha256 {
            return Err(ReportError::Integrity {
                file,
                problem: "does not match its recorded digest".into(),
            });
        }
    }
    Ok(manifest)
}

pub fn report(manifest_path: &Path, format: Format) -> Result<String, ReportError> {
    let manifest = load_verified(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    Ok(match format {
        Format::Json => {
            String::from_utf8(read(manifest_path)?).map_err(|e| ReportError::Manifest {
                path: manifest_path.to_path_buf(),
                message: e.to_string(),
            })?
        }
        Format::Text => render_text(&manifest, dir),
        Format::Csv => render_csv(&manifest, dir),
    })
}

/// Main JSON artifact of an operation, if any.
fn main_artifact(dir: &Path, id: &str, artifacts: &[String]) -> Option<Value> {
    let name = format!("{id}.json");
    artifacts.iter().find(|a| **a == name)?;
    serde_json::from_slice(&std::fs::read(dir.join(name)).ok()?).ok()
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("none".into()),
        _ => None,
    }
}

fn summary(op: &str, v: &Value) -> String {
    match op {
        "uniqueness_verdict" => format!(
            "verdict {} (invariant dim {}, irreducible {}, domination {})",
            scalar(&v["verdict"]).unwrap_or_default(),
            v["invariant_dim"],
            v["irreducible"],
            v["domination_holds"]
        ),
        "coexistence_scan" => v["reports"]
            .as_array()
            .map(|rows| {
                rows.iter()
                    .map(|r| {
                        format!(
                            "beta {} seed {}: m+ {:.4} m- {:.4} separated {}",
                            r["beta"],
                            r["seed"],
                            r["m_plus"].as_f64().unwrap_or(f64::NAN),
                            r["m_minus"].as_f64().unwrap_or(f64::NAN),
                            r["separated"]
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("; ")
            })
            .unwrap_or_default(),
        _ => match v.as_object() {
            Some(obj) => {
                let parts: Vec<String> = obj
                    .iter()
                    .filter_map(|(k, x)| scalar(x).map(|s| format!("{k} {s}")))
                    .collect();
                if parts.is_empty() {
                    "ok".into()
                } else {
                    parts.join(", ")
                }
            }
            None => "ok".into(),
        },
    }
}

/// One line per operation.
fn render_text(m: &RunManifest, dir: &Path) -> String {
    let mut out = String::new();
    for op in &m.operations {
        let line = match op.status {
            Status::Succeeded => main_artifact(dir, &op.id, &op.artifacts)
                .map(|v| summary(&op.op, &v))
                .unwrap_or_else(|| "ok".into()),
            Status::Failed => format!("FAILED: {}", op.error.as_deref().unwrap_or("unknown error")),
            Status::Skipped => format!("skipped: {}", op.error.as_deref().unwrap_or("")),
        };
        let _ = writeln!(out, "{} [{}] {}", op.id, op.op, line);
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One table per operation, separated by blank lines. Scans give one row
/// per `(β, seed)`; other operations give their scalar fields.
fn render_csv(m: &RunManifest, dir: &Path) -> String {
    let mut sections = Vec::new();
    for op in &m.operations {
        let mut s = String::new();
        let value = (op.status == Status::Succeeded)
            .then(|| main_artifact(dir, &op.id, &op.artifacts))
            .flatten();
        match (op.op.as_str(), value) {
            ("coexistence_scan", Some(v)) => {
                s.push_str("id,beta,seed,m_plus,m_minus,separated,tv_distance\n");
                for r in v["reports"].as_array().into_iter().flatten() {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        csv_field(&op.id),
                        r["beta"],
                        r["seed"],
                        r["m_plus"],
                        r["m_minus"],
                        r["separated"],
                        r["tv_distance"]
                    );
                }
            }
            (_, Some(v)) => {
                s.push_str("id,op,status,field,value\n");
                for (k, x) in v.as_object().into_iter().flatten() {
                    if let Some(val) = scalar(x) {
                        let _ = writeln!(s, "{},{},succeeded,{},{}", csv_field(&op.id), op.op, k, csv_field(&val));
                    }
                }
            }
            (_, None) => {
                s.push_str("id,op,status,field,value\n");
                let status = format!("{:?}", op.status).to_lowercase();
                let _ = writeln!(
                    s,
                    "{},{},{},error,{}",
                    csv_field(&op.id),
                    op.op,
                    status,
                    csv_field(op.error.as_deref().unwrap_or(""))
                );
            }
        }
        sections.push(s);
    }
    sections.join("\n")
}

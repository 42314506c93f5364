//! Experiment configs: parsing, validation and resolution.
//!
//! Validation never stops at the first problem; every failure is reported
//! with the JSON path it refers to. A resolved config has file references
//! inlined, defaults expanded and an absolute output directory, so validating
//! its serialization gives it back unchanged.

use std::fmt;
use std::path::{Path, PathBuf};

use kernel_core::RateMatrix;
use process_sim::ProcessSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ops::{OpKind, Requirement};

pub const DEFAULT_OUTPUT_DIR: &str = "output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Montecarlo,
    Combined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub id: String,
    /// Operations that must succeed before this one runs.
    pub after: Vec<String>,
    pub kind: OpKind,
}

impl Serialize for Operation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut v = serde_json::to_value(&self.kind).map_err(serde::ser::Error::custom)?;
        let obj = v.as_object_mut().expect("operations serialize to objects");
        obj.insert("id".into(), Value::String(self.id.clone()));
        obj.insert("after".into(), serde_json::to_value(&self.after).expect("strings"));
        v.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub name: String,
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<RateMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    pub operations: Vec<Operation>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Generator for exact operations: the declared one, or that of a
    /// finite-ctmc process.
    pub fn exact_generator(&self) -> Option<&RateMatrix> {
        self.generator.as_ref().or(match &self.process {
            Some(ProcessSpec::FiniteCtmc { generator, .. }) => Some(generator),
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    /// JSON path inside the config, or the file path for unreadable files.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", e.path, e.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

struct Collector(Vec<ValidationError>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ValidationError {
            path: path.into(),
            message: message.into(),
        });
    }

    /// Deserializes `value`, recording a located error on failure.
    fn parse<T: DeserializeOwned>(&mut self, prefix: &str, value: Value) -> Option<T> {
        match serde_path_to_error::deserialize::<_, T>(value) {
            Ok(v) => Some(v),
            Err(e) => {
                let inner = e.path().to_string();
                let path = match (prefix.is_empty(), inner.as_str()) {
                    (_, ".") => prefix.to_string(),
                    (true, _) => inner,
                    (false, p) if p.starts_with('[') => format!("{prefix}{p}"),
                    (false, p) => format!("{prefix}.{p}"),
                };
                self.push(path, e.into_inner().to_string());
                None
            }
        }
    }
}

/// Reads and validates a config file; relative paths resolve against its
/// directory.
pub fn validate_path(path: &Path) -> Result<ExperimentConfig, ValidationErrors> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ValidationErrors(vec![ValidationError {
            path: path.display().to_string(),
            message: format!("cannot read config: {e}"),
        }])
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    validate_str(&text, base)
}

pub fn validate_str(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ValidationErrors> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        ValidationErrors(vec![ValidationError {
            path: String::new(),
            message: format!("invalid JSON: {e}"),
        }])
    })?;
    validate_value(value, base_dir)
}

const KNOWN_KEYS: [&str; 7] = ["name", "engine", "generator", "process", "operations", "seeds", "outputDir"];

pub fn validate_value(value: Value, base_dir: &Path) -> Result<ExperimentConfig, ValidationErrors> {
    let mut errs = Collector(Vec::new());
    let Value::Object(mut obj) = value else {
        return Err(ValidationErrors(vec![ValidationError {
            path: String::new(),
            message: "config must be a JSON object".into(),
        }]));
    };
    let base = absolute(base_dir);
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            errs.push(key.clone(), "unknown field");
        }
    }

    let name = match obj.remove("name") {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s),
        Some(Value::String(_)) => {
            errs.push("name", "must be nonempty");
            None
        }
        Some(_) => {
            errs.push("name", "must be a string");
            None
        }
        None => {
            errs.push("name", "missing field");
            None
        }
    };
    let engine = match obj.remove("engine") {
        Some(v) => errs.parse::<Engine>("engine", v),
        None => {
            errs.push("engine", "missing field");
            None
        }
    };
    let declared_sources = ["generator", "process"].iter().filter(|k| obj.contains_key(**k)).count();
    let generator = obj
        .remove("generator")
        .and_then(|v| load_source(&mut errs, "generator", v, &base, |p| {
            RateMatrix::load(p).map_err(|e| e.to_string())
        }));
    let process = obj.remove("process").and_then(|v| {
        load_source(&mut errs, "process", v, &base, |p| {
            let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
            serde_json::from_str::<ProcessSpec>(&text).map_err(|e| e.to_string())
        })
    });
    if let Some(p) = &process {
        if let Err(e) = p.validate() {
            errs.push("process", e.to_string());
        }
    }
    let seeds: Vec<u64> = obj
        .remove("seeds")
        .and_then(|v| errs.parse("seeds", v))
        .unwrap_or_default();
    let output_dir = match obj.remove("outputDir") {
        Some(Value::String(s)) if !s.is_empty() => base.join(s),
        Some(_) => {
            errs.push("outputDir", "must be a nonempty string");
            base.join(DEFAULT_OUTPUT_DIR)
        }
        None => base.join(DEFAULT_OUTPUT_DIR),
    };

    let operations = match obj.remove("operations") {
        Some(Value::Array(items)) => {
            if items.is_empty() {
                errs.push("operations", "at least one operation is required");
            }
            parse_operations(&mut errs, items)
        }
        Some(_) => {
            errs.push("operations", "must be an array");
            Vec::new()
        }
        None => {
            errs.push("operations", "missing field");
            Vec::new()
        }
    };

    // Requirement checks against a source that failed to load would only
    // repeat that failure.
    let sources_loaded = [generator.is_some(), process.is_some()].iter().filter(|b| **b).count() == declared_sources;
    if let Some(engine) = engine {
        if engine == Engine::Montecarlo && seeds.is_empty() {
            errs.push("seeds", "montecarlo configs need at least one seed");
        }
        let tmp = ExperimentConfig {
            name: String::new(),
            engine,
            generator: generator.clone(),
            process: process.clone(),
            operations: Vec::new(),
            seeds: seeds.clone(),
            output_dir: PathBuf::new(),
        };
        for (i, op) in operations.iter().enumerate().filter(|_| sources_loaded) {
            for problem in op.kind.check(&tmp) {
                errs.push(format!("operations[{i}]"), problem);
            }
        }
    }

    if !errs.0.is_empty() {
        return Err(ValidationErrors(errs.0));
    }
    Ok(ExperimentConfig {
        name: name.expect("checked"),
        engine: engine.expect("checked"),
        generator,
        process,
        operations,
        seeds,
        output_dir,
    })
}

/// Inline value or `{"file": path}` reference.
fn load_source<T: DeserializeOwned>(
    errs: &mut Collector,
    field: &str,
    v: Value,
    base: &Path,
    load: impl Fn(&Path) -> Result<T, String>,
) -> Option<T> {
    if let Value::Object(m) = &v {
        if m.len() == 1 && m.contains_key("file") {
            let Some(Value::String(f)) = m.get("file") else {
                errs.push(format!("{field}.file"), "must be a string");
                return None;
            };
            let path = base.join(f);
            if !path.is_file() {
                errs.push(format!("{field}.file"), format!("file not found: {}", path.display()));
                return None;
            }
            return match load(&path) {
                Ok(t) => Some(t),
                Err(e) => {
                    errs.push(format!("{field}.file"), format!("{}: {e}", path.display()));
                    None
                }
            };
        }
    }
    errs.parse(field, v)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        && !id.starts_with('-')
}

fn parse_operations(errs: &mut Collector, items: Vec<Value>) -> Vec<Operation> {
    let mut ops = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    for (i, item) in items.into_iter().enumerate() {
        let prefix = format!("operations[{i}]");
        let Value::Object(mut m) = item else {
            errs.push(prefix, "must be an object");
            continue;
        };
        let id = match m.remove("id") {
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                errs.push(format!("{prefix}.id"), "must be a string");
                None
            }
            None => None,
        };
        let after: Vec<String> = m
            .remove("after")
            .and_then(|v| errs.parse(&format!("{prefix}.after"), v))
            .unwrap_or_default();
        let Some(kind) = errs.parse::<OpKind>(&prefix, Value::Object(m)) else {
            continue;
        };
        let id = id.unwrap_or_else(|| format!("{}-{}", kind.name(), i + 1));
        if !valid_id(&id) {
            errs.push(
                format!("{prefix}.id"),
                format!("'{id}' must be 1-64 characters from [A-Za-z0-9_-], not starting with '-'"),
            );
        } else if seen.contains(&id) {
            errs.push(format!("{prefix}.id"), format!("duplicate id '{id}'"));
        }
        for (j, dep) in after.iter().enumerate() {
            if !seen.contains(dep) {
                errs.push(
                    format!("{prefix}.after[{j}]"),
                    format!("'{dep}' is not an earlier operation"),
                );
            }
        }
        seen.push(id.clone());
        ops.push(Operation { id, after, kind });
    }
    ops
}

fn absolute(p: &Path) -> PathBuf {
    let joined = if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().unwrap_or_default().join(p)
    };
    joined.canonicalize().unwrap_or(joined)
}

/// What an operation needs from the config, checked against it.
pub(crate) fn requirement_problems(req: Requirement, cfg: &ExperimentConfig) -> Vec<String> {
    let mut out = Vec::new();
    let engine_ok = match req {
        Requirement::Generator => cfg.engine != Engine::Montecarlo,
        Requirement::Process { .. } | Requirement::Standalone { .. } | Requirement::Box => {
            cfg.engine != Engine::Exact
        }
        Requirement::Both => cfg.engine == Engine::Combined,
    };
    if !engine_ok {
        out.push(format!("not available on the {:?} engine", cfg.engine).to_lowercase());
    }
    let needs_seeds = matches!(
        req,
        Requirement::Process { seeds: true } | Requirement::Standalone { seeds: true } | Requirement::Both
    );
    if needs_seeds && cfg.seeds.is_empty() {
        out.push("needs at least one seed".into());
    }
    let needs_generator = matches!(req, Requirement::Generator | Requirement::Both);
    if needs_generator && cfg.exact_generator().is_none() {
        out.push("needs a generator (or a finite-ctmc process)".into());
    }
    let needs_process = matches!(req, Requirement::Process { .. } | Requirement::Both | Requirement::Box);
    if needs_process && cfg.process.is_none() {
        out.push("needs a process".into());
    }
    out
}

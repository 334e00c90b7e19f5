//! Report envelopes: every run writes JSON carrying the schema version,
//! tool version, resolved configuration, arithmetic mode, and an input
//! digest, with a structural validation pass before anything reaches disk.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use treesurgeon_core::Scalar;

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Scalar rendering: exact values as fraction strings (lossless), float
/// values as JSON numbers.
pub fn scalar_json<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.to_string())
    } else {
        json!(v.to_f64())
    }
}

/// Facts about the input graph file embedded in the envelope.
pub struct GraphStamp {
    pub path: PathBuf,
    pub sha256: String,
    pub vertices: usize,
    pub pairs: usize,
    pub arithmetic: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Envelope {
    pub command: &'static str,
    pub arithmetic: String,
    pub graph: Option<Value>,
    pub payload: Value,
}

impl Envelope {
    pub fn new(command: &'static str, arithmetic: &str, payload: Value) -> Self {
        Envelope {
            command,
            arithmetic: arithmetic.to_string(),
            graph: None,
            payload,
        }
    }

    pub fn with_graph(mut self, stamp: &GraphStamp) -> Self {
        self.graph = Some(json!({
            "path": stamp.path.display().to_string(),
            "sha256": stamp.sha256,
            "vertices": stamp.vertices,
            "pairs": stamp.pairs,
        }));
        self
    }

    pub fn render(&self, config: &RunConfig) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "tool": {
                "name": "treesurgeon",
                "version": env!("CARGO_PKG_VERSION"),
            },
            "command": self.command,
            "arithmetic": self.arithmetic,
            "seed": config.seed,
            "graph": self.graph,
            "config": config.as_json(),
            "payload": self.payload,
        })
    }
}

/// Structural check applied to every envelope before it is written.
pub fn validate_envelope(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not a JSON object")?;
    for key in [
        "schema_version",
        "tool",
        "command",
        "arithmetic",
        "seed",
        "config",
        "payload",
    ] {
        if !obj.contains_key(key) {
            return Err(format!("report is missing `{key}`"));
        }
    }
    if obj["schema_version"].as_u64() != Some(SCHEMA_VERSION as u64) {
        return Err("unexpected schema_version".into());
    }
    let tool = obj["tool"].as_object().ok_or("`tool` is not an object")?;
    if !tool.contains_key("name") || !tool.contains_key("version") {
        return Err("`tool` must carry name and version".into());
    }
    match obj["arithmetic"].as_str() {
        Some("exact") | Some("float") => {}
        _ => return Err("`arithmetic` must be \"exact\" or \"float\"".into()),
    }
    if !obj["seed"].is_u64() {
        return Err("`seed` must be an unsigned integer".into());
    }
    if !obj["payload"].is_object() {
        return Err("`payload` must be an object".into());
    }
    Ok(())
}

/// One line of a batch (NDJSON) report.
pub fn validate_trial_line(v: &Value, keys: &[&str]) -> Result<(), String> {
    let obj = v.as_object().ok_or("trial line is not a JSON object")?;
    for key in keys {
        if !obj.contains_key(*key) {
            return Err(format!("trial line is missing `{key}`"));
        }
    }
    Ok(())
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| {
                CliError::usage(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn emit(sink: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match writeln!(sink, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::internal(e.to_string())),
        Ok(()) => Ok(()),
    }
}

/// Validate and write a single-document report.
pub fn write_report(
    envelope: &Envelope,
    config: &RunConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let doc = envelope.render(config);
    validate_envelope(&doc).map_err(CliError::internal)?;
    let mut sink = open_sink(out)?;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))?;
    emit(&mut *sink, &text)
}

/// Validate and write a batch report: one header line carrying the
/// envelope fields, then one JSON line per trial.
pub fn write_batch_report(
    envelope: &Envelope,
    config: &RunConfig,
    trials: &[Value],
    trial_keys: &[&str],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut header = envelope.render(config);
    let map = header.as_object_mut().expect("envelope renders an object");
    map.insert("lines".into(), json!(trials.len()));
    validate_envelope(&header).map_err(CliError::internal)?;
    for t in trials {
        validate_trial_line(t, trial_keys).map_err(CliError::internal)?;
    }
    let mut sink = open_sink(out)?;
    let mut text = serde_json::to_string(&header).map_err(|e| CliError::internal(e.to_string()))?;
    for t in trials {
        text.push('\n');
        text.push_str(&serde_json::to_string(t).map_err(|e| CliError::internal(e.to_string()))?);
    }
    emit(&mut *sink, &text)
}

/// Helper for payload maps built field by field.
pub fn object(fields: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

//! Artifact writers: the CSV series, the JSON summary, the resolved
//! configuration, and the error record on failure.
//!
//! Bytes are the contract. Floats are printed with 17 significant digits
//! so they round-trip exactly; CSV rows use CRLF; JSON is pretty-printed
//! with a trailing newline. The config digest is the SHA-256 of the exact
//! bytes of `resolved_config.json`.

use crate::config::RunConfig;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV cell. Floats get the full-precision scientific form; the rest
/// are plain.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::U(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

pub fn write_series(
    path: &Path,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    }
    std::fs::write(path, out)
}

/// JSON number that tolerates non-finite values by mapping them to null
/// (JSON has no NaN or infinity).
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn num_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Serialize the resolved config (execution-only fields already stripped
/// by its `Serialize` impl) and return the bytes plus their digest.
pub fn resolved_config_bytes(cfg: &RunConfig) -> (Vec<u8>, String) {
    let mut bytes = serde_json::to_vec_pretty(cfg).expect("config serializes");
    bytes.push(b'\n');
    let digest = hex(&Sha256::digest(&bytes));
    (bytes, digest)
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Assemble and write `summary.json`.
pub fn write_summary(
    path: &Path,
    experiment: &str,
    digest: &str,
    results: Value,
    flags: &[(String, bool)],
) -> std::io::Result<()> {
    let mut flag_map = Map::new();
    for (name, ok) in flags {
        flag_map.insert(name.clone(), Value::Bool(*ok));
    }
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "code_version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment,
        "config_digest": digest,
        "results": results,
        "flags": Value::Object(flag_map),
    });
    write_json(path, &summary)
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("value serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes)
}

pub fn write_error(dir: &Path, kind: &str, message: &str) {
    // best effort: the error also goes to stderr, so a failure here only
    // loses the machine-readable copy
    let record = json!({ "kind": kind, "error": message });
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = write_json(&dir.join("error.json"), &record);
    }
    let _ = writeln!(std::io::stderr(), "error ({kind}): {message}");
}

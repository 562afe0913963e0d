//! Report envelope, input loading and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::{bundled_source, Model};
use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Float,
}

/// Everything needed to rerun the command: the model and file contents are
/// hashed, options are recorded verbatim.
#[derive(Debug, Serialize)]
pub struct Inputs {
    pub model: String,
    pub sha256: String,
    pub options: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: &'static str,
    pub exactness: Exactness,
    pub inputs: Inputs,
    pub results: Value,
    pub warnings: Vec<String>,
}

/// Accumulates the inputs of one command.
pub struct InputLog {
    model: String,
    hasher: Sha256,
    options: BTreeMap<String, Value>,
}

impl InputLog {
    pub fn new(model: &LoadedModel) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(model.source.as_bytes());
        InputLog { model: model.label.clone(), hasher, options: BTreeMap::new() }
    }

    pub fn option(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.hasher.update(key.as_bytes());
        self.hasher.update(v.to_string().as_bytes());
        self.options.insert(key.to_string(), v);
    }

    /// Records a file argument by path and hashes its contents.
    pub fn file(&mut self, key: &str, path: &Path, contents: &str) {
        self.hasher.update(contents.as_bytes());
        self.option(key, path.display().to_string());
    }

    pub fn finish(self, command: &str, exactness: Exactness, results: impl Serialize, warnings: Vec<String>) -> Result<Report> {
        let results = serde_json::to_value(results).map_err(|e| Error::Invariant(e.to_string()))?;
        Ok(Report {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            exactness,
            inputs: Inputs { model: self.model, sha256: hex::encode(self.hasher.finalize()), options: self.options },
            results,
            warnings,
        })
    }
}

pub struct LoadedModel {
    /// Bundled name, or the path it was read from.
    pub label: String,
    pub source: String,
    pub model: Model,
}

/// A bundled model name or the path of a model document.
pub fn load_model(arg: &str) -> Result<LoadedModel> {
    let source = match bundled_source(arg) {
        Some(s) => s.to_string(),
        None if Path::new(arg).exists() => std::fs::read_to_string(arg)?,
        None => {
            return Err(Error::InvalidArgument(format!(
                "`{arg}` is neither a bundled model (heisenberg, martinet, engel) nor a file"
            )))
        }
    };
    let model = Model::from_json(&source)?;
    Ok(LoadedModel { label: arg.to_string(), source, model })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

/// Comma-separated rationals.
pub fn parse_vector(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| Error::InvalidArgument(e.to_string())))
        .collect()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Flat trajectory format: `# key: value` header lines, then one
/// whitespace-separated row per sample.
pub fn format_trajectory(header: &[(&str, String)], columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&format!("# columns: {}\n", columns.join(" ")));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a trajectory file back into its header map and rows.
pub fn parse_trajectory(text: &str) -> Result<(BTreeMap<String, String>, Vec<Vec<f64>>)> {
    let mut header = BTreeMap::new();
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once(':') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|c| c.parse::<f64>().map_err(|_| Error::Schema(format!("line {}: bad number `{c}`", n + 1))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

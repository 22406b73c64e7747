//! Output files: headers and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::NamedTempFile;

use crate::config::CliError;

/// One emitted file, held in memory until the whole run has succeeded.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: &str, contents: String) -> Self {
        Self { name: name.to_string(), contents }
    }

    /// JSON document whose first key is the resolved config.
    pub fn json(name: &str, config: &Value, body: Value) -> Self {
        let mut map = serde_json::Map::new();
        map.insert("config".into(), config.clone());
        if let Value::Object(b) = body {
            map.extend(b);
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
        text.push('\n');
        Self::new(name, text)
    }
}

/// Header text embedded at the top of every CSV and SVG.
pub fn header_text(config: &Value) -> String {
    format!(
        "zenograv {} resolved config:\n{}",
        env!("CARGO_PKG_VERSION"),
        serde_json::to_string_pretty(config).expect("JSON values serialize")
    )
}

/// Write every artifact into `dir` through a temp file and rename.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    let io = |what: &str, p: &Path, e: std::io::Error| CliError::Io(format!("{what} {}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io("cannot create", dir, e))?;
    let mut paths = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let target = dir.join(&a.name);
        let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io("cannot create temp file in", dir, e))?;
        tmp.write_all(a.contents.as_bytes()).map_err(|e| io("cannot write", &target, e))?;
        tmp.as_file().sync_all().map_err(|e| io("cannot sync", &target, e))?;
        tmp.persist(&target).map_err(|e| io("cannot rename onto", &target, e.error))?;
        paths.push(target);
    }
    Ok(paths)
}

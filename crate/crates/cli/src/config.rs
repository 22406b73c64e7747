//! Run configuration: JSON file merged with flat `--key value` overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<zenograv_core::Error> for CliError {
    fn from(e: zenograv_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Scatter,
    Pattern,
    Eigen,
    Zeno,
    Decoherence,
    Feasibility,
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Pattern => "pattern",
            Command::Eigen => "eigen",
            Command::Zeno => "zeno",
            Command::Decoherence => "decoherence",
            Command::Feasibility => "feasibility",
            Command::Report => "report",
        }
    }
}

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: Map<String, Value>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// Universal options as given on the command line before any override.
#[derive(Debug, Clone, Default)]
pub struct Universal {
    pub config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Build the run configuration. Precedence: flags, then the config file,
/// then built-in defaults.
pub fn resolve(command: Command, mut universal: Universal, rest: &[String]) -> Result<RunConfig, CliError> {
    let overrides = parse_overrides(rest, &mut universal)?;
    let mut params = Map::new();
    let mut file_dir = None;
    let mut file_seed = None;
    if let Some(path) = &universal.config {
        let file = read_config(path)?;
        let (p, d, s) = split_file(command, file)?;
        params = p;
        file_dir = d;
        file_seed = s;
    }
    for (key, value) in overrides {
        set_dotted(&mut params, &key, value)?;
    }
    Ok(RunConfig {
        command,
        params,
        output_dir: universal.output_dir.or(file_dir).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        seed: universal.seed.or(file_seed).unwrap_or(0),
    })
}

fn read_config(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

type FileParts = (Map<String, Value>, Option<PathBuf>, Option<u64>);

/// A config file is either a bare parameter map or a full run config
/// `{command, params, output_dir, seed}`.
fn split_file(command: Command, file: Value) -> Result<FileParts, CliError> {
    let Value::Object(mut obj) = file else {
        return Err(CliError::Validation("config file must hold a JSON object".into()));
    };
    if !obj.contains_key("params") {
        return Ok((obj, None, None));
    }
    for key in obj.keys() {
        if !["command", "params", "output_dir", "seed"].contains(&key.as_str()) {
            return Err(CliError::Validation(format!(
                "unknown key `{key}` in run config; expected command, params, output_dir, seed"
            )));
        }
    }
    if let Some(c) = obj.get("command") {
        if c.as_str() != Some(command.name()) {
            return Err(CliError::Validation(format!("config file is for command {c}, not `{}`", command.name())));
        }
    }
    let params = match obj.remove("params") {
        Some(Value::Object(m)) => m,
        _ => return Err(CliError::Validation("`params` must be a JSON object".into())),
    };
    let dir = match obj.remove("output_dir") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(v) => return Err(CliError::Validation(format!("`output_dir` must be a string path, got {v}"))),
    };
    let seed = match obj.remove("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Validation(format!("`seed` must be a non-negative integer, got {v}")))?),
    };
    Ok((params, dir, seed))
}

/// `--key value` or `--key=value`. Values are read as JSON when they parse,
/// otherwise as strings. Dashes in keys become underscores; dots address
/// nested objects. Universal options found here are moved into `universal`.
fn parse_overrides(rest: &[String], universal: &mut Universal) -> Result<Vec<(String, Value)>, CliError> {
    let mut out = Vec::new();
    let mut it = rest.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(CliError::Validation(format!("expected `--key value`, got `{arg}`")));
        };
        let (key, raw) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| CliError::Validation(format!("flag `--{flag}` is missing a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        let key = key.replace('-', "_");
        if key.is_empty() {
            return Err(CliError::Validation("empty flag name".into()));
        }
        match key.as_str() {
            "config" => universal.config = Some(PathBuf::from(raw)),
            "output_dir" => universal.output_dir = Some(PathBuf::from(raw)),
            "seed" => {
                universal.seed =
                    Some(raw.parse().map_err(|_| CliError::Validation(format!("--seed must be a non-negative integer, got `{raw}`")))?)
            }
            _ => out.push((key, serde_json::from_str(&raw).unwrap_or(Value::String(raw)))),
        }
    }
    Ok(out)
}

fn set_dotted(map: &mut Map<String, Value>, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts = key.split('.').peekable();
    let mut cur = map;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let slot = cur.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
        cur = match slot {
            Value::Object(m) => m,
            _ => return Err(CliError::Validation(format!("`{key}`: `{part}` is not an object"))),
        };
    }
    Ok(())
}

use floorlog::seq::DEFAULT_BUDGET;
use floorlog::{AlphaSpec, Error};
use serde_json::{json, Map, Value};

use crate::{Common, Format};

pub const SCHEMA: u64 = 1;
pub const BUDGET_VAR: &str = "FLOORLOG_BUDGET";

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } | Error::AmbiguousFloor { .. } => 3,
        Error::Consistency(_) => 4,
        _ => 2,
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e @ Error::Budget { .. }) => write!(f, "{e} (raise it with {BUDGET_VAR})"),
            CliError::Core(e) => e.fmt(f),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// What to print and how to exit.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub format: Option<Format>,
    pub seed: u64,
    pub timing: bool,
    /// Most summands a brute-force sum may visit.
    pub budget: u64,
}

impl ExperimentConfig {
    pub fn from_common(c: &Common) -> Result<Self, CliError> {
        if c.k < 2 {
            return Err(CliError::Usage(format!("--k must be at least 2, got {}", c.k)));
        }
        let alpha: AlphaSpec = c.alpha.parse()?;
        Ok(Self {
            k: c.k,
            alpha,
            format: c.format,
            seed: c.seed,
            timing: c.timing,
            budget: budget_from_env(std::env::var(BUDGET_VAR).ok().as_deref())?,
        })
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn budget_from_env(v: Option<&str>) -> Result<u64, CliError> {
    match v {
        None => Ok(DEFAULT_BUDGET),
        Some(s) => s
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| CliError::Usage(format!("{BUDGET_VAR} must be a positive integer, got {s:?}"))),
    }
}

/// `{"schema": 1, "command": ..., ...fields}` pretty-printed with a trailing newline.
pub fn envelope(command: &str, body: Value) -> String {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json values serialize");
    s.push('\n');
    s
}

pub fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Left-aligned columns separated by two spaces.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

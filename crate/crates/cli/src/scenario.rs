//! Flat `key = value` scenario files.
//!
//! One key per line, `#` starts a comment. Reports embed the resolved
//! scenario either as a JSON string field `scenario` or, in CSV and text
//! output, as lines prefixed with `#! `; [`Scenario::load`] accepts all three.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (json, csv or text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("field `{key}`: {reason}")]
    Field { key: &'static str, reason: String },
    #[error("report has no embedded scenario")]
    NoScenario,
}

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_BOUNDARY_NODES: usize = 256;
pub const DEFAULT_FD_STEP: f64 = 1e-3;
pub const DEFAULT_GRID: (usize, usize) = (12, 12);

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub surface: Option<String>,
    pub domain: Option<String>,
    pub flex: Option<String>,
    pub nodes: usize,
    pub boundary_nodes: usize,
    pub fd_step: f64,
    pub richardson: bool,
    pub t_list: Option<Vec<f64>>,
    pub grid: (usize, usize),
    pub erratum_probe: bool,
    pub format: Format,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            surface: None,
            domain: None,
            flex: None,
            nodes: DEFAULT_NODES,
            boundary_nodes: DEFAULT_BOUNDARY_NODES,
            fd_step: DEFAULT_FD_STEP,
            richardson: true,
            t_list: None,
            grid: DEFAULT_GRID,
            erratum_probe: false,
            format: Format::Json,
        }
    }
}

const KEYS: [&str; 11] = [
    "surface",
    "domain",
    "flex",
    "nodes",
    "boundary_nodes",
    "fd_step",
    "richardson",
    "t_list",
    "grid",
    "erratum_probe",
    "format",
];

fn field<T, E: std::fmt::Display>(key: &'static str, r: Result<T, E>) -> Result<T, ScenarioError> {
    r.map_err(|e| ScenarioError::Field {
        key,
        reason: e.to_string(),
    })
}

pub fn parse_t_list(text: &str) -> Result<Vec<f64>, ScenarioError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| field("t_list", s.trim().parse::<f64>()))
        .collect()
}

pub fn parse_grid(text: &str) -> Result<(usize, usize), ScenarioError> {
    let bad = || ScenarioError::Field {
        key: "grid",
        reason: format!("`{text}` is not of the form NUxNV"),
    };
    let (a, b) = text.split_once('x').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_bool(key: &'static str, text: &str) -> Result<bool, ScenarioError> {
    match text {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ScenarioError::Field {
            key,
            reason: format!("`{other}` is not a boolean"),
        }),
    }
}

impl Scenario {
    /// Parse a plain key-value scenario.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut s = Scenario::default();
        let mut seen = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ScenarioError::Malformed {
                    line,
                    text: raw.to_string(),
                })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|&&known| known == key) else {
                return Err(ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            };
            if seen.contains(&key) {
                return Err(ScenarioError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key);
            s.set(key, value)?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &'static str, value: &str) -> Result<(), ScenarioError> {
        match key {
            "surface" => self.surface = Some(value.to_string()),
            "domain" => self.domain = Some(value.to_string()),
            "flex" => self.flex = Some(value.to_string()),
            "nodes" => self.nodes = field(key, value.parse())?,
            "boundary_nodes" => self.boundary_nodes = field(key, value.parse())?,
            "fd_step" => self.fd_step = field(key, value.parse())?,
            "richardson" => self.richardson = parse_bool(key, value)?,
            "t_list" => self.t_list = Some(parse_t_list(value)?),
            "grid" => self.grid = parse_grid(value)?,
            "erratum_probe" => self.erratum_probe = parse_bool(key, value)?,
            "format" => self.format = field(key, value.parse())?,
            _ => unreachable!("key list and setter disagree"),
        }
        Ok(())
    }

    /// Read a scenario from a scenario file or from a previously written
    /// report in any of the output formats.
    pub fn load(text: &str) -> Result<Self, ScenarioError> {
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value = field("scenario", serde_json::from_str(text))?;
            let embedded = value
                .get("scenario")
                .and_then(|s| s.as_str())
                .ok_or(ScenarioError::NoScenario)?;
            return Scenario::parse(embedded);
        }
        let embedded: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix("#! ")).collect();
        if embedded.is_empty() {
            Scenario::parse(text)
        } else {
            Scenario::parse(&embedded.join("\n"))
        }
    }

    /// Canonical text, one key per line in a fixed order. Floats are
    /// written in shortest round-trip form, so parsing the text gives back
    /// the same scenario bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(s) = &self.surface {
            put("surface", s.clone());
        }
        if let Some(d) = &self.domain {
            put("domain", d.clone());
        }
        if let Some(f) = &self.flex {
            put("flex", f.clone());
        }
        put("nodes", self.nodes.to_string());
        put("boundary_nodes", self.boundary_nodes.to_string());
        put("fd_step", format!("{:e}", self.fd_step));
        put("richardson", self.richardson.to_string());
        if let Some(ts) = &self.t_list {
            put(
                "t_list",
                ts.iter()
                    .map(|t| format!("{t:e}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        put("grid", format!("{}x{}", self.grid.0, self.grid.1));
        put("erratum_probe", self.erratum_probe.to_string());
        put("format", self.format.name().to_string());
        out
    }
}

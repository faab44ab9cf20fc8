//! Job files.
//!
//! A config is TOML with optional top-level defaults and one `[[job]]`
//! table per render:
//!
//! ```toml
//! sample_rate = 44100   # default for every job
//! seed = 0
//!
//! [[job]]
//! name = "pluck"
//! model = "fdl"
//! duration = 1.0
//! output = "pluck.wav"
//!
//! [job.params]
//! f0 = 220.0
//! ```
//!
//! Relative output paths resolve against the config file's directory.

use std::fmt;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::models::{Model, ModelParams};

pub const DEFAULT_SAMPLE_RATE: u32 = 44100;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// `job 2 ("pluck")`, or the file for top-level problems.
    pub location: String,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}: {}", self.location, self.message)
        } else {
            write!(f, "{}: field \"{}\": {}", self.location, self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct RenderJob {
    pub name: String,
    pub sample_rate: u32,
    pub duration: f64,
    pub output: PathBuf,
    pub seed: u64,
    /// Linear output gain applied before writing.
    pub gain: f64,
    pub params: ModelParams,
}

impl RenderJob {
    pub fn model(&self) -> Model {
        self.params.model()
    }

    pub fn n_samples(&self) -> usize {
        (self.duration * self.sample_rate as f64).round() as usize
    }
}

/// Typed access to a TOML table that remembers which keys were used so
/// leftovers can be reported as unknown.
pub(crate) struct Fields<'a> {
    table: Table,
    location: &'a str,
    prefix: &'a str,
}

impl<'a> Fields<'a> {
    pub(crate) fn new(table: Table, location: &'a str, prefix: &'a str) -> Self {
        Self { table, location, prefix }
    }

    pub(crate) fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            location: self.location.to_string(),
            field: format!("{}{key}", self.prefix),
            message: message.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn number(&self, key: &str, v: &Value) -> Result<f64, ConfigError> {
        match v {
            Value::Float(x) => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(self.error(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    pub(crate) fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => self.number(key, &v).map(Some),
        }
    }

    pub(crate) fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub(crate) fn req_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.opt_f64(key)?.ok_or_else(|| self.error(key, "missing required field"))
    }

    pub(crate) fn opt_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(other) => Err(self.error(key, format!("expected a non-negative integer, got {other}"))),
        }
    }

    pub(crate) fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.opt_usize(key)?.unwrap_or(default))
    }

    pub(crate) fn opt_str(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.error(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    /// String restricted to `choices`; the first choice is the default.
    pub(crate) fn choice(&mut self, key: &str, choices: &[&'static str]) -> Result<&'static str, ConfigError> {
        match self.opt_str(key)? {
            None => Ok(choices[0]),
            Some(s) => choices
                .iter()
                .find(|c| **c == s)
                .copied()
                .ok_or_else(|| self.error(key, format!("must be one of {}, got \"{s}\"", choices.join(", ")))),
        }
    }

    pub(crate) fn opt_f64_array(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a.iter().map(|v| self.number(key, v)).collect::<Result<_, _>>().map(Some),
            Some(other) => Err(self.error(key, format!("expected an array of numbers, got {}", other.type_str()))),
        }
    }

    /// A number or an array of numbers.
    pub(crate) fn opt_numbers(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a.iter().map(|v| self.number(key, v)).collect::<Result<_, _>>().map(Some),
            Some(v) => self.number(key, &v).map(|x| Some(vec![x])),
        }
    }

    /// Array of equal-length numeric rows.
    pub(crate) fn opt_f64_rows(&mut self, key: &str, width: usize) -> Result<Option<Vec<Vec<f64>>>, ConfigError> {
        let rows = match self.take(key) {
            None => return Ok(None),
            Some(Value::Array(a)) => a,
            Some(other) => return Err(self.error(key, format!("expected an array of arrays, got {}", other.type_str()))),
        };
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let row = match row {
                Value::Array(r) if r.len() == width => r,
                _ => return Err(self.error(key, format!("every entry must be an array of {width} numbers"))),
            };
            out.push(row.iter().map(|v| self.number(key, v)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(Some(out))
    }

    pub(crate) fn opt_table(&mut self, key: &str) -> Result<Option<Table>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(t)),
            Some(other) => Err(self.error(key, format!("expected a table, got {}", other.type_str()))),
        }
    }

    pub(crate) fn finish(self) -> Result<(), ConfigError> {
        match self.table.keys().next() {
            None => Ok(()),
            Some(k) => Err(self.error(k, "unknown field")),
        }
    }
}

/// Overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sample_rate: Option<u32>,
}

pub fn parse_config(path: &Path, overrides: Overrides) -> Result<Vec<RenderJob>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        location: path.display().to_string(),
        field: String::new(),
        message: format!("cannot read config: {e}"),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, &path.display().to_string(), base, overrides)
}

pub fn parse_config_str(text: &str, source: &str, base: &Path, overrides: Overrides) -> Result<Vec<RenderJob>, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| format!(" (line {})", text[..s.start].matches('\n').count() + 1))
            .unwrap_or_default();
        ConfigError {
            location: source.to_string(),
            field: String::new(),
            message: format!("malformed config{line}: {}", e.message()),
        }
    })?;
    let mut top = Fields::new(table, source, "");
    let rate = sample_rate_field(&mut top, "sample_rate")?.unwrap_or(DEFAULT_SAMPLE_RATE);
    let seed = seed_field(&mut top)?.unwrap_or(0);
    let jobs = match top.take("job") {
        Some(Value::Array(a)) => a,
        Some(_) => return Err(top.error("job", "must be an array of tables ([[job]])")),
        None => return Err(top.error("job", "config declares no [[job]] tables")),
    };
    top.finish()?;

    let mut out = Vec::with_capacity(jobs.len());
    for (i, job) in jobs.into_iter().enumerate() {
        let Value::Table(t) = job else {
            return Err(ConfigError {
                location: source.to_string(),
                field: "job".into(),
                message: "entries must be tables".into(),
            });
        };
        let name = match t.get("name") {
            Some(Value::String(s)) => s.clone(),
            _ => format!("job{}", i + 1),
        };
        let location = format!("job {} (\"{name}\")", i + 1);
        out.push(parse_job(t, &location, &name, base, rate, seed, overrides)?);
    }
    Ok(out)
}

fn sample_rate_field(f: &mut Fields, key: &str) -> Result<Option<u32>, ConfigError> {
    match f.opt_usize(key)? {
        None => Ok(None),
        Some(r) if (1000..=768_000).contains(&r) => Ok(Some(r as u32)),
        Some(r) => Err(f.error(key, format!("must be an integer in [1000, 768000] Hz, got {r}"))),
    }
}

fn seed_field(f: &mut Fields) -> Result<Option<u64>, ConfigError> {
    Ok(f.opt_usize("seed")?.map(|s| s as u64))
}

fn parse_job(
    table: Table,
    location: &str,
    name: &str,
    base: &Path,
    default_rate: u32,
    default_seed: u64,
    overrides: Overrides,
) -> Result<RenderJob, ConfigError> {
    let mut f = Fields::new(table, location, "");
    f.opt_str("name")?;
    let model_name = f.opt_str("model")?.ok_or_else(|| f.error("model", "missing required field"))?;
    let model = Model::from_name(&model_name).ok_or_else(|| {
        f.error(
            "model",
            format!("unknown model \"{model_name}\"; expected one of {}", Model::names().join(", ")),
        )
    })?;
    let sample_rate = overrides
        .sample_rate
        .or(sample_rate_field(&mut f, "sample_rate")?)
        .unwrap_or(default_rate);
    let file_seed = seed_field(&mut f)?;
    let seed = overrides.seed.or(file_seed).unwrap_or(default_seed);
    let duration = f.req_f64("duration")?;
    if !(duration > 0.0 && duration <= 600.0) {
        return Err(f.error("duration", format!("must be positive and at most 600 s, got {duration}")));
    }
    let output = f.opt_str("output")?.ok_or_else(|| f.error("output", "missing required field"))?;
    if output.is_empty() {
        return Err(f.error("output", "must not be empty"));
    }
    let gain = f.f64_or("gain", 1.0)?;
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(f.error("gain", format!("must be finite and non-negative, got {gain}")));
    }
    // fitted modes written by `calibrate --method modal`; informational
    if let Some(Value::Array(_)) = f.table.get("modes") {
        f.take("modes");
    }
    let params_table = f.opt_table("params")?.unwrap_or_default();
    f.finish()?;

    let mut p = Fields::new(params_table, location, "params.");
    let params = ModelParams::parse(model, &mut p, sample_rate as f64, duration, seed)?;
    p.finish()?;

    Ok(RenderJob {
        name: name.to_string(),
        sample_rate,
        duration,
        output: base.join(output),
        seed,
        gain,
        params,
    })
}

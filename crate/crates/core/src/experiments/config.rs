//! Line-oriented `key = value` experiment configuration.
//!
//! ```text
//! # error decay over m
//! experiment = pointwise
//! field = real
//! n = 8
//! m_grid = 100, 1000, 10000
//! trials = 50
//! ```
//!
//! `#` starts a comment. Keys are the [`ExperimentConfig`] field names;
//! missing keys keep their defaults. `m_grid = auto` means the single value
//! `pointwise_m(field, n, delta, bound_D)`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::FieldKind;
use crate::measurement::FlipMode;
use crate::theory::pointwise_m;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Pointwise,
    Uniform,
    Noise,
    Diagnostics,
    Theory,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Pointwise => "pointwise",
            ExperimentKind::Uniform => "uniform",
            ExperimentKind::Noise => "noise",
            ExperimentKind::Diagnostics => "diagnostics",
            ExperimentKind::Theory => "theory",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pointwise" => Ok(ExperimentKind::Pointwise),
            "uniform" => Ok(ExperimentKind::Uniform),
            "noise" => Ok(ExperimentKind::Noise),
            "diagnostics" => Ok(ExperimentKind::Diagnostics),
            "theory" => Ok(ExperimentKind::Theory),
            other => Err(Error::invalid(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MGrid {
    Explicit(Vec<u64>),
    /// `[pointwise_m(field, n, delta, bound_D)]`
    Auto,
}

impl fmt::Display for MGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MGrid::Auto => f.write_str("auto"),
            MGrid::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub field: FieldKind,
    pub n: usize,
    pub m_grid: MGrid,
    pub trials: usize,
    pub inputs: usize,
    pub delta: f64,
    pub bound_d: f64,
    pub tau: f64,
    pub flip_mode: FlipMode,
    pub master_seed: u64,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Pointwise,
            field: FieldKind::Real,
            n: 8,
            m_grid: MGrid::Explicit(vec![100, 1_000, 10_000]),
            trials: 50,
            inputs: 1_000,
            delta: 0.3,
            bound_d: 2.0,
            tau: 0.05,
            flip_mode: FlipMode::Random,
            master_seed: 0,
            output_path: PathBuf::from("results.csv"),
        }
    }
}

pub const KEYS: [&str; 12] = [
    "experiment",
    "field",
    "n",
    "m_grid",
    "trials",
    "inputs",
    "delta",
    "bound_D",
    "tau",
    "flip_mode",
    "master_seed",
    "output_path",
];

fn parse_num<N: FromStr>(key: &str, value: &str) -> Result<N>
where
    N::Err: fmt::Display,
{
    value
        .parse::<N>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

impl ExperimentConfig {
    /// Parses config text on top of the defaults, then validates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies `key = value` lines without validating.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::InvalidInput(msg) => Error::config(key, msg),
            other => other,
        };
        match key {
            "experiment" => self.experiment = value.parse().map_err(wrap)?,
            "field" => self.field = value.parse().map_err(wrap)?,
            "n" => self.n = parse_num(key, value)?,
            "m_grid" => {
                self.m_grid = if value.eq_ignore_ascii_case("auto") {
                    MGrid::Auto
                } else {
                    MGrid::Explicit(
                        value
                            .split(',')
                            .map(|s| parse_num::<u64>(key, s.trim()))
                            .collect::<Result<_>>()?,
                    )
                }
            }
            "trials" => self.trials = parse_num(key, value)?,
            "inputs" => self.inputs = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "bound_D" => self.bound_d = parse_num(key, value)?,
            "tau" => self.tau = parse_num(key, value)?,
            "flip_mode" => self.flip_mode = value.parse().map_err(wrap)?,
            "master_seed" => self.master_seed = parse_num(key, value)?,
            "output_path" => self.output_path = PathBuf::from(value),
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        if let MGrid::Explicit(grid) = &self.m_grid {
            if grid.is_empty() {
                return Err(Error::config("m_grid", "must be nonempty"));
            }
            if grid[0] == 0 {
                return Err(Error::config("m_grid", "entries must be positive"));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("m_grid", "must be strictly increasing"));
            }
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if self.inputs == 0 {
            return Err(Error::config("inputs", "must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::config("delta", "must be positive and finite"));
        }
        if !(self.bound_d >= 0.0 && self.bound_d.is_finite()) {
            return Err(Error::config("bound_D", "must be nonnegative and finite"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(Error::config("tau", "must lie in [0, 1)"));
        }
        Ok(())
    }

    /// The measurement counts to run, with `auto` resolved.
    pub fn resolved_m_grid(&self) -> Result<Vec<u64>> {
        match &self.m_grid {
            MGrid::Explicit(v) => Ok(v.clone()),
            MGrid::Auto => pointwise_m(self.field, self.n, self.delta, self.bound_d)
                .map(|m| vec![m])
                .map_err(|e| Error::config("m_grid", e.to_string())),
        }
    }

    /// Serializes back to the config format.
    pub fn to_text(&self) -> String {
        format!(
            "experiment = {}\nfield = {}\nn = {}\nm_grid = {}\ntrials = {}\ninputs = {}\n\
             delta = {}\nbound_D = {}\ntau = {}\nflip_mode = {}\nmaster_seed = {}\noutput_path = {}\n",
            self.experiment,
            self.field,
            self.n,
            self.m_grid,
            self.trials,
            self.inputs,
            self.delta,
            self.bound_d,
            self.tau,
            self.flip_mode,
            self.master_seed,
            self.output_path.display()
        )
    }
}

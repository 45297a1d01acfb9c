//! Per-trial records and their CSV form.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! record parses back to the identical value and identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "trial,m,error,qdev,hamming_gap,degenerate,seed_path";

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub m: u64,
    /// `‖X - X̂‖`
    pub error: f64,
    /// `‖Q̂ - Q(X)‖`
    pub qdev: f64,
    /// `d_P(X, X̂) - ‖X - X̂‖`, only for uniform runs.
    pub hamming_gap: Option<f64>,
    pub degenerate: bool,
    /// Seed-stream path that regenerates this trial, `/`-separated.
    pub seed_path: String,
}

pub fn seed_path_string(path: &[u64]) -> String {
    path.iter().map(u64::to_string).collect::<Vec<_>>().join("/")
}

impl TrialRecord {
    pub fn to_csv_line(&self) -> String {
        let gap = self.hamming_gap.map(|g| g.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.trial, self.m, self.error, self.qdev, gap, self.degenerate, self.seed_path
        )
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::invalid(format!("expected 7 fields, got {}: `{line}`", f.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            f[i].parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad {name} `{}`: {e}", f[i])))
        };
        let int = |i: usize, name: &str| -> Result<u64> {
            f[i].parse::<u64>()
                .map_err(|e| Error::invalid(format!("bad {name} `{}`: {e}", f[i])))
        };
        Ok(TrialRecord {
            trial: int(0, "trial")?,
            m: int(1, "m")?,
            error: num(2, "error")?,
            qdev: num(3, "qdev")?,
            hamming_gap: if f[4].is_empty() { None } else { Some(num(4, "hamming_gap")?) },
            degenerate: f[5]
                .parse()
                .map_err(|e| Error::invalid(format!("bad degenerate `{}`: {e}", f[5])))?,
            seed_path: f[6].to_string(),
        })
    }
}

pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_records(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::invalid(format!(
                "expected header `{CSV_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| TrialRecord::from_csv_line(l.trim_end()))
        .collect()
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text)
}

/// A small auxiliary table written next to the main CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File tag: `results.csv` gets `results.<tag>.csv`.
    pub tag: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(tag: &str, header: &[&str]) -> Self {
        Table {
            tag: tag.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// `dir/stem.csv` -> `dir/stem.<tag>.csv`.
pub fn companion_path(main: &Path, tag: &str) -> PathBuf {
    let stem = main
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string());
    main.with_file_name(format!("{stem}.{tag}.csv"))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

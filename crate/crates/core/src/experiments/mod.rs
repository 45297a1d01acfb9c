//! Seeded Monte Carlo harness.
//!
//! Every random object is drawn from a [`SeedStream`] keyed by
//! `(master_seed, path)`:
//!
//! | object                                   | path            |
//! |------------------------------------------|-----------------|
//! | pointwise/noise signal `X`               | `[0]`           |
//! | ensemble of trial `t` at size `m`        | `[t, m]`        |
//! | element `j` of that ensemble             | `[t, m, j]`     |
//! | bit-flip stream of trial `t` at size `m` | `[t, m, 2^64-1]`|
//! | uniform ensemble at size `m`             | `[0, m]`        |
//! | uniform input `i` at size `m`            | `[1, m, i]`     |
//!
//! so a record depends only on its own path, and output is identical for
//! any thread count.

pub mod config;
pub mod diagnostics;
mod noise;
mod pointwise;
pub mod records;
pub mod report;
mod uniform;

use std::path::Path;

use num_complex::Complex64;

pub use config::{ExperimentConfig, ExperimentKind, MGrid};
pub use diagnostics::{run_diagnostics, Check, DiagnosticReport};
pub use noise::run_noise;
pub use pointwise::run_pointwise;
pub use records::{
    companion_path, parse_records, read_records, records_to_csv, TrialRecord, Table, CSV_HEADER,
};
pub use report::{print_theory, theory_report};
pub use uniform::run_uniform;

use crate::error::{Error, Result};
use crate::field::{FieldKind, Scalar};
use crate::recovery::{expected_average, recover_from_average};
use crate::sampler::{sample_unit_vector, SeedStream};
use crate::theory::mu_pair;
use crate::types::{operator_norm, rank_one_distance, HermitianMatrix, RankOneProjection};

/// Records plus auxiliary tables of a pointwise, uniform or noise run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub tables: Vec<Table>,
    /// Guarantees that were certified but did not hold.
    pub violations: Vec<String>,
}

impl RunOutput {
    /// Writes the main CSV at `path` and each table next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        records::write_file(path, &records_to_csv(&self.records))?;
        for t in &self.tables {
            records::write_file(&companion_path(path, &t.tag), &t.to_csv())?;
        }
        Ok(())
    }

    pub fn table(&self, tag: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.tag == tag)
    }
}

/// Runs a pointwise, uniform or noise experiment in the configured field.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match (cfg.experiment, cfg.field) {
        (ExperimentKind::Pointwise, FieldKind::Real) => run_pointwise::<f64>(cfg),
        (ExperimentKind::Pointwise, FieldKind::Complex) => run_pointwise::<Complex64>(cfg),
        (ExperimentKind::Uniform, FieldKind::Real) => run_uniform::<f64>(cfg),
        (ExperimentKind::Uniform, FieldKind::Complex) => run_uniform::<Complex64>(cfg),
        (ExperimentKind::Noise, FieldKind::Real) => run_noise::<f64>(cfg),
        (ExperimentKind::Noise, FieldKind::Complex) => run_noise::<Complex64>(cfg),
        (other, _) => Err(Error::config(
            "experiment",
            format!("`{other}` does not produce trial records"),
        )),
    }
}

pub(crate) fn check_kind(cfg: &ExperimentConfig, want: ExperimentKind) -> Result<()> {
    if cfg.experiment != want {
        return Err(Error::config(
            "experiment",
            format!("expected `{want}`, got `{}`", cfg.experiment),
        ));
    }
    cfg.validate()
}

pub(crate) fn as_len(m: u64) -> Result<usize> {
    usize::try_from(m).map_err(|_| Error::config("m_grid", format!("{m} does not fit in memory")))
}

/// Random signal on `F^{2n}` from `path`.
pub fn signal_at<T: Scalar>(n: usize, master_seed: u64, path: &[u64]) -> Result<RankOneProjection<T>> {
    let v = sample_unit_vector::<T>(2 * n, &SeedStream::with_path(master_seed, path))?;
    Ok(RankOneProjection::from_unit(v))
}

/// Expected average `Q(X)` for the field and size of `x`.
pub(crate) fn expected_for<T: Scalar>(x: &RankOneProjection<T>) -> Result<HermitianMatrix<T>> {
    let (mu1, mu2) = mu_pair(T::FIELD, x.dim() / 2)?;
    Ok(expected_average(x, mu1, mu2))
}

pub(crate) struct Evaluation<T: Scalar> {
    pub estimate: RankOneProjection<T>,
    pub error: f64,
    pub qdev: f64,
    pub degenerate: bool,
}

/// Solves PEP on `q` and scores it against `x`.
pub(crate) fn evaluate<T: Scalar>(
    x: &RankOneProjection<T>,
    q: &HermitianMatrix<T>,
    q_true: &HermitianMatrix<T>,
) -> Result<Evaluation<T>> {
    let rec = recover_from_average(q)?;
    let error = rank_one_distance(x, &rec.estimate)?.min(1.0);
    let qdev = operator_norm(&q.sub(q_true)?).min(1.0);
    Ok(Evaluation {
        estimate: rec.estimate,
        error,
        qdev,
        degenerate: rec.degenerate,
    })
}

pub(crate) fn fmt_f(v: f64) -> String {
    v.to_string()
}

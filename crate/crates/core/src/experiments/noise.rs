use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::records::{seed_path_string, Table, TrialRecord};
use super::{as_len, check_kind, evaluate, expected_for, fmt_f, signal_at, RunOutput};
use crate::error::Result;
use crate::field::Scalar;
use crate::measurement::{bits_from_traces, corrupt_bits, measurement_traces};
use crate::recovery::empirical_average;
use crate::sampler::{SeedStream, SeededEnsemble};
use crate::theory::{noisy_error_bound, spectral_gap};

/// Relative slack when comparing an error to its bound.
const BOUND_SLACK: f64 = 1e-12;

struct NoiseRow {
    record: TrialRecord,
    clean_error: f64,
    clean_qdev: f64,
    certified: bool,
    holds: bool,
}

/// The pointwise protocol with `floor(tau m)` bits flipped before recovery.
/// Records carry the noisy error and deviation.
///
/// Tables: `noise` with clean and noisy results, the bound
/// `delta + 2 tau / gap`, whether the clean deviation certifies it
/// (`qdev <= gap delta / 2`) and whether it held. A certified trial that
/// misses its bound is reported as a violation.
pub fn run_noise<T: Scalar>(cfg: &ExperimentConfig) -> Result<RunOutput> {
    check_kind(cfg, ExperimentKind::Noise)?;
    let grid = cfg.resolved_m_grid()?;
    let x = signal_at::<T>(cfg.n, cfg.master_seed, &[0])?;
    let q_true = expected_for(&x)?;
    let gap = spectral_gap(cfg.field, cfg.n)?;
    let bound = noisy_error_bound(cfg.field, cfg.n, cfg.delta, cfg.tau)?;

    let units: Vec<(u64, u64)> = (0..cfg.trials as u64)
        .flat_map(|t| grid.iter().map(move |&m| (t, m)))
        .collect();
    let rows = units
        .par_iter()
        .map(|&(t, m)| {
            let path = [t, m];
            let ens = SeededEnsemble::new(cfg.n, as_len(m)?, SeedStream::with_path(cfg.master_seed, &path))?
                .materialize::<T>();
            let traces = measurement_traces(&ens, &x)?;
            let bits = bits_from_traces(&traces);
            let clean = evaluate(&x, &empirical_average(&ens, &bits)?, &q_true)?;
            let flips = SeedStream::with_path(cfg.master_seed, &[t, m, u64::MAX]);
            let noisy_bits = corrupt_bits(&bits, cfg.tau, cfg.flip_mode, &flips, Some(&traces))?;
            let noisy = evaluate(&x, &empirical_average(&ens, &noisy_bits)?, &q_true)?;
            let certified = clean.qdev <= 0.5 * gap * cfg.delta;
            Ok(NoiseRow {
                record: TrialRecord {
                    trial: t,
                    m,
                    error: noisy.error,
                    qdev: noisy.qdev,
                    hamming_gap: None,
                    degenerate: noisy.degenerate,
                    seed_path: seed_path_string(&path),
                },
                clean_error: clean.error,
                clean_qdev: clean.qdev,
                certified,
                holds: noisy.error <= bound * (1.0 + BOUND_SLACK),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(
        "noise",
        &[
            "trial",
            "m",
            "clean_error",
            "clean_qdev",
            "noisy_error",
            "noisy_qdev",
            "bound",
            "certified",
            "holds",
        ],
    );
    let mut violations = Vec::new();
    for row in &rows {
        let r = &row.record;
        table.push(vec![
            r.trial.to_string(),
            r.m.to_string(),
            fmt_f(row.clean_error),
            fmt_f(row.clean_qdev),
            fmt_f(r.error),
            fmt_f(r.qdev),
            fmt_f(bound),
            row.certified.to_string(),
            row.holds.to_string(),
        ]);
        if row.certified && !row.holds {
            violations.push(format!(
                "trial {} m {}: noisy error {} exceeds certified bound {bound}",
                r.trial, r.m, r.error
            ));
        }
    }
    Ok(RunOutput {
        records: rows.into_iter().map(|r| r.record).collect(),
        tables: vec![table],
        violations,
    })
}

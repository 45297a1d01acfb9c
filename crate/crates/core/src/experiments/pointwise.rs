use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::records::{seed_path_string, Table, TrialRecord};
use super::{as_len, check_kind, evaluate, expected_for, fmt_f, signal_at, RunOutput};
use crate::error::Result;
use crate::field::Scalar;
use crate::recovery::measure_and_average;
use crate::sampler::{SeedStream, SeededEnsemble};
use crate::theory::pointwise_delta;

/// One fixed signal, `trials` independent ensembles at every `m`.
///
/// Tables: `bound` with the inverted sample-complexity curve
/// `delta(m) = sqrt((14/3) gap^-2 (log 4n + D) / m)`.
pub fn run_pointwise<T: Scalar>(cfg: &ExperimentConfig) -> Result<RunOutput> {
    check_kind(cfg, ExperimentKind::Pointwise)?;
    let grid = cfg.resolved_m_grid()?;
    let x = signal_at::<T>(cfg.n, cfg.master_seed, &[0])?;
    let q_true = expected_for(&x)?;

    let units: Vec<(u64, u64)> = (0..cfg.trials as u64)
        .flat_map(|t| grid.iter().map(move |&m| (t, m)))
        .collect();
    let records = units
        .par_iter()
        .map(|&(t, m)| {
            let path = [t, m];
            let ens = SeededEnsemble::new(
                cfg.n,
                as_len(m)?,
                SeedStream::with_path(cfg.master_seed, &path),
            )?;
            let (_, q) = measure_and_average::<T, _>(&ens, &x)?;
            let ev = evaluate(&x, &q, &q_true)?;
            Ok(TrialRecord {
                trial: t,
                m,
                error: ev.error,
                qdev: ev.qdev,
                hamming_gap: None,
                degenerate: ev.degenerate,
                seed_path: seed_path_string(&path),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bound = Table::new("bound", &["m", "delta_bound", "bound_D"]);
    for &m in &grid {
        bound.push(vec![
            m.to_string(),
            fmt_f(pointwise_delta(cfg.field, cfg.n, m, cfg.bound_d)?),
            fmt_f(cfg.bound_d),
        ]);
    }
    Ok(RunOutput {
        records,
        tables: vec![bound],
        violations: Vec::new(),
    })
}

//! Distributional self-checks, each reported as pass, fail or skip.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::{check_kind, signal_at};
use crate::error::{Error, Result};
use crate::field::{FieldKind, Scalar};
use crate::measurement::{measurement_hamming, soft_hamming};
use crate::recovery::measure_and_average;
use crate::sampler::{sample_ensemble, sample_haar_projection, SeedStream, SeededEnsemble};
use crate::stats::{beta_cdf, chi_square_sf, ks_statistic, proportion_std_error, Summary};
use crate::theory::{
    dsep_probability, measurement_beta_params, measurement_variance, mu_pair, EigenDensity,
};
use crate::types::{rank_one_distance, OrthogonalProjection, RankOneProjection, UnitVector};

pub const BETA_SAMPLES: usize = 20_000;
pub const EXPECTATION_M: usize = 50_000;
pub const EIGEN_TOL: f64 = 0.01;
pub const PAIR_M: usize = 20_000;
pub const HAMMING_MARGIN: f64 = 0.05;
pub const SEPARATION_SAMPLES: usize = 100_000;
pub const DENSITY_BINS: usize = 10;
pub const CHI_SQUARE_ALPHA: f64 = 0.01;
pub const SANDWICH_INSTANCES: usize = 200;
pub const SANDWICH_M: usize = 500;
pub const SANDWICH_EPS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn skip(name: &str, why: &str) -> Self {
        Check {
            name: name.to_string(),
            status: Status::Skip,
            detail: why.to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticReport {
    pub checks: Vec<Check>,
}

impl DiagnosticReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for DiagnosticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Eigenvalues `(λ1, λ2)`, descending, of the compression of `p` to
/// `span{e1, e2}`.
pub fn compressed_eigenvalues<T: Scalar>(p: &OrthogonalProjection<T>) -> (f64, f64) {
    let m = p.matrix();
    let a = m[(0, 0)].real();
    let c = m[(1, 1)].real();
    let b = m[(0, 1)].modulus();
    let mid = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mid + r, mid - r)
}

/// A signal within operator-norm distance `eps` of `x0`: `x0 + (eps/2) g`
/// for a uniform unit direction `g`, normalized.
pub fn perturb_signal<T: Scalar>(
    x0: &UnitVector<T>,
    eps: f64,
    stream: &SeedStream,
) -> Result<UnitVector<T>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("perturbation radius must be in (0, 1], got {eps}")));
    }
    let mut src = stream.gaussian();
    let g = DVector::<T>::from_fn(x0.dim(), |_, _| T::gaussian(&mut src));
    let g = g.unscale(g.norm());
    UnitVector::new(x0.entries() + g.scale(0.5 * eps))
}

/// `tr(P_i X)` for `count` independent projections drawn at `[prefix, i]`.
pub fn trace_samples<T: Scalar>(
    x: &RankOneProjection<T>,
    count: usize,
    master_seed: u64,
    prefix: u64,
) -> Result<Vec<f64>> {
    let n = x.dim() / 2;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_haar_projection::<T>(n, 2 * n, &SeedStream::with_path(master_seed, &[prefix, i]))?;
            p.trace_with(x)
        })
        .collect()
}

/// Compressed eigenvalue pairs for `count` projections drawn at `[prefix, i]`.
pub fn compression_samples<T: Scalar>(
    n: usize,
    count: usize,
    master_seed: u64,
    prefix: u64,
) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::invalid("compression to a 2-plane needs n >= 2"));
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_haar_projection::<T>(n, 2 * n, &SeedStream::with_path(master_seed, &[prefix, i]))?;
            Ok(compressed_eigenvalues(&p))
        })
        .collect()
}

/// Pearson chi-square of eigenvalue pairs against the eigenvalue density on
/// a `bins x bins` grid restricted to `λ2 <= λ1`. Cells expecting fewer than
/// five samples are pooled. Returns `(statistic, dof, p_value)`.
pub fn eigen_chi_square(
    field: FieldKind,
    n: usize,
    samples: &[(f64, f64)],
    bins: usize,
) -> Result<(f64, usize, f64)> {
    let density = EigenDensity::new(field, n)?;
    let h = 1.0 / bins as f64;
    let cell = |v: f64| ((v / h) as usize).min(bins - 1);
    let mut counts = vec![vec![0usize; bins]; bins];
    for &(l1, l2) in samples {
        counts[cell(l1)][cell(l2)] += 1;
    }
    let total = samples.len() as f64;
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (i, row) in counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate().take(i + 1) {
            let xr = (i as f64 * h, (i + 1) as f64 * h);
            let yr = (j as f64 * h, (j + 1) as f64 * h);
            let exp = total * density.cell_mass(xr, yr, 24)?;
            if exp < 5.0 {
                pooled_obs += obs as f64;
                pooled_exp += exp;
            } else {
                stat += (obs as f64 - exp).powi(2) / exp;
                cells += 1;
            }
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    let dof = cells.saturating_sub(1).max(1);
    Ok((stat, dof, chi_square_sf(stat, dof)?))
}

pub fn run_diagnostics(cfg: &ExperimentConfig) -> Result<DiagnosticReport> {
    check_kind(cfg, ExperimentKind::Diagnostics)?;
    match cfg.field {
        FieldKind::Real => diagnostics_for::<f64>(cfg),
        FieldKind::Complex => diagnostics_for::<Complex64>(cfg),
    }
}

fn diagnostics_for<T: Scalar>(cfg: &ExperimentConfig) -> Result<DiagnosticReport> {
    let seed = cfg.master_seed;
    let n = cfg.n;
    let x = signal_at::<T>(n, seed, &[0])?;
    let checks = vec![
        beta_law(&x, seed)?,
        expectation(&x, seed)?,
        hamming_vs_norm::<T>(n, cfg.inputs.min(1_000), seed)?,
    ];
    let mut report = DiagnosticReport { checks };
    if n >= 2 {
        let pairs = compression_samples::<T>(n, SEPARATION_SAMPLES, seed, 14)?;
        report.checks.push(separation(T::FIELD, n, &pairs)?);
        report.checks.push(eigen_density(T::FIELD, n, &pairs)?);
    } else {
        report.checks.push(Check::skip("separation_probability", "needs n >= 2"));
        report.checks.push(Check::skip("eigen_density", "needs n >= 2"));
    }
    report.checks.push(soft_sandwich::<T>(n, seed)?);
    Ok(report)
}

fn beta_law<T: Scalar>(x: &RankOneProjection<T>, seed: u64) -> Result<Check> {
    let field = T::FIELD;
    let n = x.dim() / 2;
    let samples = trace_samples(x, BETA_SAMPLES, seed, 10)?;
    let (a, b) = measurement_beta_params(field, n);
    let ks = ks_statistic(&samples, beta_cdf(a, b)?);
    let ks_max = 1.36 / (BETA_SAMPLES as f64).sqrt() + 0.005;
    let s = Summary::of(&samples);
    let var = measurement_variance(field, n);
    let ok = ks < ks_max && (s.mean - 0.5).abs() <= 0.01 && (s.variance / var - 1.0).abs() <= 0.1;
    Ok(Check::new(
        "beta_law",
        ok,
        format!(
            "KS {ks:.5} (< {ks_max:.5}), mean {:.5}, variance {:.6} vs {var:.6}",
            s.mean, s.variance
        ),
    ))
}

fn expectation<T: Scalar>(x: &RankOneProjection<T>, seed: u64) -> Result<Check> {
    let n = x.dim() / 2;
    let m = EXPECTATION_M * (n / 4).max(1);
    let ens = SeededEnsemble::new(n, m, SeedStream::with_path(seed, &[11]))?;
    let (_, q) = measure_and_average::<T, _>(&ens, x)?;
    let eig = q.eigen();
    let (mu1, mu2) = mu_pair(T::FIELD, n)?;
    let top_dev = (eig.values[0] - mu1).abs();
    let rest_dev = eig.values[1..].iter().map(|v| (v - mu2).abs()).fold(0.0, f64::max);
    let top = RankOneProjection::from_unit(UnitVector::new(eig.vector(0))?);
    let overlap = x.overlap(&top)?;
    let ok = top_dev <= EIGEN_TOL && rest_dev <= EIGEN_TOL && overlap >= 0.99;
    Ok(Check::new(
        "expectation_structure",
        ok,
        format!("m {m}: |λ1-μ1| {top_dev:.5}, max |λi-μ2| {rest_dev:.5}, tr(X E1) {overlap:.5}"),
    ))
}

fn hamming_vs_norm<T: Scalar>(n: usize, pairs: usize, seed: u64) -> Result<Check> {
    let ens = sample_ensemble::<T>(n, PAIR_M, &SeedStream::with_path(seed, &[12]))?;
    let worst = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let x = signal_at::<T>(n, seed, &[13, i, 0])?;
            let y = signal_at::<T>(n, seed, &[13, i, 1])?;
            Ok(measurement_hamming(&ens, &x, &y)? - rank_one_distance(&x, &y)?)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Check::new(
        "hamming_vs_norm",
        worst <= HAMMING_MARGIN,
        format!("max d_P - ‖X-Y‖ over {pairs} pairs at m {PAIR_M}: {worst:.5} (<= {HAMMING_MARGIN})"),
    ))
}

fn separation(field: FieldKind, n: usize, pairs: &[(f64, f64)]) -> Result<Check> {
    let hits = pairs.iter().filter(|&&(l1, l2)| l2 < 0.5 && 0.5 < l1).count();
    let p_hat = hits as f64 / pairs.len() as f64;
    let p = dsep_probability(field, n)?;
    let se = proportion_std_error(p, pairs.len());
    Ok(Check::new(
        "separation_probability",
        (p_hat - p).abs() <= 3.0 * se,
        format!("Monte Carlo {p_hat:.5} vs closed form {p:.5} (3 SE = {:.5})", 3.0 * se),
    ))
}

fn eigen_density(field: FieldKind, n: usize, pairs: &[(f64, f64)]) -> Result<Check> {
    let (stat, dof, p) = eigen_chi_square(field, n, pairs, DENSITY_BINS)?;
    Ok(Check::new(
        "eigen_density",
        p > CHI_SQUARE_ALPHA,
        format!("chi-square {stat:.2} on {dof} dof, p = {p:.4}"),
    ))
}

fn soft_sandwich<T: Scalar>(n: usize, seed: u64) -> Result<Check> {
    let eps = SANDWICH_EPS;
    let failures = (0..SANDWICH_INSTANCES as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let ens = sample_ensemble::<T>(n, SANDWICH_M, &SeedStream::with_path(seed, &[15, i]))?;
            let x0 = signal_at::<T>(n, seed, &[16, i, 0])?;
            let y0 = signal_at::<T>(n, seed, &[16, i, 1])?;
            let x = RankOneProjection::from_unit(perturb_signal(x0.vector(), eps, &SeedStream::with_path(seed, &[16, i, 2]))?);
            let y = RankOneProjection::from_unit(perturb_signal(y0.vector(), eps, &SeedStream::with_path(seed, &[16, i, 3]))?);
            let t = SeedStream::with_path(seed, &[16, i, 4]).rng().random_range(-0.1..0.1);
            let inner = soft_hamming(&ens, &x0, &y0, t)?;
            let lower = soft_hamming(&ens, &x, &y, t + eps)?;
            let upper = soft_hamming(&ens, &x, &y, t - eps)?;
            Ok(usize::from(!(lower <= inner && inner <= upper)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(Check::new(
        "soft_hamming_sandwich",
        failures == 0,
        format!("{failures} of {SANDWICH_INSTANCES} instances violate d^(t+ε)(X,Y) <= d^t(X0,Y0) <= d^(t-ε)(X,Y)"),
    ))
}

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::f64::consts::{E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bitretrieve::experiments::diagnostics::{compression_samples, trace_samples};
use bitretrieve::experiments::{
    run_experiment, signal_at, ExperimentConfig, ExperimentKind, MGrid, RunOutput,
};
use bitretrieve::stats::{beta_cdf, ks_statistic, median, proportion_std_error, Summary};
use bitretrieve::theory::{
    dsep_probability, gap_bounds, measurement_beta_params, measurement_variance, mu_pair,
    pointwise_delta, pointwise_m, spectral_gap, uniform_delta, EigenDensity,
};
use bitretrieve::types::difference_decomposition;
use bitretrieve::{
    expected_average, measure_and_average, measurement_hamming, operator_norm, rank_one_distance,
    sample_ensemble, Complex64, FieldKind, FlipMode, HermitianMatrix, RankOneProjection, Scalar,
    SeedStream, SeededEnsemble, UnitVector,
};

const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.passed = false;
    }
    o.detail = format!("{} [{:.1}s, limit {}s]", o.detail, took.as_secs_f64(), limit.as_secs());
    o
}

fn beta_law_case<T: Scalar>(n: usize) -> (bool, String) {
    let field = T::FIELD;
    let count = 20_000;
    let x = signal_at::<T>(n, SEED, &[0]).unwrap();
    let t = trace_samples(&x, count, SEED, 100).unwrap();
    let (a, b) = measurement_beta_params(field, n);
    let ks = ks_statistic(&t, beta_cdf(a, b).unwrap());
    let s = Summary::of(&t);
    let var = measurement_variance(field, n);
    let ok = ks < 0.015 && (s.mean - 0.5).abs() <= 0.01 && (s.variance / var - 1.0).abs() <= 0.10;
    (
        ok,
        format!(
            "({field}, n={n}) KS {ks:.4}, mean {:.4}, var {:.5}/{var:.5}",
            s.mean, s.variance
        ),
    )
}

fn c1_beta_law() -> Outcome {
    timed(minutes(1), || {
        let (a, da) = beta_law_case::<f64>(8);
        let (b, db) = beta_law_case::<Complex64>(4);
        outcome(a && b, format!("{da}; {db}"))
    })
}

fn c2_expectation_structure() -> Outcome {
    timed(minutes(1), || {
        let n = 4;
        let x = signal_at::<f64>(n, SEED, &[0]).unwrap();
        let ens = SeededEnsemble::new(n, 50_000, SeedStream::with_path(SEED, &[200])).unwrap();
        let (_, q) = measure_and_average::<f64, _>(&ens, &x).unwrap();
        let eig = q.eigen();
        let (mu1, mu2) = mu_pair(FieldKind::Real, n).unwrap();
        let top = (eig.values[0] - mu1).abs();
        let rest = eig.values[1..].iter().map(|v| (v - mu2).abs()).fold(0.0, f64::max);
        let e1 = RankOneProjection::from_unit(UnitVector::new(eig.vector(0)).unwrap());
        let overlap = x.overlap(&e1).unwrap();
        outcome(
            top <= 0.01 && rest <= 0.01 && overlap >= 0.99,
            format!("|λ1-μ1| {top:.4}, max |λi-μ2| {rest:.4} over 7, tr(X E1) {overlap:.5}"),
        )
    })
}

fn pointwise(field: FieldKind, n: usize, grid: Vec<u64>, trials: usize) -> RunOutput {
    run_experiment(&ExperimentConfig {
        experiment: ExperimentKind::Pointwise,
        field,
        n,
        m_grid: MGrid::Explicit(grid),
        trials,
        master_seed: SEED,
        ..ExperimentConfig::default()
    })
    .unwrap()
}

fn c3_pointwise_guarantee() -> Outcome {
    timed(minutes(10), || {
        let m = pointwise_m(FieldKind::Real, 8, 0.3, 2.0).unwrap();
        let out = pointwise(FieldKind::Real, 8, vec![m], 100);
        let good = out.records.iter().filter(|r| r.error < 0.3).count();
        outcome(
            good >= 80,
            format!("m = {m}: {good}/100 trials with error < 0.3 (need >= 80)"),
        )
    })
}

fn c4_error_rate() -> Outcome {
    timed(minutes(15), || {
        let grid: Vec<u64> = (0..7).map(|k| 10f64.powf(2.0 + 0.5 * k as f64).round() as u64).collect();
        let out = pointwise(FieldKind::Real, 8, grid.clone(), 50);
        let mut pts = Vec::new();
        let mut below = true;
        for &m in &grid {
            let errs: Vec<f64> = out.records.iter().filter(|r| r.m == m).map(|r| r.error).collect();
            let med = median(&errs);
            below &= med < pointwise_delta(FieldKind::Real, 8, m, 2.0).unwrap();
            pts.push(((m as f64).ln(), med.ln()));
        }
        let k = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / k,
            pts.iter().map(|p| p.1).sum::<f64>() / k,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        outcome(
            (-0.65..=-0.35).contains(&slope) && below,
            format!("slope {slope:.3} in [-0.65, -0.35]; medians below bound curve: {below}"),
        )
    })
}

fn c5_uniform() -> Outcome {
    timed(minutes(10), || {
        let m = 20_000;
        let out = run_experiment(&ExperimentConfig {
            experiment: ExperimentKind::Uniform,
            n: 8,
            m_grid: MGrid::Explicit(vec![m]),
            inputs: 1_000,
            master_seed: SEED,
            ..ExperimentConfig::default()
        })
        .unwrap();
        let errs: Vec<f64> = out.records.iter().map(|r| r.error).collect();
        let max = errs.iter().cloned().fold(0.0, f64::max);
        let med = median(&errs);
        let delta = uniform_delta(FieldKind::Real, 8, m, 2.0).unwrap();
        outcome(
            max < delta && max < 5.0 * med,
            format!("max error {max:.4} < δ(m) {delta:.4}; median {med:.4} (max < 5·median)"),
        )
    })
}

fn c6_separation() -> Outcome {
    timed(minutes(5), || {
        let count = 100_000;
        let real = compression_samples::<f64>(2, count, SEED, 600).unwrap();
        let cplx = compression_samples::<Complex64>(2, count, SEED, 601).unwrap();
        let rate = |v: &[(f64, f64)]| v.iter().filter(|&&(a, b)| b < 0.5 && 0.5 < a).count() as f64 / count as f64;
        let (pr, pc) = (rate(&real), rate(&cplx));
        let (er, ec) = (FRAC_PI_4, 0.875);
        let ok_r = (pr - er).abs() <= 3.0 * proportion_std_error(er, count);
        let ok_c = (pc - ec).abs() <= 3.0 * proportion_std_error(ec, count);
        let closed_ok = (dsep_probability(FieldKind::Real, 2).unwrap() - er).abs() < 1e-12
            && (dsep_probability(FieldKind::Complex, 2).unwrap() - ec).abs() < 1e-12;
        let lr = dsep_probability(FieldKind::Real, 512).unwrap();
        let lc = dsep_probability(FieldKind::Complex, 512).unwrap();
        let lim_r = FRAC_1_SQRT_2;
        let lim_c = 0.5 + FRAC_1_PI;
        let ok_lim = (lr / lim_r - 1.0).abs() < 0.01 && (lc / lim_c - 1.0).abs() < 0.01;
        outcome(
            ok_r && ok_c && closed_ok && ok_lim,
            format!(
                "real {pr:.4} vs π/4, complex {pc:.4} vs 0.875; n=512: {lr:.5} vs {lim_r:.5}, {lc:.5} vs {lim_c:.5}"
            ),
        )
    })
}

fn c7_hamming_vs_norm() -> Outcome {
    timed(minutes(10), || {
        let n = 8;
        let ens = sample_ensemble::<f64>(n, 20_000, &SeedStream::with_path(SEED, &[700])).unwrap();
        let worst = (0..1_000u64)
            .map(|i| {
                let x = signal_at::<f64>(n, SEED, &[701, i, 0]).unwrap();
                let y = signal_at::<f64>(n, SEED, &[701, i, 1]).unwrap();
                measurement_hamming(&ens, &x, &y).unwrap() - rank_one_distance(&x, &y).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        outcome(worst <= 0.05, format!("max d_P - ‖X-Y‖ over 1000 pairs: {worst:.4} (<= 0.05)"))
    })
}

fn c8_noise() -> Outcome {
    timed(minutes(10), || {
        let (n, delta, tau) = (4, 0.2, 0.05);
        let m = pointwise_m(FieldKind::Real, n, delta, 2.0).unwrap();
        let threshold = delta + 2.0 * (56.0 / 9.0) * tau;
        let mut ok = true;
        let mut parts = Vec::new();
        for mode in [FlipMode::Random, FlipMode::Greedy] {
            let out = run_experiment(&ExperimentConfig {
                experiment: ExperimentKind::Noise,
                n,
                m_grid: MGrid::Explicit(vec![m]),
                trials: 100,
                delta,
                bound_d: 2.0,
                tau,
                flip_mode: mode,
                master_seed: SEED,
                ..ExperimentConfig::default()
            })
            .unwrap();
            let good = out.records.iter().filter(|r| r.error <= threshold).count();
            let worst = out.records.iter().map(|r| r.error).fold(0.0, f64::max);
            ok &= good >= 80 && out.violations.is_empty();
            parts.push(format!(
                "{mode}: {good}/100 within {threshold:.4} (max {worst:.4}, certified violations {})",
                out.violations.len()
            ));
        }
        outcome(ok, format!("m = {m}; {}", parts.join("; ")))
    })
}

fn random_pair<T: Scalar>(n: usize, i: u64) -> (RankOneProjection<T>, RankOneProjection<T>) {
    (
        signal_at::<T>(n, SEED, &[900, n as u64, i, 0]).unwrap(),
        signal_at::<T>(n, SEED, &[900, n as u64, i, 1]).unwrap(),
    )
}

/// Max deviations of the spectral identities and the norm inequality over
/// 1000 pairs with n cycling through 1..=8.
fn pair_identities<T: Scalar>() -> (f64, f64) {
    let (mut spectral, mut norm_excess) = (0.0_f64, f64::NEG_INFINITY);
    for i in 0..1_000u64 {
        let n = 1 + (i % 8) as usize;
        let (x, y) = random_pair::<T>(n, i);
        let dist = rank_one_distance(&x, &y).unwrap();
        let diff = x.matrix() - y.matrix();
        let op = operator_norm(&HermitianMatrix::new(diff.clone()).unwrap());
        let (mu1, mu2) = mu_pair(T::FIELD, n).unwrap();
        let q = expected_average(&x, mu1, mu2);
        // tr(Q(X)(X - Y)) = (μ1 - μ2) ||X - Y||²
        let via_q = (q.matrix() * &diff).trace().real() / (mu1 - mu2);
        let (s, a, b) = difference_decomposition(&x, &y).unwrap();
        let rebuilt = ((a.matrix() - b.matrix()).scale(s) - &diff).norm();
        spectral = spectral
            .max((op - dist).abs())
            .max((via_q - dist * dist).abs())
            .max(rebuilt);
        let vec_dist = (x.vector().entries() - y.vector().entries()).norm();
        norm_excess = norm_excess.max(dist - vec_dist);
    }
    (spectral, norm_excess)
}

/// Worst `tr(Q̂ Y) - tr(Q̂ X̂)` over random rank-one `Y`.
fn pep_certificate<T: Scalar>(instances: u64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..instances {
        let n = 1 + (i % 6) as usize;
        let x = signal_at::<T>(n, SEED, &[910, i]).unwrap();
        let ens = SeededEnsemble::new(n, 300, SeedStream::with_path(SEED, &[911, i])).unwrap();
        let (_, q) = measure_and_average::<T, _>(&ens, &x).unwrap();
        let rec = bitretrieve::recovery::recover_from_average(&q).unwrap();
        let best = rec.estimate.expectation(q.matrix()).unwrap();
        for k in 0..100u64 {
            let y = signal_at::<T>(n, SEED, &[912, i, k]).unwrap();
            worst = worst.max(y.expectation(q.matrix()).unwrap() - best);
        }
    }
    worst
}

fn c9_identities() -> Outcome {
    timed(minutes(5), || {
        let mut trace_dev = 0.0_f64;
        for field in [FieldKind::Real, FieldKind::Complex] {
            for n in 1..=64 {
                let (mu1, mu2) = mu_pair(field, n).unwrap();
                trace_dev = trace_dev.max((mu1 + (2 * n - 1) as f64 * mu2 - n as f64).abs());
            }
        }

        let mut outside = Vec::new();
        let mut shifted_outside = 0;
        let mut checked = 0;
        for (field, range) in [(FieldKind::Real, 4..=128), (FieldKind::Complex, 2..=64)] {
            for n in range {
                let (lo, hi) = gap_bounds(field, n).unwrap();
                let gap = spectral_gap(field, n).unwrap();
                checked += 1;
                if !(lo <= gap && gap <= hi) {
                    outside.push(format!("({field}, n={n}): {gap:.4} not in [{lo:.4}, {hi:.4}]"));
                }
                // the same envelope with n in place of n - 1
                let b = field.beta() * n as f64;
                let lo_n = n as f64 * (2.0 * b - 1.0).sqrt() / ((2.0 * PI).sqrt() * b * (2 * n - 1) as f64);
                if !(lo_n <= gap && gap <= 4.0 / E * lo_n) {
                    shifted_outside += 1;
                }
            }
        }

        let (sr, nr) = pair_identities::<f64>();
        let (sc, nc) = pair_identities::<Complex64>();
        let cert = pep_certificate::<f64>(20).max(pep_certificate::<Complex64>(20));
        let mass_dev = [
            (FieldKind::Real, 2),
            (FieldKind::Real, 3),
            (FieldKind::Real, 8),
            (FieldKind::Complex, 2),
            (FieldKind::Complex, 5),
        ]
        .iter()
        .map(|&(f, n)| (EigenDensity::new(f, n).unwrap().total_mass(64) - 1.0).abs())
        .fold(0.0, f64::max);

        let subs = [
            ("trace identity", trace_dev <= 1e-12),
            ("gap envelope", outside.is_empty()),
            ("spectral identity", sr.max(sc) <= 1e-8),
            ("norm inequality", nr.max(nc) <= 1e-12),
            ("PEP certificate", cert <= 1e-9),
            ("density mass", mass_dev <= 1e-6),
        ];
        let failed: Vec<&str> = subs.iter().filter(|s| !s.1).map(|s| s.0).collect();
        let mut detail = format!(
            "trace dev {trace_dev:.1e}; spectral dev {:.1e}; norm excess {:.1e}; certificate {cert:.1e}; density dev {mass_dev:.1e}; gap envelope holds at {}/{checked}",
            sr.max(sc),
            nr.max(nc),
            checked - outside.len()
        );
        if !outside.is_empty() {
            detail.push_str(&format!(
                "; outside: {}; with n in place of n-1 the envelope fails at {shifted_outside}/{checked}",
                outside.join(", ")
            ));
        }
        if !failed.is_empty() {
            detail.push_str(&format!("; failing: {}", failed.join(", ")));
        }
        outcome(failed.is_empty(), detail)
    })
}

fn write_all(out: &RunOutput, dir: &Path, name: &str) -> Vec<(String, Vec<u8>)> {
    let path = dir.join(name);
    out.write(&path).unwrap();
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(name.trim_end_matches(".csv")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c10_reproducibility() -> Outcome {
    timed(minutes(5), || {
        let configs = [
            (ExperimentKind::Pointwise, FieldKind::Real, vec![100, 1_000, 5_000]),
            (ExperimentKind::Uniform, FieldKind::Complex, vec![300, 2_000]),
            (ExperimentKind::Noise, FieldKind::Real, vec![1_500, 3_000]),
        ];
        let mut ok = true;
        let mut files = 0;
        for (kind, field, grid) in configs {
            let cfg = ExperimentConfig {
                experiment: kind,
                field,
                n: 4,
                m_grid: MGrid::Explicit(grid),
                trials: 6,
                inputs: 40,
                flip_mode: FlipMode::Greedy,
                master_seed: 77,
                ..ExperimentConfig::default()
            };
            let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
            for threads in [1, 4, 8] {
                let dir = tempfile::tempdir().unwrap();
                let out = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| run_experiment(&cfg).unwrap());
                let bytes = write_all(&out, dir.path(), &format!("{kind}.csv"));
                match &reference {
                    None => {
                        files += bytes.len();
                        reference = Some(bytes);
                    }
                    Some(r) => ok &= *r == bytes,
                }
            }
        }
        outcome(ok, format!("{files} CSV files byte-identical across 1, 4 and 8 threads: {ok}"))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("beta measurement law", c1_beta_law),
        ("expectation structure", c2_expectation_structure),
        ("pointwise guarantee", c3_pointwise_guarantee),
        ("error rate", c4_error_rate),
        ("uniform recovery", c5_uniform),
        ("separation probability", c6_separation),
        ("hamming vs operator norm", c7_hamming_vs_norm),
        ("noise robustness", c8_noise),
        ("exact identities", c9_identities),
        ("reproducibility", c10_reproducibility),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, o.detail);
        failures += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

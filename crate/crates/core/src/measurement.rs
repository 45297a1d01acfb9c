//! The one-bit measurement map, Hamming geometry on its outputs, the
//! t-soft Hamming distance, and bit-flip corruption.
//!
//! A projection `P` of rank `k` on `F^d` answers the binary question
//! `tr(PX) >= k/d`. Ties resolve to 1, so bit `1` always selects `P` itself
//! as the proximally flipped projection.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::sampler::{ProjectionSource, SeedStream};
use crate::types::{check_dims, BitString, OrthogonalProjection, RankOneProjection};

/// Threshold of the binary question for projections with `k = n`, `d = 2n`.
pub const HALF: f64 = 0.5;

fn threshold<T: Scalar>(p: &OrthogonalProjection<T>) -> f64 {
    p.rank() as f64 / p.dim() as f64
}

/// `phi_P(X)`: `true` iff `tr(PX) >= k/d`.
pub fn binary_question<T: Scalar>(
    p: &OrthogonalProjection<T>,
    x: &RankOneProjection<T>,
) -> Result<bool> {
    Ok(p.trace_with(x)? >= threshold(p))
}

/// `tr(P_j X)` for every element of the ensemble.
pub fn measurement_traces<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    x: &RankOneProjection<T>,
) -> Result<Vec<f64>> {
    check_dims(ens.dim(), x.dim())?;
    Ok((0..ens.len())
        .into_par_iter()
        .map(|j| ens.projection(j).trace_with_unchecked(x))
        .collect())
}

/// Bit string from precomputed traces, using the threshold `1/2`.
pub fn bits_from_traces(traces: &[f64]) -> BitString {
    BitString::new(traces.iter().map(|&t| t >= HALF).collect())
}

/// `Phi_P(X)`.
pub fn measure<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    x: &RankOneProjection<T>,
) -> Result<BitString> {
    check_dims(ens.dim(), x.dim())?;
    let bits = (0..ens.len())
        .into_par_iter()
        .map(|j| {
            let p = ens.projection(j);
            p.trace_with_unchecked(x) >= threshold(&p)
        })
        .collect();
    Ok(BitString::new(bits))
}

/// Normalized Hamming distance.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "bit strings differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let differ = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count();
    Ok(differ as f64 / a.len() as f64)
}

/// `d_P(X, Y)`: the fraction of ensemble elements that separate `X` and `Y`.
pub fn measurement_hamming<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
) -> Result<f64> {
    check_dims(ens.dim(), x.dim())?;
    check_dims(x.dim(), y.dim())?;
    let count = (0..ens.len())
        .into_par_iter()
        .filter(|&j| {
            let p = ens.projection(j);
            let th = threshold(&p);
            (p.trace_with_unchecked(x) >= th) != (p.trace_with_unchecked(y) >= th)
        })
        .count();
    Ok(count as f64 / ens.len() as f64)
}

/// `P` separates `X` and `Y` when its binary questions disagree on them.
pub fn separates<T: Scalar>(
    p: &OrthogonalProjection<T>,
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
) -> Result<bool> {
    Ok(binary_question(p, x)? != binary_question(p, y)?)
}

/// Event `tr(PX) + t < 1/2 <= tr(PY) - t`, or the same with `X`, `Y`
/// swapped, on precomputed traces.
pub fn t_separated(trace_x: f64, trace_y: f64, t: f64) -> bool {
    (trace_x + t < HALF && HALF <= trace_y - t) || (trace_y + t < HALF && HALF <= trace_x - t)
}

/// `P` t-separates `X` and `Y`. Requires `d = 2k`.
pub fn t_separates<T: Scalar>(
    p: &OrthogonalProjection<T>,
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
    t: f64,
) -> Result<bool> {
    check_soft(p.rank(), p.dim(), t)?;
    Ok(t_separated(p.trace_with(x)?, p.trace_with(y)?, t))
}

/// `d_P^t(X, Y)`: the fraction of ensemble elements that t-separate.
pub fn soft_hamming<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
    t: f64,
) -> Result<f64> {
    check_soft(ens.half_dim(), ens.dim(), t)?;
    check_dims(ens.dim(), x.dim())?;
    check_dims(x.dim(), y.dim())?;
    let count = (0..ens.len())
        .into_par_iter()
        .filter(|&j| {
            let p = ens.projection(j);
            t_separated(p.trace_with_unchecked(x), p.trace_with_unchecked(y), t)
        })
        .count();
    Ok(count as f64 / ens.len() as f64)
}

fn check_soft(k: usize, d: usize, t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("softness t must be finite, got {t}")));
    }
    if 2 * k != d {
        return Err(Error::invalid(format!(
            "t-separation needs rank n on dimension 2n, got rank {k} on {d}"
        )));
    }
    Ok(())
}

/// Which positions `corrupt_bits` flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipMode {
    /// A uniformly random subset drawn from the seed stream.
    Random,
    /// The positions with the largest `|1 - 2 tr(P_j X)|`.
    Greedy,
}

impl fmt::Display for FlipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipMode::Random => "random",
            FlipMode::Greedy => "greedy",
        })
    }
}

impl FromStr for FlipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(FlipMode::Random),
            "greedy" => Ok(FlipMode::Greedy),
            other => Err(Error::invalid(format!("unknown flip mode `{other}`"))),
        }
    }
}

/// Number of flips for rate `tau` on `m` bits: `floor(tau * m)`.
pub fn flip_count(tau: f64, m: usize) -> usize {
    ((tau * m as f64).floor() as usize).min(m)
}

/// Flips exactly `floor(tau * m)` bits.
///
/// Flipping bit `j` moves `tr(Q X)` of the empirical average by
/// `±(1 - 2 tr(P_j X)) / m`, so greedy mode needs the per-measurement
/// traces `tr(P_j X)` (see [`measurement_traces`]); random mode ignores them.
pub fn corrupt_bits(
    bits: &BitString,
    tau: f64,
    mode: FlipMode,
    stream: &SeedStream,
    traces: Option<&[f64]>,
) -> Result<BitString> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::invalid(format!("flip rate tau must lie in [0, 1), got {tau}")));
    }
    let m = bits.len();
    let k = flip_count(tau, m);
    let mut out = bits.clone();
    match mode {
        FlipMode::Random => {
            let mut rng = stream.rng();
            let mut idx: Vec<usize> = (0..m).collect();
            for i in 0..k {
                let j = rng.random_range(i..m);
                idx.swap(i, j);
                out.flip(idx[i]);
            }
        }
        FlipMode::Greedy => {
            let traces = traces.ok_or_else(|| {
                Error::invalid("greedy bit flips need the measurement traces tr(P_j X)")
            })?;
            if traces.len() != m {
                return Err(Error::invalid(format!(
                    "got {} traces for {m} bits",
                    traces.len()
                )));
            }
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by(|&a, &b| {
                let da = (1.0 - 2.0 * traces[a]).abs();
                let db = (1.0 - 2.0 * traces[b]).abs();
                db.total_cmp(&da).then(a.cmp(&b))
            });
            for &j in &idx[..k] {
                out.flip(j);
            }
        }
    }
    Ok(out)
}

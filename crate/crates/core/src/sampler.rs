//! Reproducible sampling of uniform unit vectors and Haar-uniform
//! projections.
//!
//! Randomness is keyed by a [`SeedStream`]: a master seed plus a path of
//! indices such as `[trial, m, j]`. The path is hashed with SHA-256 into a
//! ChaCha20 key, so every path owns an independent stream and the values a
//! computation sees never depend on thread count or evaluation order.
//!
//! Gaussians are produced by the Box–Muller transform on 53-bit uniforms
//! (`u1` in `(0, 1]`, `u2` in `[0, 1)`), using both outputs of each pair.
//! The transform is pinned here rather than delegated to a distribution
//! crate so replay stays bit-identical across dependency upgrades.

use std::borrow::Cow;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{FieldKind, Scalar};
use crate::types::{OrthogonalProjection, UnitVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeedStream {
    master_seed: u64,
    path: Vec<u64>,
}

impl SeedStream {
    pub fn new(master_seed: u64) -> Self {
        SeedStream {
            master_seed,
            path: Vec::new(),
        }
    }

    pub fn with_path(master_seed: u64, path: &[u64]) -> Self {
        SeedStream {
            master_seed,
            path: path.to_vec(),
        }
    }

    /// Sub-stream at `path ⊕ [index]`.
    pub fn child(&self, index: u64) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(index);
        SeedStream {
            master_seed: self.master_seed,
            path,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut hasher = Sha256::new();
        hasher.update(b"bitretrieve/seed-stream/v1");
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update((self.path.len() as u64).to_le_bytes());
        for p in &self.path {
            hasher.update(p.to_le_bytes());
        }
        ChaCha20Rng::from_seed(hasher.finalize().into())
    }

    pub fn gaussian(&self) -> GaussianSource {
        GaussianSource::new(self.rng())
    }
}

/// Standard normal draws by Box–Muller.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(rng: ChaCha20Rng) -> Self {
        GaussianSource { rng, spare: None }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn uniform_index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }
}

/// `g / |g|` for a standard Gaussian `g` in `F^d`.
pub fn sample_unit_vector<T: Scalar>(dim: usize, stream: &SeedStream) -> Result<UnitVector<T>> {
    if dim == 0 {
        return Err(Error::invalid("unit vector dimension must be positive"));
    }
    let mut g = stream.gaussian();
    loop {
        let v = DVector::from_fn(dim, |_, _| T::gaussian(&mut g));
        // A zero draw has probability zero; redraw from the same stream.
        if let Ok(u) = UnitVector::new(v) {
            return Ok(u);
        }
    }
}

/// Haar-uniform rank-`k` projection on `F^d`: the span of `k` Gaussian
/// vectors, orthonormalized by QR with the phases of `diag(R)` absorbed
/// into `Q`.
pub fn sample_haar_projection<T: Scalar>(
    k: usize,
    dim: usize,
    stream: &SeedStream,
) -> Result<OrthogonalProjection<T>> {
    if k == 0 || k > dim {
        return Err(Error::invalid(format!(
            "projection rank must satisfy 1 <= k <= d, got k = {k}, d = {dim}"
        )));
    }
    if k == dim {
        return Ok(OrthogonalProjection::identity(dim));
    }
    let mut g = stream.gaussian();
    let gauss = DMatrix::from_fn(dim, k, |_, _| T::gaussian(&mut g));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        let rjj = r[(j, j)];
        let modulus = rjj.modulus();
        if modulus > 0.0 {
            let phase = rjj.unscale(modulus);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(OrthogonalProjection::from_orthonormal_columns(&q))
}

/// Anything that can hand out the measurement projections `P_j` of an
/// ensemble of rank-`n` projections on `F^{2n}`.
pub trait ProjectionSource<T: Scalar>: Sync {
    fn half_dim(&self) -> usize;

    fn len(&self) -> usize;

    fn projection(&self, j: usize) -> Cow<'_, OrthogonalProjection<T>>;

    fn dim(&self) -> usize {
        2 * self.half_dim()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn field(&self) -> FieldKind {
        T::FIELD
    }
}

/// A materialized ensemble `{P_j}`.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble<T: Scalar> {
    n: usize,
    projections: Vec<OrthogonalProjection<T>>,
}

impl<T: Scalar> MeasurementEnsemble<T> {
    /// Wraps user-supplied projections after checking that each has rank
    /// `n` on `F^{2n}`.
    pub fn from_projections(projections: Vec<OrthogonalProjection<T>>) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::invalid("ensemble must contain at least one projection"))?;
        let n = first.rank();
        for (j, p) in projections.iter().enumerate() {
            if p.rank() != n || p.dim() != 2 * n || n == 0 {
                return Err(Error::invalid(format!(
                    "projection {j} has rank {} on dimension {}; expected rank {n} on {}",
                    p.rank(),
                    p.dim(),
                    2 * n
                )));
            }
        }
        Ok(MeasurementEnsemble { n, projections })
    }

    pub fn projections(&self) -> &[OrthogonalProjection<T>] {
        &self.projections
    }
}

impl<T: Scalar> ProjectionSource<T> for MeasurementEnsemble<T> {
    fn half_dim(&self) -> usize {
        self.n
    }

    fn len(&self) -> usize {
        self.projections.len()
    }

    fn projection(&self, j: usize) -> Cow<'_, OrthogonalProjection<T>> {
        Cow::Borrowed(&self.projections[j])
    }
}

/// An ensemble regenerated on demand from its seed stream. Element `j` is
/// bit-identical to element `j` of [`sample_ensemble`] with the same
/// stream, but nothing is stored, so memory does not grow with `m`.
#[derive(Debug, Clone)]
pub struct SeededEnsemble {
    n: usize,
    m: usize,
    stream: SeedStream,
}

impl SeededEnsemble {
    pub fn new(n: usize, m: usize, stream: SeedStream) -> Result<Self> {
        check_ensemble_shape(n, m)?;
        Ok(SeededEnsemble { n, m, stream })
    }

    pub fn materialize<T: Scalar>(&self) -> MeasurementEnsemble<T> {
        let projections = (0..self.m)
            .into_par_iter()
            .map(|j| self.generate(j))
            .collect();
        MeasurementEnsemble {
            n: self.n,
            projections,
        }
    }

    fn generate<T: Scalar>(&self, j: usize) -> OrthogonalProjection<T> {
        sample_haar_projection(self.n, 2 * self.n, &self.stream.child(j as u64))
            .expect("shape validated at construction")
    }
}

impl<T: Scalar> ProjectionSource<T> for SeededEnsemble {
    fn half_dim(&self) -> usize {
        self.n
    }

    fn len(&self) -> usize {
        self.m
    }

    fn projection(&self, j: usize) -> Cow<'_, OrthogonalProjection<T>> {
        Cow::Owned(self.generate(j))
    }
}

/// `m` independent Haar projections of rank `n` on `F^{2n}`; element `j`
/// comes from `stream.child(j)`.
pub fn sample_ensemble<T: Scalar>(
    n: usize,
    m: usize,
    stream: &SeedStream,
) -> Result<MeasurementEnsemble<T>> {
    Ok(SeededEnsemble::new(n, m, stream.clone())?.materialize())
}

fn check_ensemble_shape(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("ensemble half-dimension n must be >= 1"));
    }
    if m == 0 {
        return Err(Error::invalid("ensemble size m must be >= 1"));
    }
    Ok(())
}

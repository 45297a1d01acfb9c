//! Recovery through the principal eigenspace of the empirical average of
//! proximally flipped projections.
//!
//! The program `max tr(Q Y)` over `Y ⪰ 0`, `tr Y <= 1` is solved exactly by
//! the top eigenvector of `Q`, so no iterative solver is involved.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::sampler::ProjectionSource;
use crate::types::{
    check_dims, BitString, HermitianMatrix, OrthogonalProjection, RankOneProjection, UnitVector,
};

/// Spectral margins below this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Number of measurements summed per partial accumulator. Fixed so the
/// reduction tree, and therefore every rounding, is independent of the
/// thread count.
const CHUNK: usize = 1024;

#[derive(Debug, Clone)]
pub struct RecoveryResult<T: Scalar> {
    pub estimate: RankOneProjection<T>,
    pub top_eigenvalue: f64,
    pub spectral_margin: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct PrincipalEigenpair<T: Scalar> {
    pub value: f64,
    pub vector: UnitVector<T>,
    /// `λ1 - λ2`; infinite for 1x1 input.
    pub margin: f64,
}

/// `P` for bit 1, `I - P` for bit 0.
pub fn flipped_projection<T: Scalar>(
    p: &OrthogonalProjection<T>,
    bit: bool,
) -> OrthogonalProjection<T> {
    if bit {
        p.clone()
    } else {
        p.complement()
    }
}

/// Sum of `±P_j` over a chunk plus the number of zero bits in it.
fn signed_chunk_sum<T, S, F>(ens: &S, range: std::ops::Range<usize>, mut bit: F) -> (DMatrix<T>, usize)
where
    T: Scalar,
    S: ProjectionSource<T> + ?Sized,
    F: FnMut(usize, &OrthogonalProjection<T>) -> bool,
{
    let d = ens.dim();
    let mut acc = DMatrix::<T>::zeros(d, d);
    let mut zeros = 0;
    for j in range {
        let p = ens.projection(j);
        if bit(j, &p) {
            acc += p.matrix();
        } else {
            acc -= p.matrix();
            zeros += 1;
        }
    }
    (acc, zeros)
}

/// Combines chunk partials in index order: `(Σ ±P_j + zeros · I) / m`.
fn combine<T: Scalar>(d: usize, m: usize, partials: Vec<(DMatrix<T>, usize)>) -> HermitianMatrix<T> {
    let mut total = DMatrix::<T>::zeros(d, d);
    let mut zeros = 0;
    for (acc, z) in partials {
        total += acc;
        zeros += z;
    }
    for i in 0..d {
        total[(i, i)] += T::from_real(zeros as f64);
    }
    HermitianMatrix::symmetrized(total.unscale(m as f64))
}

fn chunks(m: usize) -> impl IndexedParallelIterator<Item = std::ops::Range<usize>> {
    (0..m.div_ceil(CHUNK))
        .into_par_iter()
        .map(move |c| c * CHUNK..((c + 1) * CHUNK).min(m))
}

/// `Q̂ = (1/m) Σ_j P̂_j` with `P̂_j = P_j` for bit 1 and `I - P_j` for bit 0.
pub fn empirical_average<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    bits: &BitString,
) -> Result<HermitianMatrix<T>> {
    if bits.len() != ens.len() {
        return Err(Error::invalid(format!(
            "{} bits for an ensemble of {} projections",
            bits.len(),
            ens.len()
        )));
    }
    if ens.is_empty() {
        return Err(Error::invalid("empty ensemble"));
    }
    let partials = chunks(ens.len())
        .map(|r| signed_chunk_sum(ens, r, |j, _| bits.get(j)))
        .collect();
    Ok(combine(ens.dim(), ens.len(), partials))
}

/// Measures `X` and accumulates `Q̂` in a single pass over the ensemble.
/// Equivalent to `measure` followed by `empirical_average`, but each
/// projection is produced once, which matters for seeded ensembles.
pub fn measure_and_average<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    x: &RankOneProjection<T>,
) -> Result<(BitString, HermitianMatrix<T>)> {
    check_dims(ens.dim(), x.dim())?;
    if ens.is_empty() {
        return Err(Error::invalid("empty ensemble"));
    }
    let parts: Vec<(DMatrix<T>, usize, Vec<bool>)> = chunks(ens.len())
        .map(|r| {
            let mut bits = Vec::with_capacity(r.len());
            let (acc, z) = signed_chunk_sum(ens, r, |_, p| {
                let b = p.trace_with_unchecked(x) >= p.rank() as f64 / p.dim() as f64;
                bits.push(b);
                b
            });
            (acc, z, bits)
        })
        .collect();
    let mut bits = Vec::with_capacity(ens.len());
    let mut partials = Vec::with_capacity(parts.len());
    for (acc, z, b) in parts {
        bits.extend(b);
        partials.push((acc, z));
    }
    Ok((BitString::new(bits), combine(ens.dim(), ens.len(), partials)))
}

/// Top eigenvalue, a unit eigenvector for it, and the gap to the second
/// eigenvalue.
pub fn principal_eigenpair<T: Scalar>(h: &HermitianMatrix<T>) -> Result<PrincipalEigenpair<T>> {
    let eig = h.eigen();
    let value = eig.values[0];
    let margin = if eig.values.len() > 1 {
        (value - eig.values[1]).max(0.0)
    } else {
        f64::INFINITY
    };
    let vector = UnitVector::new(eig.vector(0))?;
    Ok(PrincipalEigenpair {
        value,
        vector,
        margin,
    })
}

/// Solves the principal eigenspace program for a given `Q̂`.
pub fn recover_from_average<T: Scalar>(q: &HermitianMatrix<T>) -> Result<RecoveryResult<T>> {
    let pair = principal_eigenpair(q)?;
    Ok(RecoveryResult {
        estimate: RankOneProjection::from_unit(pair.vector),
        top_eigenvalue: pair.value,
        spectral_margin: pair.margin,
        degenerate: pair.margin < DEGENERACY_TOL,
    })
}

/// Recovers `X̂` from the ensemble and its one-bit measurement.
pub fn pep_recover<T: Scalar, S: ProjectionSource<T> + ?Sized>(
    ens: &S,
    bits: &BitString,
) -> Result<RecoveryResult<T>> {
    let q = empirical_average(ens, bits)?;
    recover_from_average(&q)
}

/// `Q(X) = μ1 X + μ2 (I - X)`.
pub fn expected_average<T: Scalar>(x: &RankOneProjection<T>, mu1: f64, mu2: f64) -> HermitianMatrix<T> {
    let d = x.dim();
    let mut m = x.matrix().scale(mu1 - mu2);
    for i in 0..d {
        m[(i, i)] += T::from_real(mu2);
    }
    HermitianMatrix::symmetrized(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::measure;
    use crate::sampler::{sample_ensemble, sample_unit_vector, MeasurementEnsemble, SeedStream, SeededEnsemble};
    use crate::types::{operator_norm, rank_one_distance};
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn diag(v: &[f64]) -> HermitianMatrix<f64> {
        HermitianMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))).unwrap()
    }

    #[test]
    fn flipped_projection_pairs() {
        let p = crate::sampler::sample_haar_projection::<f64>(2, 4, &SeedStream::new(1)).unwrap();
        assert_eq!(flipped_projection(&p, true), p);
        let sum = flipped_projection(&p, true).matrix() + flipped_projection(&p, false).matrix();
        assert!((sum - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        let zero = OrthogonalProjection::<f64>::zero(3);
        assert_eq!(flipped_projection(&zero, false).matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn average_of_single_and_repeated_projection() {
        let p = crate::sampler::sample_haar_projection::<f64>(2, 4, &SeedStream::new(5)).unwrap();
        let ens = MeasurementEnsemble::from_projections(vec![p.clone()]).unwrap();
        let q = empirical_average(&ens, &"1".parse().unwrap()).unwrap();
        assert!((q.matrix() - p.matrix()).amax() < 1e-15);

        let ens = MeasurementEnsemble::from_projections(vec![p.clone(); 7]).unwrap();
        let q = empirical_average(&ens, &"1111111".parse().unwrap()).unwrap();
        assert!((q.matrix() - p.matrix()).amax() < 1e-14);
        assert!(empirical_average(&ens, &"11".parse().unwrap()).is_err());
    }

    #[test]
    fn average_trace_and_bounds() {
        let ens = sample_ensemble::<Complex64>(3, 3000, &SeedStream::new(2)).unwrap();
        let x = RankOneProjection::from_unit(sample_unit_vector(6, &SeedStream::new(3)).unwrap());
        let bits = measure(&ens, &x).unwrap();
        let q = empirical_average(&ens, &bits).unwrap();
        assert!((q.trace() - 3.0).abs() < 1e-8);
        let e = q.eigen();
        assert!(e.values[0] <= 1.0 + 1e-12 && *e.values.last().unwrap() >= -1e-12);
    }

    #[test]
    fn fused_pass_matches_two_pass() {
        let stream = SeedStream::new(77);
        let lazy = SeededEnsemble::new(2, 2500, stream.clone()).unwrap();
        let x = RankOneProjection::from_unit(sample_unit_vector::<f64>(4, &SeedStream::new(1)).unwrap());
        let (bits, q) = measure_and_average(&lazy, &x).unwrap();
        let ens = sample_ensemble::<f64>(2, 2500, &stream).unwrap();
        assert_eq!(bits, measure(&ens, &x).unwrap());
        assert_eq!(q, empirical_average(&ens, &bits).unwrap());
    }

    #[test]
    fn principal_pair_examples() {
        let p = principal_eigenpair(&diag(&[3.0, 1.0, 1.0, 1.0])).unwrap();
        assert!((p.value - 3.0).abs() < 1e-14);
        assert!((p.margin - 2.0).abs() < 1e-14);
        assert!((p.vector.entries()[0].abs() - 1.0).abs() < 1e-14);

        let p = principal_eigenpair(&diag(&[1.0; 4])).unwrap();
        assert_eq!(p.value, 1.0);
        assert_eq!(p.margin, 0.0);
        let r = recover_from_average(&diag(&[1.0; 4])).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn principal_pair_residual() {
        for seed in 0..5 {
            let ens = sample_ensemble::<Complex64>(4, 50, &SeedStream::new(seed)).unwrap();
            let x = RankOneProjection::from_unit(sample_unit_vector(8, &SeedStream::new(seed + 100)).unwrap());
            let q = empirical_average(&ens, &measure(&ens, &x).unwrap()).unwrap();
            let p = principal_eigenpair(&q).unwrap();
            let v = p.vector.entries();
            let resid = (q.matrix() * v - v.scale(p.value)).norm();
            assert!(resid <= 1e-10 * operator_norm(&q).max(1.0), "residual {resid}");
        }
    }

    #[test]
    fn expected_structure_recovers_signal() {
        let x = RankOneProjection::from_unit(sample_unit_vector::<f64>(6, &SeedStream::new(9)).unwrap());
        let q = expected_average(&x, 0.7, 0.3);
        let r = recover_from_average(&q).unwrap();
        assert!(rank_one_distance(&r.estimate, &x).unwrap() < 1e-12);
        assert!((r.spectral_margin - 0.4).abs() < 1e-12);

        let c = expected_average(&x, 0.4, 0.4);
        assert!((c.matrix() - DMatrix::<f64>::identity(6, 6).scale(0.4)).amax() < 1e-15);
    }

    #[test]
    fn diagonal_recovery() {
        let r = recover_from_average(&diag(&[0.9, 0.4, 0.4, 0.3])).unwrap();
        assert!((r.estimate.vector().entries()[0].abs() - 1.0).abs() < 1e-14);
        assert!(!r.degenerate);
    }
}

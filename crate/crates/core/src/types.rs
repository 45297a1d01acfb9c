//! Dense vectors, rank-one projections, orthogonal projections and
//! Hermitian matrices over a [`Scalar`] field, plus the one-bit
//! measurement string.
//!
//! Rank-one projections `X = xx*` are stored through a unit representative
//! `x`; the global phase of `x` is never fixed, so every comparison goes
//! through phase-invariant quantities such as `|<x, y>|^2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::{FieldKind, Scalar};

/// Deviation from unit norm tolerated after normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance for self-adjointness.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Entrywise tolerance for `P^2 = P` and for integrality of the trace.
pub const PROJECTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector<T: Scalar> {
    entries: DVector<T>,
}

impl<T: Scalar> UnitVector<T> {
    /// Normalizes `v`. Fails on empty, zero or non-finite input.
    pub fn new(v: DVector<T>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("vector has dimension 0"));
        }
        let norm = v.norm();
        if !norm.is_finite() {
            return Err(Error::invalid("vector has non-finite entries"));
        }
        if norm == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(UnitVector {
            entries: v.unscale(norm),
        })
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    /// Standard basis vector `e_index` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = T::one();
        Ok(UnitVector { entries: v })
    }

    pub fn field(&self) -> FieldKind {
        T::FIELD
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &DVector<T> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<T> {
        self.entries
    }

    /// `<self, other> = self^* other`.
    pub fn inner(&self, other: &Self) -> T {
        self.entries.dotc(&other.entries)
    }

    /// Multiplies by a unimodular scalar; the induced projection is unchanged.
    pub fn rotate_phase(&self, phase: T) -> Result<Self> {
        Self::new(self.entries.map(|e| e * phase))
    }
}

/// A rank-one orthogonal projection `X = xx^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneProjection<T: Scalar> {
    vector: UnitVector<T>,
}

impl<T: Scalar> RankOneProjection<T> {
    pub fn from_unit(vector: UnitVector<T>) -> Self {
        RankOneProjection { vector }
    }

    pub fn vector(&self) -> &UnitVector<T> {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn field(&self) -> FieldKind {
        T::FIELD
    }

    /// Materializes `xx^*`.
    pub fn matrix(&self) -> DMatrix<T> {
        let x = self.vector.entries();
        x * x.adjoint()
    }

    /// `tr(XY) = |<x, y>|^2`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.vector.inner(&other.vector).modulus_squared())
    }

    /// `tr(M X) = x^* M x` for a self-adjoint `M`.
    pub fn expectation(&self, m: &DMatrix<T>) -> Result<f64> {
        check_dims(m.nrows(), self.dim())?;
        check_dims(m.ncols(), self.dim())?;
        Ok(quadratic_form(m, self.vector.entries()))
    }
}

/// `rank_one_from_vector`: the canonical rank-one projection of `x / |x|`.
pub fn rank_one_from_vector<T: Scalar>(x: &[T]) -> Result<RankOneProjection<T>> {
    Ok(RankOneProjection::from_unit(UnitVector::from_slice(x)?))
}

/// Orthogonal projection of rank `k` on `F^d`, stored as its dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalProjection<T: Scalar> {
    matrix: DMatrix<T>,
    rank: usize,
}

impl<T: Scalar> OrthogonalProjection<T> {
    /// Validates a dense matrix as an orthogonal projection. The rank is
    /// read off the trace.
    pub fn from_matrix(matrix: DMatrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid("projection matrix must be square and nonempty"));
        }
        check_hermitian(&matrix)?;
        let sq = &matrix * &matrix;
        let idem = max_abs_diff(&sq, &matrix);
        if idem > PROJECTION_TOL {
            return Err(Error::invalid(format!(
                "matrix is not idempotent (max |P^2 - P| = {idem:e})"
            )));
        }
        let trace = matrix.trace().real();
        let rank = trace.round();
        if (trace - rank).abs() > PROJECTION_TOL || rank < 0.0 {
            return Err(Error::invalid(format!("projection trace {trace} is not an integer")));
        }
        Ok(OrthogonalProjection {
            matrix,
            rank: rank as usize,
        })
    }

    /// `QQ^*` for a `d x k` matrix with orthonormal columns. The caller
    /// guarantees orthonormality.
    pub(crate) fn from_orthonormal_columns(q: &DMatrix<T>) -> Self {
        OrthogonalProjection {
            matrix: q * q.adjoint(),
            rank: q.ncols(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalProjection {
            matrix: DMatrix::identity(dim, dim),
            rank: dim,
        }
    }

    pub fn zero(dim: usize) -> Self {
        OrthogonalProjection {
            matrix: DMatrix::zeros(dim, dim),
            rank: 0,
        }
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        OrthogonalProjection {
            matrix: DMatrix::identity(d, d) - &self.matrix,
            rank: d - self.rank,
        }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn field(&self) -> FieldKind {
        T::FIELD
    }

    /// `tr(PX)`.
    pub fn trace_with(&self, x: &RankOneProjection<T>) -> Result<f64> {
        check_dims(self.dim(), x.dim())?;
        Ok(quadratic_form(&self.matrix, x.vector().entries()))
    }

    /// `tr(PX)` with the dimension check skipped; for hot loops that have
    /// already validated dimensions.
    pub(crate) fn trace_with_unchecked(&self, x: &RankOneProjection<T>) -> f64 {
        quadratic_form(&self.matrix, x.vector().entries())
    }

    /// Entrywise `max |P^2 - P|`, `max |P - P^*|` and `|tr P - k|`.
    pub fn defects(&self) -> (f64, f64, f64) {
        let sq = &self.matrix * &self.matrix;
        (
            max_abs_diff(&sq, &self.matrix),
            max_abs_diff(&self.matrix, &self.matrix.adjoint()),
            (self.matrix.trace().real() - self.rank as f64).abs(),
        )
    }
}

/// A self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Scalar> {
    matrix: DMatrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid("matrix must be square and nonempty"));
        }
        check_hermitian(&matrix)?;
        Ok(HermitianMatrix { matrix })
    }

    /// Wraps `matrix` after forcing exact symmetry with `(M + M^*) / 2`.
    pub(crate) fn symmetrized(matrix: DMatrix<T>) -> Self {
        let half = T::from_real(0.5);
        let sym = (&matrix + matrix.adjoint()) * half;
        HermitianMatrix { matrix: sym }
    }

    pub fn from_rank_one(x: &RankOneProjection<T>) -> Self {
        HermitianMatrix { matrix: x.matrix() }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().real()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(HermitianMatrix {
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Eigenvalues in descending order with matching eigenvector columns.
    pub fn eigen(&self) -> SortedEigen<T> {
        SortedEigen::of(&self.matrix)
    }
}

/// Eigendecomposition with eigenvalues sorted in descending order.
///
/// Ties keep the solver's order, so the result is deterministic for a given
/// input matrix.
#[derive(Debug, Clone)]
pub struct SortedEigen<T: Scalar> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

impl<T: Scalar> SortedEigen<T> {
    fn of(m: &DMatrix<T>) -> Self {
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        SortedEigen { values, vectors }
    }

    pub fn vector(&self, i: usize) -> DVector<T> {
        self.vectors.column(i).into_owned()
    }
}

/// Largest absolute eigenvalue of a self-adjoint matrix.
pub fn operator_norm<T: Scalar>(h: &HermitianMatrix<T>) -> f64 {
    let values = h.matrix.clone().symmetric_eigenvalues();
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Operator norm of an arbitrary square matrix after validating it as
/// self-adjoint.
pub fn operator_norm_checked<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    let h = HermitianMatrix::new(m.clone())?;
    Ok(operator_norm(&h))
}

/// `||X - Y||` for rank-one projections, equal to `sin` of the principal
/// angle between their ranges.
pub fn rank_one_distance<T: Scalar>(
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
) -> Result<f64> {
    let overlap = x.overlap(y)?;
    Ok((1.0 - overlap).max(0.0).sqrt())
}

/// Spectral decomposition `X - Y = s (A - B)` with `A`, `B` mutually
/// orthogonal rank-one projections. Returns `(s, A, B)`. When `X = Y`
/// the pair is arbitrary (taken from the eigensolver) and `s = 0`.
pub fn difference_decomposition<T: Scalar>(
    x: &RankOneProjection<T>,
    y: &RankOneProjection<T>,
) -> Result<(f64, RankOneProjection<T>, RankOneProjection<T>)> {
    check_dims(x.dim(), y.dim())?;
    let diff = HermitianMatrix::symmetrized(x.matrix() - y.matrix());
    let eig = diff.eigen();
    let last = eig.values.len() - 1;
    let s = 0.5 * (eig.values[0] - eig.values[last]);
    let a = RankOneProjection::from_unit(UnitVector::new(eig.vector(0))?);
    let b = RankOneProjection::from_unit(UnitVector::new(eig.vector(last))?);
    Ok((s, a, b))
}

/// The one-bit measurement `Phi(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub(crate) fn flip(&mut self, j: usize) {
        self.bits[j] = !self.bits[j];
    }

    /// ASCII `0`/`1` characters followed by a single newline.
    pub fn to_line(&self) -> String {
        let mut s = self.to_string();
        s.push('\n');
        s
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Accepts the `to_line` format; one trailing newline (`\n` or `\r\n`)
    /// is allowed.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_suffix("\r\n")
            .or_else(|| s.strip_suffix('\n'))
            .unwrap_or(s);
        body.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString::new(bits)
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn check_hermitian<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().any(|e| !e.real().is_finite() || !e.imaginary().is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let asym = max_abs_diff(m, &m.adjoint());
    if asym > HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "matrix is not self-adjoint (max |M - M^*| = {asym:e})"
        )));
    }
    Ok(())
}

fn max_abs_diff<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (&x, &y)| acc.max((x - y).modulus()))
}

/// `Re(x^* M x)`.
pub(crate) fn quadratic_form<T: Scalar>(m: &DMatrix<T>, x: &DVector<T>) -> f64 {
    let mx = m * x;
    x.dotc(&mx).real()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit(v: &[f64]) -> RankOneProjection<f64> {
        rank_one_from_vector(v).unwrap()
    }

    #[test]
    fn basis_vector_gives_single_entry() {
        let x = unit(&[1.0, 0.0, 0.0, 0.0]);
        let m = x.matrix();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m.iter().filter(|&&e| e != 0.0).count(), 1);
    }

    #[test]
    fn sign_flip_gives_same_matrix() {
        let x = unit(&[0.3, -1.2, 0.5, 2.0]);
        let y = unit(&[-0.3, 1.2, -0.5, -2.0]);
        assert!(max_abs_diff(&x.matrix(), &y.matrix()) < 1e-15);
    }

    #[test]
    fn two_dim_block() {
        let s = 0.5_f64.sqrt();
        let m = unit(&[s, s, 0.0, 0.0]).matrix();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r < 2 && c < 2 { 0.5 } else { 0.0 };
                assert!((m[(r, c)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            rank_one_from_vector(&[0.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(rank_one_from_vector::<f64>(&[]).is_err());
    }

    #[test]
    fn complex_phase_invariance() {
        let v = [
            Complex64::new(0.2, 0.7),
            Complex64::new(-1.0, 0.1),
            Complex64::new(0.0, -0.4),
        ];
        let x = rank_one_from_vector(&v).unwrap();
        let rotated = x.vector().rotate_phase(Complex64::from_polar(1.0, 1.234)).unwrap();
        let y = RankOneProjection::from_unit(rotated);
        assert!(max_abs_diff(&x.matrix(), &y.matrix()) < 1e-12);
        assert!((x.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_examples() {
        let zero = HermitianMatrix::new(DMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(operator_norm(&zero), 0.0);

        let p = OrthogonalProjection::<f64>::identity(4);
        let h = HermitianMatrix::new(p.matrix().clone()).unwrap();
        assert!((operator_norm(&h) - 1.0).abs() < 1e-12);

        let s = 0.5_f64.sqrt();
        let x = unit(&[1.0, 0.0, 0.0]);
        let y = unit(&[s, s, 0.0]);
        let d = HermitianMatrix::new(x.matrix() - y.matrix()).unwrap();
        assert!((operator_norm(&d) - 0.707_106_781_186_547_5).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(operator_norm_checked(&m).is_err());
    }

    #[test]
    fn distance_examples() {
        let x = unit(&[1.0, 0.0, 0.0]);
        assert_eq!(rank_one_distance(&x, &x).unwrap(), 0.0);
        let y = unit(&[0.0, 1.0, 0.0]);
        assert!((rank_one_distance(&x, &y).unwrap() - 1.0).abs() < 1e-15);

        let t = std::f64::consts::FRAC_PI_6;
        let z = unit(&[t.cos(), t.sin(), 0.0]);
        let d = rank_one_distance(&x, &z).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let diff = HermitianMatrix::new(x.matrix() - z.matrix()).unwrap();
        assert!((operator_norm(&diff) - 0.5).abs() < 1e-12);

        let w = unit(&[1.0, 0.0]);
        assert!(rank_one_distance(&x, &w).is_err());
    }

    #[test]
    fn difference_decomposition_reconstructs() {
        let x = unit(&[1.0, 0.5, -0.2, 0.1]);
        let y = unit(&[0.3, -0.4, 0.9, 0.0]);
        let (s, a, b) = difference_decomposition(&x, &y).unwrap();
        let recon = (a.matrix() - b.matrix()) * s;
        assert!(max_abs_diff(&recon, &(x.matrix() - y.matrix())) < 1e-12);
        assert!(a.overlap(&b).unwrap() < 1e-20);
        assert!((s - rank_one_distance(&x, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn projection_validation() {
        let x = unit(&[1.0, 1.0, 0.0]);
        let p = OrthogonalProjection::from_matrix(x.matrix()).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.complement().rank(), 2);
        let (idem, herm, tr) = p.complement().defects();
        assert!(idem < 1e-12 && herm < 1e-12 && tr < 1e-12);
        assert!(OrthogonalProjection::from_matrix(DMatrix::<f64>::identity(3, 3) * 2.0).is_err());
    }

    #[test]
    fn bitstring_text_round_trip() {
        let b: BitString = "0110\n".parse().unwrap();
        assert_eq!(b.bits(), &[false, true, true, false]);
        assert_eq!(b.to_line(), "0110\n");
        assert!("01a".parse::<BitString>().is_err());
        assert_eq!("".parse::<BitString>().unwrap().len(), 0);
    }

    #[test]
    fn sorted_eigen_descending() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0, 1.0]));
        let e = HermitianMatrix::new(m).unwrap().eigen();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0, 1.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }
}

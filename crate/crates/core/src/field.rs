//! Scalar fields. Every formula downstream is parameterized by
//! `beta = 1/2` over the reals and `beta = 1` over the complex numbers.

use std::fmt;
use std::str::FromStr;

use nalgebra::ComplexField;
use num_complex::Complex64;

use crate::error::Error;
use crate::sampler::GaussianSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    pub fn beta(self) -> f64 {
        match self {
            FieldKind::Real => 0.5,
            FieldKind::Complex => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(FieldKind::Real),
            "complex" | "c" => Ok(FieldKind::Complex),
            other => Err(Error::invalid(format!("unknown field `{other}`"))),
        }
    }
}

/// A scalar type usable as the field of vectors and projections.
///
/// Implemented for `f64` and `Complex64`; the real path never touches
/// complex arithmetic.
pub trait Scalar: ComplexField<RealField = f64> + Copy + fmt::Debug + Send + Sync + 'static {
    const FIELD: FieldKind;

    /// Standard Gaussian draw: N(0,1) for reals, independent N(0,1) real
    /// and imaginary parts for complex.
    fn gaussian(source: &mut GaussianSource) -> Self;

    /// Unimodular scalar `exp(i * theta)`; reals map to the sign of `cos(theta)`.
    fn unimodular(theta: f64) -> Self;
}

impl Scalar for f64 {
    const FIELD: FieldKind = FieldKind::Real;

    fn gaussian(source: &mut GaussianSource) -> Self {
        source.next()
    }

    fn unimodular(theta: f64) -> Self {
        if theta.cos() >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl Scalar for Complex64 {
    const FIELD: FieldKind = FieldKind::Complex;

    fn gaussian(source: &mut GaussianSource) -> Self {
        let re = source.next();
        let im = source.next();
        Complex64::new(re, im)
    }

    fn unimodular(theta: f64) -> Self {
        Complex64::from_polar(1.0, theta)
    }
}

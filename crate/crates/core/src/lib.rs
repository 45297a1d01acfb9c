//! One-bit phase retrieval from random half-dimensional subspace queries.
//!
//! A signal `x ∈ F^{2n}` (F = R or C) is observed only through bits
//! `b_j = [tr(P_j X) >= 1/2]`, where `X = xx*` and the `P_j` are
//! Haar-uniform rank-`n` projections. The rank-one projection `X` is
//! recovered as the principal eigenspace of
//! `Q̂ = (1/m) Σ_j (b_j P_j + (1 - b_j)(I - P_j))`.
//!
//! Modules:
//! - [`types`]: vectors, projections, Hermitian matrices, bit strings
//! - [`sampler`]: seeded Haar sampling
//! - [`measurement`]: the measurement map and Hamming geometry
//! - [`recovery`]: empirical average and principal-eigenspace recovery
//! - [`theory`]: closed-form constants and sample-complexity formulas
//! - [`experiments`]: seeded Monte Carlo harness, CSV output, CLI plumbing

pub mod error;
pub mod experiments;
pub mod field;
pub mod measurement;
pub mod recovery;
pub mod sampler;
pub mod special;
pub mod stats;
pub mod theory;
pub mod types;

pub use error::{Error, Result};
pub use field::{FieldKind, Scalar};
pub use num_complex::Complex64;
pub use measurement::{
    binary_question, corrupt_bits, hamming_distance, measure, measurement_hamming,
    measurement_traces, separates, soft_hamming, t_separates, FlipMode,
};
pub use recovery::{
    empirical_average, expected_average, flipped_projection, measure_and_average, pep_recover,
    principal_eigenpair, RecoveryResult,
};
pub use sampler::{
    sample_ensemble, sample_haar_projection, sample_unit_vector, MeasurementEnsemble,
    ProjectionSource, SeedStream, SeededEnsemble,
};
pub use theory::TheoryConstants;
pub use types::{
    operator_norm, rank_one_distance, rank_one_from_vector, BitString, HermitianMatrix,
    OrthogonalProjection, RankOneProjection, UnitVector,
};

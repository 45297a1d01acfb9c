//! C ABI for `bitretrieve`.
//!
//! Objects cross the boundary as opaque handles (`BrSignal`, `BrEnsemble`,
//! `BrRecovery`) that must be released with their `*_free` function. Every
//! fallible call returns a [`BrStatus`]; on failure the message is
//! available from [`br_last_error`] on the same thread. Panics are caught
//! and reported as `BR_STATUS_PANIC`.
//!
//! Complex vectors are passed as interleaved `(re, im)` doubles, so a
//! complex signal of dimension `d` occupies `2d` doubles. Bits are one
//! byte each, `0` or `1`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use bitretrieve::theory::{
    dsep_probability, noisy_error_bound, pointwise_m, uniform_m, TheoryConstants,
};
use bitretrieve::{
    corrupt_bits, measure, measurement_traces, pep_recover, rank_one_distance, sample_ensemble,
    sample_unit_vector, BitString, Complex64, Error, FieldKind, FlipMode, MeasurementEnsemble,
    ProjectionSource, RankOneProjection, RecoveryResult, Scalar, SeedStream, UnitVector,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    Ok = 0,
    InvalidInput = 1,
    NullPointer = 2,
    Config = 3,
    Io = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrField {
    Real = 0,
    Complex = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrFlipMode {
    Random = 0,
    Greedy = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BrTheoryConstants {
    pub mu1: f64,
    pub mu2: f64,
    pub gap: f64,
    /// Nonzero when `gap_lower` and `gap_upper` are defined.
    pub has_gap_bounds: u8,
    pub gap_lower: f64,
    pub gap_upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BrRecoveryInfo {
    pub top_eigenvalue: f64,
    pub spectral_margin: f64,
    pub degenerate: u8,
}

enum Signal {
    Real(RankOneProjection<f64>),
    Complex(RankOneProjection<Complex64>),
}

/// A unit signal, stored as its rank-one projection.
pub struct BrSignal(Signal);

enum Ensemble {
    Real(MeasurementEnsemble<f64>),
    Complex(MeasurementEnsemble<Complex64>),
}

/// A materialized ensemble of measurement projections.
pub struct BrEnsemble(Ensemble);

enum Recovery {
    Real(RecoveryResult<f64>),
    Complex(RecoveryResult<Complex64>),
}

/// The outcome of a recovery.
pub struct BrRecovery(Recovery);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(BrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidInput(_) => BrStatus::InvalidInput,
            Error::Config { .. } => BrStatus::Config,
            Error::Io { .. } => BrStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(BrStatus::InvalidInput, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            BrStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(BrStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(BrStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail(BrStatus::NullPointer, format!("`{name}` is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail(BrStatus::NullPointer, format!("`{name}` is null")));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn field_of(f: BrField) -> FieldKind {
    match f {
        BrField::Real => FieldKind::Real,
        BrField::Complex => FieldKind::Complex,
    }
}

fn bits_from_bytes(bytes: &[u8]) -> Result<BitString, Fail> {
    bytes
        .iter()
        .enumerate()
        .map(|(j, &b)| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(invalid(format!("bit {j} is {other}, expected 0 or 1"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BitString::new)
}

fn write_bits(bits: &BitString, out: &mut [u8]) {
    for (o, &b) in out.iter_mut().zip(bits.bits()) {
        *o = u8::from(b);
    }
}

fn expect_len(got: usize, want: usize, name: &str) -> Result<(), Fail> {
    if got != want {
        return Err(invalid(format!("`{name}` has length {got}, expected {want}")));
    }
    Ok(())
}

fn signal_entries<T: Scalar>(x: &RankOneProjection<T>, out: &mut [f64], interleaved: bool) {
    for (i, e) in x.vector().entries().iter().enumerate() {
        let c: Complex64 = Complex64::new(e.real(), e.imaginary());
        if interleaved {
            out[2 * i] = c.re;
            out[2 * i + 1] = c.im;
        } else {
            out[i] = c.re;
        }
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn br_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Normalizes `data` into a signal on `F^dim`. `data` holds `dim` doubles
/// (real) or `2 dim` interleaved doubles (complex).
///
/// # Safety
/// `data` must point to the stated number of doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_signal_from_vector(
    field: BrField,
    data: *const f64,
    dim: usize,
    out: *mut *mut BrSignal,
) -> BrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let sig = match field {
            BrField::Real => {
                let v = input(data, dim, "data")?;
                Signal::Real(RankOneProjection::from_unit(UnitVector::from_slice(v)?))
            }
            BrField::Complex => {
                let v = input(data, 2 * dim, "data")?;
                let z: Vec<Complex64> = v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
                Signal::Complex(RankOneProjection::from_unit(UnitVector::from_slice(&z)?))
            }
        };
        *out = Box::into_raw(Box::new(BrSignal(sig)));
        Ok(())
    })
}

/// Uniformly random signal on `F^{2n}` drawn from seed stream
/// `(seed, path)`.
///
/// # Safety
/// `path` must point to `path_len` integers (may be null when 0); `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_signal_random(
    field: BrField,
    n: usize,
    seed: u64,
    path: *const u64,
    path_len: usize,
    out: *mut *mut BrSignal,
) -> BrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stream = SeedStream::with_path(seed, input(path, path_len, "path")?);
        let sig = match field {
            BrField::Real => Signal::Real(RankOneProjection::from_unit(sample_unit_vector(2 * n, &stream)?)),
            BrField::Complex => {
                Signal::Complex(RankOneProjection::from_unit(sample_unit_vector(2 * n, &stream)?))
            }
        };
        *out = Box::into_raw(Box::new(BrSignal(sig)));
        Ok(())
    })
}

/// # Safety
/// `sig` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_signal_free(sig: *mut BrSignal) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// # Safety
/// `sig` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_signal_dim(sig: *const BrSignal, out: *mut usize) -> BrStatus {
    guard(|| {
        let sig = nonnull(sig, "sig")?;
        *out_ref(out, "out")? = match &sig.0 {
            Signal::Real(x) => x.dim(),
            Signal::Complex(x) => x.dim(),
        };
        Ok(())
    })
}

/// # Safety
/// `sig` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_signal_field(sig: *const BrSignal, out: *mut BrField) -> BrStatus {
    guard(|| {
        let sig = nonnull(sig, "sig")?;
        *out_ref(out, "out")? = match &sig.0 {
            Signal::Real(_) => BrField::Real,
            Signal::Complex(_) => BrField::Complex,
        };
        Ok(())
    })
}

/// Copies the unit representative into `out`: `dim` doubles for a real
/// signal, `2 dim` interleaved doubles for a complex one.
///
/// # Safety
/// `sig` must be valid; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn br_signal_vector(sig: *const BrSignal, out: *mut f64, len: usize) -> BrStatus {
    guard(|| {
        let sig = nonnull(sig, "sig")?;
        match &sig.0 {
            Signal::Real(x) => {
                expect_len(len, x.dim(), "out")?;
                signal_entries(x, output(out, len, "out")?, false);
            }
            Signal::Complex(x) => {
                expect_len(len, 2 * x.dim(), "out")?;
                signal_entries(x, output(out, len, "out")?, true);
            }
        }
        Ok(())
    })
}

/// Operator-norm distance `‖X - Y‖ = sqrt(1 - |<x, y>|^2)`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_signal_distance(
    a: *const BrSignal,
    b: *const BrSignal,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        let (a, b) = (nonnull(a, "a")?, nonnull(b, "b")?);
        *out_ref(out, "out")? = match (&a.0, &b.0) {
            (Signal::Real(x), Signal::Real(y)) => rank_one_distance(x, y)?,
            (Signal::Complex(x), Signal::Complex(y)) => rank_one_distance(x, y)?,
            _ => return Err(invalid("signals belong to different fields")),
        };
        Ok(())
    })
}

/// `m` Haar-random rank-`n` projections on `F^{2n}`; element `j` uses the
/// seed stream `(seed, path ++ [j])`.
///
/// # Safety
/// `path` must point to `path_len` integers (may be null when 0); `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_ensemble_sample(
    field: BrField,
    n: usize,
    m: usize,
    seed: u64,
    path: *const u64,
    path_len: usize,
    out: *mut *mut BrEnsemble,
) -> BrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stream = SeedStream::with_path(seed, input(path, path_len, "path")?);
        let ens = match field {
            BrField::Real => Ensemble::Real(sample_ensemble(n, m, &stream)?),
            BrField::Complex => Ensemble::Complex(sample_ensemble(n, m, &stream)?),
        };
        *out = Box::into_raw(Box::new(BrEnsemble(ens)));
        Ok(())
    })
}

/// # Safety
/// `ens` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_ensemble_free(ens: *mut BrEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// # Safety
/// `ens` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_ensemble_len(ens: *const BrEnsemble, out: *mut usize) -> BrStatus {
    guard(|| {
        let ens = nonnull(ens, "ens")?;
        *out_ref(out, "out")? = match &ens.0 {
            Ensemble::Real(e) => e.len(),
            Ensemble::Complex(e) => e.len(),
        };
        Ok(())
    })
}

/// Writes the `m` measurement bits of `sig` into `bits`.
///
/// # Safety
/// `ens`, `sig` must be valid; `bits` must point to `m` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn br_measure(
    ens: *const BrEnsemble,
    sig: *const BrSignal,
    bits: *mut u8,
    m: usize,
) -> BrStatus {
    guard(|| {
        let (ens, sig) = (nonnull(ens, "ens")?, nonnull(sig, "sig")?);
        let b = match (&ens.0, &sig.0) {
            (Ensemble::Real(e), Signal::Real(x)) => {
                expect_len(m, e.len(), "bits")?;
                measure(e, x)?
            }
            (Ensemble::Complex(e), Signal::Complex(x)) => {
                expect_len(m, e.len(), "bits")?;
                measure(e, x)?
            }
            _ => return Err(invalid("ensemble and signal belong to different fields")),
        };
        write_bits(&b, output(bits, m, "bits")?);
        Ok(())
    })
}

/// Writes `tr(P_j X)` for every ensemble element into `traces`.
///
/// # Safety
/// `ens`, `sig` must be valid; `traces` must point to `m` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn br_measurement_traces(
    ens: *const BrEnsemble,
    sig: *const BrSignal,
    traces: *mut f64,
    m: usize,
) -> BrStatus {
    guard(|| {
        let (ens, sig) = (nonnull(ens, "ens")?, nonnull(sig, "sig")?);
        let t = match (&ens.0, &sig.0) {
            (Ensemble::Real(e), Signal::Real(x)) => {
                expect_len(m, e.len(), "traces")?;
                measurement_traces(e, x)?
            }
            (Ensemble::Complex(e), Signal::Complex(x)) => {
                expect_len(m, e.len(), "traces")?;
                measurement_traces(e, x)?
            }
            _ => return Err(invalid("ensemble and signal belong to different fields")),
        };
        output(traces, m, "traces")?.copy_from_slice(&t);
        Ok(())
    })
}

/// Normalized Hamming distance between two bit arrays.
///
/// # Safety
/// `a` and `b` must point to `len` bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_hamming(a: *const u8, b: *const u8, len: usize, out: *mut f64) -> BrStatus {
    guard(|| {
        let a = bits_from_bytes(input(a, len, "a")?)?;
        let b = bits_from_bytes(input(b, len, "b")?)?;
        *out_ref(out, "out")? = bitretrieve::hamming_distance(&a, &b)?;
        Ok(())
    })
}

/// Flips exactly `floor(tau m)` bits. Random mode draws positions from
/// `(seed, path)`; greedy mode needs the measurement traces.
///
/// # Safety
/// `bits` and `out` must point to `m` bytes; `traces` is null or points to
/// `m` doubles; `path` points to `path_len` integers (may be null when 0).
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn br_corrupt_bits(
    bits: *const u8,
    m: usize,
    tau: f64,
    mode: BrFlipMode,
    seed: u64,
    path: *const u64,
    path_len: usize,
    traces: *const f64,
    out: *mut u8,
) -> BrStatus {
    guard(|| {
        let b = bits_from_bytes(input(bits, m, "bits")?)?;
        let traces = if traces.is_null() { None } else { Some(input(traces, m, "traces")?) };
        let mode = match mode {
            BrFlipMode::Random => FlipMode::Random,
            BrFlipMode::Greedy => FlipMode::Greedy,
        };
        let stream = SeedStream::with_path(seed, input(path, path_len, "path")?);
        let flipped = corrupt_bits(&b, tau, mode, &stream, traces)?;
        write_bits(&flipped, output(out, m, "out")?);
        Ok(())
    })
}

/// Principal-eigenspace recovery from an ensemble and its bits.
///
/// # Safety
/// `ens` must be valid; `bits` must point to `m` bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_recover(
    ens: *const BrEnsemble,
    bits: *const u8,
    m: usize,
    out: *mut *mut BrRecovery,
) -> BrStatus {
    guard(|| {
        let ens = nonnull(ens, "ens")?;
        let out = out_ref(out, "out")?;
        let b = bits_from_bytes(input(bits, m, "bits")?)?;
        let rec = match &ens.0 {
            Ensemble::Real(e) => Recovery::Real(pep_recover(e, &b)?),
            Ensemble::Complex(e) => Recovery::Complex(pep_recover(e, &b)?),
        };
        *out = Box::into_raw(Box::new(BrRecovery(rec)));
        Ok(())
    })
}

/// # Safety
/// `rec` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_recovery_free(rec: *mut BrRecovery) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// # Safety
/// `rec` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_recovery_info(rec: *const BrRecovery, out: *mut BrRecoveryInfo) -> BrStatus {
    guard(|| {
        let rec = nonnull(rec, "rec")?;
        let (v, margin, deg) = match &rec.0 {
            Recovery::Real(r) => (r.top_eigenvalue, r.spectral_margin, r.degenerate),
            Recovery::Complex(r) => (r.top_eigenvalue, r.spectral_margin, r.degenerate),
        };
        *out_ref(out, "out")? = BrRecoveryInfo {
            top_eigenvalue: v,
            spectral_margin: margin,
            degenerate: u8::from(deg),
        };
        Ok(())
    })
}

/// New signal handle holding the estimate; free it separately.
///
/// # Safety
/// `rec` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_recovery_estimate(rec: *const BrRecovery, out: *mut *mut BrSignal) -> BrStatus {
    guard(|| {
        let rec = nonnull(rec, "rec")?;
        let out = out_ref(out, "out")?;
        let sig = match &rec.0 {
            Recovery::Real(r) => Signal::Real(r.estimate.clone()),
            Recovery::Complex(r) => Signal::Complex(r.estimate.clone()),
        };
        *out = Box::into_raw(Box::new(BrSignal(sig)));
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_theory_constants(field: BrField, n: usize, out: *mut BrTheoryConstants) -> BrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = TheoryConstants::new(field_of(field), n)?;
        *out = BrTheoryConstants {
            mu1: c.mu1,
            mu2: c.mu2,
            gap: c.gap,
            has_gap_bounds: u8::from(c.gap_lower.is_some()),
            gap_lower: c.gap_lower.unwrap_or(f64::NAN),
            gap_upper: c.gap_upper.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_pointwise_m(field: BrField, n: usize, delta: f64, d: f64, out: *mut u64) -> BrStatus {
    guard(|| {
        *out_ref(out, "out")? = pointwise_m(field_of(field), n, delta, d)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_uniform_m(field: BrField, n: usize, delta: f64, d: f64, out: *mut u64) -> BrStatus {
    guard(|| {
        *out_ref(out, "out")? = uniform_m(field_of(field), n, delta, d)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_noisy_error_bound(
    field: BrField,
    n: usize,
    delta: f64,
    tau: f64,
    out: *mut f64,
) -> BrStatus {
    guard(|| {
        *out_ref(out, "out")? = noisy_error_bound(field_of(field), n, delta, tau)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_dsep_probability(field: BrField, n: usize, out: *mut f64) -> BrStatus {
    guard(|| {
        *out_ref(out, "out")? = dsep_probability(field_of(field), n)?;
        Ok(())
    })
}

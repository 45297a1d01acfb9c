#ifndef BITRETRIEVE_H
#define BITRETRIEVE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BrStatus {
  BR_STATUS_OK = 0,
  BR_STATUS_INVALID_INPUT = 1,
  BR_STATUS_NULL_POINTER = 2,
  BR_STATUS_CONFIG = 3,
  BR_STATUS_IO = 4,
  BR_STATUS_PANIC = 5,
} BrStatus;

typedef enum BrField {
  BR_FIELD_REAL = 0,
  BR_FIELD_COMPLEX = 1,
} BrField;

typedef enum BrFlipMode {
  BR_FLIP_MODE_RANDOM = 0,
  BR_FLIP_MODE_GREEDY = 1,
} BrFlipMode;

// A materialized ensemble of measurement projections.
typedef struct BrEnsemble BrEnsemble;

// The outcome of a recovery.
typedef struct BrRecovery BrRecovery;

// A unit signal, stored as its rank-one projection.
typedef struct BrSignal BrSignal;

typedef struct BrRecoveryInfo {
  double top_eigenvalue;
  double spectral_margin;
  uint8_t degenerate;
} BrRecoveryInfo;

typedef struct BrTheoryConstants {
  double mu1;
  double mu2;
  double gap;
  // Nonzero when `gap_lower` and `gap_upper` are defined.
  uint8_t has_gap_bounds;
  double gap_lower;
  double gap_upper;
} BrTheoryConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *br_last_error(void);

// Normalizes `data` into a signal on `F^dim`. `data` holds `dim` doubles
// (real) or `2 dim` interleaved doubles (complex).
//
// # Safety
// `data` must point to the stated number of doubles; `out` must be valid.
enum BrStatus br_signal_from_vector(enum BrField field,
                                    const double *data,
                                    size_t dim,
                                    struct BrSignal **out);

// Uniformly random signal on `F^{2n}` drawn from seed stream
// `(seed, path)`.
//
// # Safety
// `path` must point to `path_len` integers (may be null when 0); `out`
// must be valid.
enum BrStatus br_signal_random(enum BrField field,
                               size_t n,
                               uint64_t seed,
                               const uint64_t *path,
                               size_t path_len,
                               struct BrSignal **out);

// # Safety
// `sig` must be null or a handle from this library not yet freed.
void br_signal_free(struct BrSignal *sig);

// # Safety
// `sig` and `out` must be valid.
enum BrStatus br_signal_dim(const struct BrSignal *sig, size_t *out);

// # Safety
// `sig` and `out` must be valid.
enum BrStatus br_signal_field(const struct BrSignal *sig, enum BrField *out);

// Copies the unit representative into `out`: `dim` doubles for a real
// signal, `2 dim` interleaved doubles for a complex one.
//
// # Safety
// `sig` must be valid; `out` must point to `len` writable doubles.
enum BrStatus br_signal_vector(const struct BrSignal *sig, double *out, size_t len);

// Operator-norm distance `‖X - Y‖ = sqrt(1 - |<x, y>|^2)`.
//
// # Safety
// All pointers must be valid.
enum BrStatus br_signal_distance(const struct BrSignal *a, const struct BrSignal *b, double *out);

// `m` Haar-random rank-`n` projections on `F^{2n}`; element `j` uses the
// seed stream `(seed, path ++ [j])`.
//
// # Safety
// `path` must point to `path_len` integers (may be null when 0); `out`
// must be valid.
enum BrStatus br_ensemble_sample(enum BrField field,
                                 size_t n,
                                 size_t m,
                                 uint64_t seed,
                                 const uint64_t *path,
                                 size_t path_len,
                                 struct BrEnsemble **out);

// # Safety
// `ens` must be null or a handle from this library not yet freed.
void br_ensemble_free(struct BrEnsemble *ens);

// # Safety
// `ens` and `out` must be valid.
enum BrStatus br_ensemble_len(const struct BrEnsemble *ens, size_t *out);

// Writes the `m` measurement bits of `sig` into `bits`.
//
// # Safety
// `ens`, `sig` must be valid; `bits` must point to `m` writable bytes.
enum BrStatus br_measure(const struct BrEnsemble *ens,
                         const struct BrSignal *sig,
                         uint8_t *bits,
                         size_t m);

// Writes `tr(P_j X)` for every ensemble element into `traces`.
//
// # Safety
// `ens`, `sig` must be valid; `traces` must point to `m` writable doubles.
enum BrStatus br_measurement_traces(const struct BrEnsemble *ens,
                                    const struct BrSignal *sig,
                                    double *traces,
                                    size_t m);

// Normalized Hamming distance between two bit arrays.
//
// # Safety
// `a` and `b` must point to `len` bytes; `out` must be valid.
enum BrStatus br_hamming(const uint8_t *a, const uint8_t *b, size_t len, double *out);

// Flips exactly `floor(tau m)` bits. Random mode draws positions from
// `(seed, path)`; greedy mode needs the measurement traces.
//
// # Safety
// `bits` and `out` must point to `m` bytes; `traces` is null or points to
// `m` doubles; `path` points to `path_len` integers (may be null when 0).
enum BrStatus br_corrupt_bits(const uint8_t *bits,
                              size_t m,
                              double tau,
                              enum BrFlipMode mode,
                              uint64_t seed,
                              const uint64_t *path,
                              size_t path_len,
                              const double *traces,
                              uint8_t *out);

// Principal-eigenspace recovery from an ensemble and its bits.
//
// # Safety
// `ens` must be valid; `bits` must point to `m` bytes; `out` must be valid.
enum BrStatus br_recover(const struct BrEnsemble *ens,
                         const uint8_t *bits,
                         size_t m,
                         struct BrRecovery **out);

// # Safety
// `rec` must be null or a handle from this library not yet freed.
void br_recovery_free(struct BrRecovery *rec);

// # Safety
// `rec` and `out` must be valid.
enum BrStatus br_recovery_info(const struct BrRecovery *rec, struct BrRecoveryInfo *out);

// New signal handle holding the estimate; free it separately.
//
// # Safety
// `rec` and `out` must be valid.
enum BrStatus br_recovery_estimate(const struct BrRecovery *rec, struct BrSignal **out);

// # Safety
// `out` must be valid.
enum BrStatus br_theory_constants(enum BrField field, size_t n, struct BrTheoryConstants *out);

// # Safety
// `out` must be valid.
enum BrStatus br_pointwise_m(enum BrField field, size_t n, double delta, double d, uint64_t *out);

// # Safety
// `out` must be valid.
enum BrStatus br_uniform_m(enum BrField field, size_t n, double delta, double d, uint64_t *out);

// # Safety
// `out` must be valid.
enum BrStatus br_noisy_error_bound(enum BrField field,
                                   size_t n,
                                   double delta,
                                   double tau,
                                   double *out);

// # Safety
// `out` must be valid.
enum BrStatus br_dsep_probability(enum BrField field, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BITRETRIEVE_H */

#ifndef KHESSIAN_H
#define KHESSIAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum KhStatus {
  KH_STATUS_OK = 0,
  KH_STATUS_DOMAIN = 1,
  KH_STATUS_EVALUATION = 2,
  KH_STATUS_CONSTRUCTION = 3,
  KH_STATUS_QUADRATURE = 4,
  KH_STATUS_PARSE = 5,
  KH_STATUS_IO = 6,
  KH_STATUS_NULL_POINTER = 7,
  KH_STATUS_PANIC = 8,
} KhStatus;

/**
 * Norm estimators accepted by [`kh_besov_norm`].
 */
typedef enum KhNormMethod {
  KH_NORM_METHOD_GAGLIARDO = 0,
  KH_NORM_METHOD_DYADIC = 1,
} KhNormMethod;

/**
 * Opaque sampled field.
 */
typedef struct KhGridField KhGridField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *kh_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kh_version(void);

/**
 * Builds a field from row-major samples (last axis fastest).
 *
 * # Safety
 * `lower`, `upper` and `points` must hold `dim` entries and `samples`
 * `len` entries; `out` must be writable.
 */
enum KhStatus kh_field_new(uintptr_t dim,
                           const double *lower,
                           const double *upper,
                           const uintptr_t *points,
                           bool periodic,
                           const double *samples,
                           uintptr_t len,
                           struct KhGridField **out);

/**
 * Reads a field from the library's text format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum KhStatus kh_field_read(const char *path, struct KhGridField **out);

/**
 * Releases a field. Null is ignored.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void kh_field_free(struct KhGridField *field);

/**
 * Number of samples, or 0 for null.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uintptr_t kh_field_len(const struct KhGridField *field);

/**
 * Copies the samples into `buf`, which must hold [`kh_field_len`] values.
 *
 * # Safety
 * `buf` must be writable for `len` values.
 */
enum KhStatus kh_field_samples(const struct KhGridField *field, double *buf, uintptr_t len);

/**
 * `int F_k[u] phi dx` on the shared grid.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum KhStatus kh_pair_direct(const struct KhGridField *u,
                             uintptr_t k,
                             const struct KhGridField *phi,
                             double *out);

/**
 * Total Besov norm `||u||_{s,p}`. `budget` and `seed` only affect the
 * Gagliardo estimator.
 *
 * # Safety
 * `u` must be live; `out` writable.
 */
enum KhStatus kh_besov_norm(const struct KhGridField *u,
                            double s,
                            double p,
                            enum KhNormMethod method,
                            uintptr_t budget,
                            uint64_t seed,
                            double *out);

/**
 * Sum of the principal `k x k` minors of a row-major `dim x dim` matrix.
 *
 * # Safety
 * `matrix` must hold `dim * dim` values; `out` writable.
 */
enum KhStatus kh_k_trace(const double *matrix, uintptr_t dim, uintptr_t k, double *out);

/**
 * Whether `B(s, p)` embeds in `B_loc(2 - 2/k, k)` in dimension `n`.
 *
 * # Safety
 * `holds` must be writable.
 */
enum KhStatus kh_embedding_holds(double s, double p, uintptr_t k, uintptr_t n, bool *holds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KHESSIAN_H */

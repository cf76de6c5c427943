#ifndef QDT_H
#define QDT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum QdtStatus {
  QDT_STATUS_OK = 0,
  QDT_STATUS_NULL_POINTER = 1,
  QDT_STATUS_INVALID_ARGUMENT = 2,
  QDT_STATUS_IO = 3,
  QDT_STATUS_PARSE = 4,
  QDT_STATUS_VALIDATION = 5,
  QDT_STATUS_DEGENERATE_WEIGHTS = 6,
  QDT_STATUS_INVARIANT = 7,
  QDT_STATUS_PANIC = 8,
} QdtStatus;

/**
 * Opaque fan handle.
 */
typedef struct QdtFan QdtFan;

/**
 * Opaque power series handle; coefficients are exact rationals.
 */
typedef struct QdtSeries QdtSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qdt_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on this thread.
 */
const char *qdt_last_error(void);

/**
 * Parses a fan from JSON text (`{"rays": [...], "cones": [...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QdtStatus qdt_fan_from_json(const char *json, struct QdtFan **out);

/**
 * Reads a fan file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QdtStatus qdt_fan_from_file(const char *path, struct QdtFan **out);

/**
 * The eight-octant fan of `(P^1)^3`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QdtStatus qdt_fan_octants(struct QdtFan **out);

/**
 * Releases a fan; null is ignored.
 *
 * # Safety
 * `fan` must come from this library and not be used afterwards.
 */
void qdt_fan_free(struct QdtFan *fan);

/**
 * Ray and cone counts.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_fan_size(const struct QdtFan *fan, uintptr_t *rays, uintptr_t *cones);

/**
 * Structural validation and orientation criterion. Both flags are written
 * even when they are false; the status is `Ok` unless arguments are bad.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_fan_check(const struct QdtFan *fan, bool *valid, bool *oriented);

/**
 * Number of sigma-orbits of maximal cones.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_fan_orbit_count(const struct QdtFan *fan, uintptr_t *out);

/**
 * Star subdivision of both cones of orbit `orbit`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_fan_blowup(const struct QdtFan *fan, uintptr_t orbit, struct QdtFan **out);

/**
 * JSON rendering of a fan; free with [`qdt_string_free`].
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_fan_to_json(const struct QdtFan *fan, char **out);

/**
 * Smallest generic embedding `(a, b, c)` through `max_colength`.
 *
 * # Safety
 * `out` must point to three writable `int64_t`.
 */
enum QdtStatus qdt_select_weights(const struct QdtFan *fan, uintptr_t max_colength, int64_t *out);

/**
 * Quadratic DT series through `q^max_order`. `params` is null for automatic
 * selection or points to three odd integers.
 *
 * # Safety
 * All non-null pointers must be valid.
 */
enum QdtStatus qdt_quadratic_series(const struct QdtFan *fan,
                                    const int64_t *params,
                                    uintptr_t max_order,
                                    struct QdtSeries **out);

/**
 * Bott residue of `deg c3(T (x) K)` as a rational string; free with
 * [`qdt_string_free`]. `params` as for [`qdt_quadratic_series`].
 *
 * # Safety
 * All non-null pointers must be valid.
 */
enum QdtStatus qdt_bott_residue(const struct QdtFan *fan, const int64_t *params, char **out);

/**
 * Quadratic vertex measure at admissible weights `s`; `max_order` even.
 *
 * # Safety
 * `s` must point to three `int64_t`; `out` must be valid.
 */
enum QdtStatus qdt_vertex_quadratic(const int64_t *s, uintptr_t max_order, struct QdtSeries **out);

/**
 * Classical vertex measure at weights `s`.
 *
 * # Safety
 * `s` must point to three `int64_t`; `out` must be valid.
 */
enum QdtStatus qdt_vertex_classical(const int64_t *s, uintptr_t max_order, struct QdtSeries **out);

/**
 * Releases a series; null is ignored.
 *
 * # Safety
 * `series` must come from this library and not be used afterwards.
 */
void qdt_series_free(struct QdtSeries *series);

/**
 * Number of stored coefficients (`max_order + 1`); 0 for null.
 *
 * # Safety
 * `series` must be null or valid.
 */
uintptr_t qdt_series_len(const struct QdtSeries *series);

/**
 * Coefficient of `q^n` as `"num/den"` or a bare integer; free with
 * [`qdt_string_free`].
 *
 * # Safety
 * All pointers must be valid.
 */
enum QdtStatus qdt_series_coefficient(const struct QdtSeries *series, uintptr_t n, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void qdt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDT_H */

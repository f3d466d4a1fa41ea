#ifndef RSC_FIXPOINT_H
#define RSC_FIXPOINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum RscStatus {
  RSC_STATUS_OK = 0,
  RSC_STATUS_NULL_POINTER = 1,
  RSC_STATUS_INVALID_UTF8 = 2,
  RSC_STATUS_INPUT = 3,
  RSC_STATUS_PARSE = 4,
  RSC_STATUS_DIMENSION = 5,
  RSC_STATUS_OUTSIDE_DOMAIN = 6,
  RSC_STATUS_NOT_FIXED = 7,
  RSC_STATUS_IO = 8,
  RSC_STATUS_INTERNAL = 9,
  RSC_STATUS_PANIC = 10,
} RscStatus;

/**
 * Why an iteration stopped.
 */
typedef enum RscStopReason {
  RSC_STOP_REASON_RESIDUAL_TOL = 0,
  RSC_STOP_REASON_MAX_ITER = 1,
} RscStopReason;

/**
 * Opaque mapping handle.
 */
typedef struct RscMapping RscMapping;

/**
 * Opaque iteration trace handle.
 */
typedef struct RscTrace RscTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *rsc_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, freed once.
 */
void rsc_string_free(char *s);

/**
 * Parses a piecewise-affine mapping from DSL text.
 *
 * # Safety
 * `name` and `source` must be NUL-terminated strings; `out` must be writable.
 */
enum RscStatus rsc_mapping_from_dsl(const char *name, const char *source, struct RscMapping **out);

/**
 * Instantiates a gallery entry; `n_params == 0` selects its defaults.
 *
 * # Safety
 * `id` must be a NUL-terminated string, `params` must point to `n_params`
 * doubles, and `out` must be writable.
 */
enum RscStatus rsc_mapping_from_gallery(const char *id,
                                        const double *params,
                                        size_t n_params,
                                        struct RscMapping **out);

/**
 * Loads `gallery:<id>[:params]` or a DSL file path.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum RscStatus rsc_mapping_load(const char *source, struct RscMapping **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, freed once.
 */
void rsc_mapping_free(struct RscMapping *m);

/**
 * Dimension of the mapping's domain, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rsc_mapping_dim(const struct RscMapping *m);

/**
 * Switches the norm to lp; pass `INFINITY` for the max norm.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum RscStatus rsc_mapping_set_norm(struct RscMapping *m, double p);

/**
 * Writes `Tx` to `out` (both of length `dim`).
 *
 * # Safety
 * `x` and `out` must point to `dim` doubles.
 */
enum RscStatus rsc_mapping_evaluate(const struct RscMapping *m,
                                    const double *x,
                                    size_t dim,
                                    double *out);

/**
 * Runs every classifier and returns the reports as a JSON array.
 *
 * `pairs == 0` sweeps all ordered grid pairs; otherwise `pairs` random pairs
 * are drawn with `seed`.
 *
 * # Safety
 * `m` must be a live handle; `out_json` must be writable.
 */
enum RscStatus rsc_classify_json(const struct RscMapping *m,
                                 size_t grid,
                                 size_t pairs,
                                 uint64_t seed,
                                 double rel_tol,
                                 double abs_tol,
                                 char **out_json);

/**
 * Runs the Krasnoselskii-Mann iteration from `x1` (length `dim`).
 *
 * `alpha` must lie in `[1/2, 1)`.
 *
 * # Safety
 * `m` must be a live handle, `x1` must point to `dim` doubles, and `out`
 * must be writable.
 */
enum RscStatus rsc_run_iteration(const struct RscMapping *m,
                                 double alpha,
                                 const double *x1,
                                 size_t dim,
                                 size_t max_iter,
                                 double residual_tol,
                                 struct RscTrace **out);

/**
 * # Safety
 * `t` must be null or a handle from this library, freed once.
 */
void rsc_trace_free(struct RscTrace *t);

/**
 * Number of recorded rows, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t rsc_trace_len(const struct RscTrace *t);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
size_t rsc_trace_dim(const struct RscTrace *t);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum RscStatus rsc_trace_stop_reason(const struct RscTrace *t, enum RscStopReason *out);

/**
 * Row `row` of the trace: its iterate index `n`, `x_n` (written to `x`,
 * length `dim`) and the residual `‖T x_n - x_n‖`. Any output may be null.
 *
 * # Safety
 * `t` must be a live handle; non-null outputs must be writable, `x` for
 * `dim` doubles.
 */
enum RscStatus rsc_trace_row(const struct RscTrace *t,
                             size_t row,
                             size_t *n,
                             double *x,
                             size_t dim,
                             double *residual);

/**
 * Estimates the modulus of convexity of lp(R^dim) at `epsilon`.
 *
 * # Safety
 * `delta_out` must be writable; `uniformly_convex_out` may be null.
 */
enum RscStatus rsc_estimate_modulus(double p,
                                    size_t dim,
                                    double epsilon,
                                    size_t samples,
                                    uint64_t seed,
                                    double *delta_out,
                                    bool *uniformly_convex_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSC_FIXPOINT_H */

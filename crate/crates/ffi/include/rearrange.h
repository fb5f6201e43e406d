#ifndef REARRANGE_H
#define REARRANGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RrStatus {
  RR_STATUS_OK = 0,
  RR_STATUS_NULL_POINTER = 1,
  RR_STATUS_INVALID_UTF8 = 2,
  RR_STATUS_PARSE = 3,
  RR_STATUS_DOMAIN = 4,
  RR_STATUS_ARGUMENT = 5,
  RR_STATUS_UNDEFINED = 6,
  RR_STATUS_INFINITE_LEVEL_SET = 7,
  RR_STATUS_NUMERIC = 8,
  RR_STATUS_PANIC = 9,
} RrStatus;

/**
 * Opaque handle: a validated instance with its maximal-function tables.
 */
typedef struct RrInstance RrInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance file (`{"measure": ..., "function": ..., "metadata": ...}`)
 * and stores a new handle in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RrStatus rr_instance_from_json(const char *json, struct RrInstance **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from [`rr_instance_from_json`] not yet freed.
 */
void rr_instance_free(struct RrInstance *h);

/**
 * `M_μ f(x)` as an exact rational string.
 *
 * # Safety
 * `h` a live handle, `x` a NUL-terminated string, `out` writable.
 */
enum RrStatus rr_maximal_at(const struct RrInstance *h, const char *x, char **out);

/**
 * `M_μ f(x)` for a float `x` (converted exactly), as a float.
 *
 * # Safety
 * `h` a live handle, `out` writable.
 */
enum RrStatus rr_maximal_at_f64(const struct RrInstance *h, double x, double *out);

/**
 * `{"lambda", "set", "measure"}` for `E_λ = {M_μ f > λ}` as JSON.
 *
 * # Safety
 * `h` a live handle, `lambda` a NUL-terminated string, `out` writable.
 */
enum RrStatus rr_superlevel_json(const struct RrInstance *h, const char *lambda, char **out);

/**
 * The rearrangement `f*` as step-function JSON.
 *
 * # Safety
 * `h` a live handle, `out` writable.
 */
enum RrStatus rr_rearrange_json(const struct RrInstance *h, char **out);

/**
 * Weak-L^p norms of `M_μ f` and of `f`, each as value and error bound.
 *
 * # Safety
 * `h` a live handle, `p` a NUL-terminated string, `out` an array of 4 writable doubles:
 * maximal value, maximal error bound, function value, function error bound.
 */
enum RrStatus rr_weak_norms(const struct RrInstance *h, const char *p, double *out);

/**
 * Certified bracket `[low, high]` of width at most `tol` around `C_p`.
 *
 * # Safety
 * `p` and `tol` NUL-terminated strings, `low` and `high` writable.
 */
enum RrStatus rr_cp_constant(const char *p, const char *tol, double *low, double *high);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *rr_last_error_message(void);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void rr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REARRANGE_H */

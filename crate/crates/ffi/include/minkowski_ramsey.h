#ifndef MINKOWSKI_RAMSEY_H
#define MINKOWSKI_RAMSEY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MrStatus {
  MR_STATUS_OK = 0,
  MR_STATUS_NULL_ARGUMENT = 1,
  MR_STATUS_INVALID_UTF8 = 2,
  // The library rejected the input; see the last error.
  MR_STATUS_DOMAIN_ERROR = 3,
  MR_STATUS_PANIC = 4,
} MrStatus;

// Opaque norm handle.
typedef struct MrNorm MrNorm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Kind of the last error on this thread (e.g. `"PreconditionViolated"`),
// or null. Valid until the next failing call on the same thread.
const char *mr_last_error_kind(void);

// Message of the last error on this thread, or null.
const char *mr_last_error_message(void);

// Library version as a static string.
const char *mr_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void mr_string_free(char *s);

// Parses a norm from its JSON description.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum MrStatus mr_norm_from_json(const char *json, struct MrNorm **out);

// Polygonal norm from `count` vertices stored as `x0, y0, x1, y1, …`.
//
// # Safety
// `xy` must point to `2 * count` doubles; `out` must be writable.
enum MrStatus mr_norm_polygon(const double *xy, size_t count, struct MrNorm **out);

// ℓp norm, `1 <= p <= inf`.
//
// # Safety
// `out` must be writable.
enum MrStatus mr_norm_lp(double p, struct MrNorm **out);

// # Safety
// `norm` must be null or a handle from this library, not yet freed.
void mr_norm_free(struct MrNorm *norm);

// # Safety
// `norm` must be a live handle; `out` must be writable.
enum MrStatus mr_norm_eval(const struct MrNorm *norm, double x, double y, double *out);

// Smallest N-length of a side of the unit polygon.
//
// # Safety
// `norm` must be a live handle; `out` must be writable.
enum MrStatus mr_norm_min_side_length(const struct MrNorm *norm, double *out);

// Searches for a monochromatic copy of the first `prefix` points of `G(q)`
// under a built-in oracle and returns the certificate as JSON.
//
// # Safety
// `norm` must be a live handle, `oracle_name` a nul-terminated string and
// `cert_json` writable.
enum MrStatus mr_find_copy(const struct MrNorm *norm,
                           const char *oracle_name,
                           double q,
                           size_t prefix,
                           uint64_t seed,
                           char **cert_json);

// Checks the distances of a certificate against `G(q)` within `tol`.
// Colours are not rechecked.
//
// # Safety
// `cert_json` must be a nul-terminated string; `accepted` and
// `max_deviation` must be writable.
enum MrStatus mr_verify_copy(const char *cert_json,
                             double tol,
                             bool *accepted,
                             double *max_deviation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINKOWSKI_RAMSEY_H */

#ifndef WEIERSTRASS_H
#define WEIERSTRASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsFunction {
  WS_FUNCTION_WP = 0,
  WS_FUNCTION_WP1 = 1,
  WS_FUNCTION_ZETA = 2,
  WS_FUNCTION_E2 = 3,
  WS_FUNCTION_E4 = 4,
  WS_FUNCTION_E6 = 5,
  WS_FUNCTION_G2 = 6,
  WS_FUNCTION_G3 = 7,
  WS_FUNCTION_DELTA = 8,
} WsFunction;

/**
 * Result code of every call.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_UTF8 = 2,
  WS_STATUS_ZERO_ARGUMENT = 3,
  WS_STATUS_NOT_IN_UPPER_HALF_PLANE = 4,
  WS_STATUS_POLE_PROXIMITY = 5,
  WS_STATUS_CONVERGENCE_DOMAIN = 6,
  WS_STATUS_NON_TERMINATION = 7,
  WS_STATUS_DEGENERATE_CONFIGURATION = 8,
  WS_STATUS_NEAR_SINGULAR = 9,
  WS_STATUS_OVERFLOW = 10,
  WS_STATUS_INVALID_POLICY = 11,
  WS_STATUS_PARSE = 12,
  WS_STATUS_CONFIG = 13,
  WS_STATUS_BUFFER_TOO_SMALL = 14,
  WS_STATUS_PANIC = 99,
} WsStatus;

typedef enum WsVar {
  WS_VAR_Z = 0,
  WS_VAR_TAU = 1,
} WsVar;

/**
 * Opaque evaluation engine.
 */
typedef struct WsEngine WsEngine;

typedef struct WsComplex {
  double re;
  double im;
} WsComplex;

typedef struct WsValue {
  double re;
  double im;
  double est_error;
} WsValue;

/**
 * Reduction data: `γ = [[a, b], [c, d]]` with `γτ = τ*`, `z = s·(z* + m + nτ*)` with `s = cτ + d`.
 */
typedef struct WsReduction {
  int64_t a;
  int64_t b;
  int64_t c;
  int64_t d;
  struct WsComplex tau_star;
  int64_t m;
  int64_t n;
  struct WsComplex z_star;
  struct WsComplex scale;
} WsReduction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ws_last_error_message(void);

/**
 * Engine with the default tolerances and truncation.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WsStatus ws_engine_new(struct WsEngine **out);

/**
 * Engine configured from `key = value` text (the tolerance config format).
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WsStatus ws_engine_new_with_config(const char *config, struct WsEngine **out);

/**
 * Releases an engine; null is ignored.
 *
 * # Safety
 * `engine` must come from `ws_engine_new*` and not have been freed.
 */
void ws_engine_free(struct WsEngine *engine);

/**
 * Evaluates `func` at `(tau, z)`; `z` is ignored for the modular quantities.
 *
 * # Safety
 * `engine` must be a live handle and `out` a valid pointer.
 */
enum WsStatus ws_eval(const struct WsEngine *engine,
                      enum WsFunction func,
                      struct WsComplex tau,
                      struct WsComplex z,
                      struct WsValue *out);

/**
 * Reduces `tau` into the fundamental domain and `z` into the period cell.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WsStatus ws_reduce(struct WsComplex tau, struct WsComplex z, struct WsReduction *out);

/**
 * Derivative of the expression text `expr` in `var`, as text.
 *
 * # Safety
 * `expr` must be NUL-terminated; `out` must be valid. Free the result with
 * `ws_string_free`.
 */
enum WsStatus ws_diff(const char *expr, enum WsVar var, char **out);

/**
 * Runs the identity suite with the engine's tolerances. `all_passed` is set
 * to 1 or 0; `report_json`, if non-null, receives the JSON report.
 *
 * # Safety
 * `engine` must be live; `all_passed` valid; `report_json` null or valid.
 */
enum WsStatus ws_verify(const struct WsEngine *engine,
                        uint64_t seed,
                        int32_t *all_passed,
                        char **report_json);

/**
 * Integer q-coefficients `c_0 … c_order` of `E_weight` (`weight` ∈ {2, 4, 6}).
 * `out` must hold `order + 1` entries; `len` is its capacity.
 *
 * # Safety
 * `out` must point to `len` writable `int64_t`.
 */
enum WsStatus ws_eisenstein_coefficients(uint32_t weight, size_t order, int64_t *out, size_t len);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ws_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *ws_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEIERSTRASS_H */

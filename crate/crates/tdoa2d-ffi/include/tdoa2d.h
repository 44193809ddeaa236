#ifndef TDOA2D_H
#define TDOA2D_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Plane-point region relative to the curve.
 */
enum Tdoa2dPointRegion
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  TDOA2D_POINT_REGION_UNIQUE_REGION = 0,
  TDOA2D_POINT_REGION_AMBIGUOUS_REGION = 1,
  TDOA2D_POINT_REGION_ON_CURVE = 2,
};
#ifndef __cplusplus
typedef int32_t Tdoa2dPointRegion;
#endif // __cplusplus

/**
 * Call outcome; `Ok` is zero, every other value is an error.
 */
enum Tdoa2dStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  TDOA2D_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TDOA2D_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TDOA2D_STATUS_INVALID_UTF8 = 2,
  /**
   * The three receivers lie on one line.
   */
  TDOA2D_STATUS_COLLINEAR_RECEIVERS = 3,
  /**
   * A receiver-normalized quantity was requested at that receiver.
   */
  TDOA2D_STATUS_AT_RECEIVER = 4,
  /**
   * Projection onto the curve hit a vanishing gradient.
   */
  TDOA2D_STATUS_GRADIENT_VANISHES = 5,
  /**
   * A rational literal could not be parsed.
   */
  TDOA2D_STATUS_INVALID_RATIONAL = 6,
  /**
   * Structurally invalid input.
   */
  TDOA2D_STATUS_INVALID_INPUT = 7,
  /**
   * An internal panic was caught at the boundary.
   */
  TDOA2D_STATUS_PANICKED = 100,
};
#ifndef __cplusplus
typedef int32_t Tdoa2dStatus;
#endif // __cplusplus

/**
 * Measurement-pair region, mirroring the library classification.
 */
enum Tdoa2dTauRegion
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  TDOA2D_TAU_REGION_OUTSIDE_IMAGE = 0,
  TDOA2D_TAU_REGION_INTERIOR_UNIQUE = 1,
  TDOA2D_TAU_REGION_INTERIOR_AMBIGUOUS = 2,
  TDOA2D_TAU_REGION_ON_ELLIPSE = 3,
  TDOA2D_TAU_REGION_ON_POLYTOPE_BOUNDARY = 4,
  TDOA2D_TAU_REGION_EXCLUDED_TANGENCY = 5,
};
#ifndef __cplusplus
typedef int32_t Tdoa2dTauRegion;
#endif // __cplusplus

/**
 * Opaque receiver configuration handle.
 */
typedef struct Tdoa2dConfig Tdoa2dConfig;

/**
 * Opaque curve handle; owns the exact polynomial and its float mirror.
 */
typedef struct Tdoa2dCurve Tdoa2dCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static name for a status code; never null, unknown codes map to "unknown".
 */
const char *tdoa2d_error_name(int32_t code);

/**
 * # Safety
 * The six coordinate pointers must be NUL-terminated strings valid for the
 * duration of the call; `out` must be a valid writable pointer. On success
 * `*out` owns a handle that must be released with `tdoa2d_config_free`.
 */
Tdoa2dStatus tdoa2d_config_new_rational(const char *x0,
                                        const char *y0,
                                        const char *x1,
                                        const char *y1,
                                        const char *x2,
                                        const char *y2,
                                        struct Tdoa2dConfig **out);

/**
 * # Safety
 * `out` must be a valid writable pointer. On success `*out` owns a handle
 * that must be released with `tdoa2d_config_free`.
 */
Tdoa2dStatus tdoa2d_config_new_f64(double x0,
                                   double y0,
                                   double x1,
                                   double y1,
                                   double x2,
                                   double y2,
                                   struct Tdoa2dConfig **out);

/**
 * # Safety
 * `config` must be a pointer returned by a `tdoa2d_config_new_*` call, not
 * yet freed; null is a no-op.
 */
void tdoa2d_config_free(struct Tdoa2dConfig *config);

/**
 * # Safety
 * `config` must be a live configuration handle; `tau1` and `tau2` must be
 * valid writable pointers.
 */
Tdoa2dStatus tdoa2d_forward(const struct Tdoa2dConfig *config,
                            double x,
                            double y,
                            double *tau1,
                            double *tau2);

/**
 * # Safety
 * `config` must be a live configuration handle; `value` must be a valid
 * writable pointer.
 */
Tdoa2dStatus tdoa2d_ellipse_value(const struct Tdoa2dConfig *config,
                                  double tau1,
                                  double tau2,
                                  double *value);

/**
 * # Safety
 * `config` must be a live configuration handle; `region` and
 * `expected_count` must be valid writable pointers.
 */
Tdoa2dStatus tdoa2d_classify_tau(const struct Tdoa2dConfig *config,
                                 double tau1,
                                 double tau2,
                                 Tdoa2dTauRegion *region,
                                 uint8_t *expected_count);

/**
 * # Safety
 * `config` must be a live configuration handle. `positions` must point to at
 * least 4 writable doubles (x, y per source), `d0` to at least 2, and
 * `count` and `degenerate` must be valid writable pointers. Only the first
 * `*count` sources (at most 2) are written.
 */
Tdoa2dStatus tdoa2d_localize(const struct Tdoa2dConfig *config,
                             double tau1,
                             double tau2,
                             double *positions,
                             double *d0,
                             uint32_t *count,
                             bool *degenerate);

/**
 * # Safety
 * `config` must be a live configuration handle; `abc` must point to at least
 * 9 writable doubles, filled as (a, b, c) per asymptote line `a x + b y + c`.
 */
Tdoa2dStatus tdoa2d_asymptotes(const struct Tdoa2dConfig *config, double *abc);

/**
 * # Safety
 * `config` must be a live configuration handle; `out` must be a valid
 * writable pointer. On success `*out` owns a handle that must be released
 * with `tdoa2d_curve_free`.
 */
Tdoa2dStatus tdoa2d_curve_new(const struct Tdoa2dConfig *config, struct Tdoa2dCurve **out);

/**
 * # Safety
 * `curve` must be a pointer returned by `tdoa2d_curve_new`, not yet freed;
 * null is a no-op.
 */
void tdoa2d_curve_free(struct Tdoa2dCurve *curve);

/**
 * # Safety
 * `curve` must be a live curve handle; `value` must be a valid writable
 * pointer.
 */
Tdoa2dStatus tdoa2d_curve_eval(const struct Tdoa2dCurve *curve, double x, double y, double *value);

/**
 * # Safety
 * `curve` must be a live curve handle; `region` must be a valid writable
 * pointer.
 */
Tdoa2dStatus tdoa2d_curve_classify(const struct Tdoa2dCurve *curve,
                                   double x,
                                   double y,
                                   Tdoa2dPointRegion *region);

/**
 * # Safety
 * `curve` must be a live curve handle; `distance` must be a valid writable
 * pointer. Fails with `GradientVanishes` where the first-order distance is
 * undefined.
 */
Tdoa2dStatus tdoa2d_curve_sampson_distance(const struct Tdoa2dCurve *curve,
                                           double x,
                                           double y,
                                           double *distance);

/**
 * # Safety
 * `curve` must be a live curve handle; `out` must be a valid writable
 * pointer. On success `*out` owns a NUL-terminated JSON string that must be
 * released with `tdoa2d_string_free`.
 */
Tdoa2dStatus tdoa2d_curve_poly_json(const struct Tdoa2dCurve *curve, bool normalized, char **out);

/**
 * # Safety
 * `s` must be a string returned by this library, not yet freed; null is a
 * no-op.
 */
void tdoa2d_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TDOA2D_H */

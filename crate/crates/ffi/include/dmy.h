#ifndef DMY_H
#define DMY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum DmyStatus {
  DMY_STATUS_OK = 0,
  DMY_STATUS_INVALID_PARAMETER = 1,
  DMY_STATUS_NON_FINITE_INPUT = 2,
  DMY_STATUS_NUMERIC_OVERFLOW = 3,
  DMY_STATUS_SINGULAR_NEWTON = 4,
  DMY_STATUS_NO_CONVERGENCE = 5,
  DMY_STATUS_EPSILON_SEARCH_EXHAUSTED = 6,
  DMY_STATUS_NULL_POINTER = 7,
  DMY_STATUS_IO = 8,
  DMY_STATUS_INTERNAL = 9,
} DmyStatus;

/**
 * Opaque planar map.
 */
typedef struct DmyMap DmyMap;

/**
 * Opaque periodic orbit.
 */
typedef struct DmyOrbit DmyOrbit;

/**
 * Summary of a counterexample verification run.
 */
typedef struct DmyVerification {
  bool passed;
  uint32_t checks_passed;
  uint32_t checks_total;
  /**
   * The `a` finally used (halved when the period-4 search failed).
   */
  double a;
  double inner_radius;
  double c_used;
  double eps;
  double tail_radius;
  /**
   * Sampled spectral radius of `Df`.
   */
  double f_sr;
} DmyVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next failing call.
 */
const char *dmy_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dmy_version(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum DmyStatus dmy_map_szlenk(double k, struct DmyMap **out);

/**
 * `G_a = F - a·Id`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DmyStatus dmy_map_ga(double k, double a, struct DmyMap **out);

/**
 * Linear map `[[a11, a12], [a21, a22]]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DmyStatus dmy_map_linear(double a11, double a12, double a21, double a22, struct DmyMap **out);

/**
 * The counterexample `f = H ∘ G_a` built with default sampling.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DmyStatus dmy_map_counterexample(double k, double a, double eps, struct DmyMap **out);

/**
 * `outer ∘ inner`; both inputs stay owned by the caller.
 *
 * # Safety
 * `outer` and `inner` must be live handles and `out` valid for writes.
 */
enum DmyStatus dmy_map_compose(const struct DmyMap *outer,
                               const struct DmyMap *inner,
                               struct DmyMap **out);

/**
 * # Safety
 * `map` must be null or a handle not yet freed.
 */
void dmy_map_free(struct DmyMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out_x`, `out_y` valid for writes.
 */
enum DmyStatus dmy_map_eval(const struct DmyMap *map,
                            double x,
                            double y,
                            double *out_x,
                            double *out_y);

/**
 * Jacobian at `(x, y)`, written row-major to `out[0..4]`.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for 4 writes.
 */
enum DmyStatus dmy_map_jacobian(const struct DmyMap *map, double x, double y, double *out);

/**
 * Eigenvalues of `[[a11, a12], [a21, a22]]` as `re1, im1, re2, im2` in `out[0..4]`.
 *
 * # Safety
 * `out` must be valid for 4 writes.
 */
enum DmyStatus dmy_eig2(double a11, double a12, double a21, double a22, double *out);

double dmy_spectral_radius(double a11, double a12, double a21, double a22);

double dmy_operator_norm(double a11, double a12, double a21, double a22);

/**
 * Newton search for a period-`period` orbit from `(x, y)`.
 *
 * # Safety
 * `map` must be a live handle and `out` valid for writes.
 */
enum DmyStatus dmy_find_periodic(const struct DmyMap *map,
                                 uintptr_t period,
                                 double x,
                                 double y,
                                 double tol,
                                 uintptr_t max_steps,
                                 struct DmyOrbit **out);

/**
 * # Safety
 * `orbit` must be null or a handle not yet freed.
 */
void dmy_orbit_free(struct DmyOrbit *orbit);

/**
 * Period of the orbit, or 0 for a null handle.
 *
 * # Safety
 * `orbit` must be null or a live handle.
 */
uintptr_t dmy_orbit_period(const struct DmyOrbit *orbit);

/**
 * Closure residual `|f^n(p0) - p0|`, NaN for a null handle.
 *
 * # Safety
 * `orbit` must be null or a live handle.
 */
double dmy_orbit_residual(const struct DmyOrbit *orbit);

/**
 * # Safety
 * `orbit` must be null or a live handle.
 */
bool dmy_orbit_hyperbolic(const struct DmyOrbit *orbit);

/**
 * Point `index` of the orbit.
 *
 * # Safety
 * `orbit` must be a live handle; `out_x`, `out_y` valid for writes.
 */
enum DmyStatus dmy_orbit_point(const struct DmyOrbit *orbit,
                               uintptr_t index,
                               double *out_x,
                               double *out_y);

/**
 * Multipliers as `re1, im1, re2, im2` in `out[0..4]`.
 *
 * # Safety
 * `orbit` must be a live handle and `out` valid for 4 writes.
 */
enum DmyStatus dmy_orbit_multipliers(const struct DmyOrbit *orbit, double *out);

/**
 * Builds and verifies the counterexample. `report_json`, when not null,
 * receives the full report as a string to release with [`dmy_string_free`].
 *
 * # Safety
 * `out` must be valid for writes; `report_json` null or valid for writes.
 */
enum DmyStatus dmy_verify_counterexample(double k,
                                         double a,
                                         double eps,
                                         struct DmyVerification *out,
                                         char **report_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void dmy_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DMY_H */

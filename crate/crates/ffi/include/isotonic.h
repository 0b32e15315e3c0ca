#ifndef ISOTONIC_H
#define ISOTONIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  ISO_STATUS_OK = 0,
  ISO_STATUS_NULL_POINTER = 1,
  ISO_STATUS_DOMAIN = 2,
  ISO_STATUS_INDEX = 3,
  ISO_STATUS_NON_CONVERGENCE = 4,
  ISO_STATUS_TOLERANCE_NOT_MET = 5,
  ISO_STATUS_NON_FINITE_INTEGRAND = 6,
  ISO_STATUS_NEGATIVE_DENSITY = 7,
  ISO_STATUS_INVALID_INPUT = 8,
  ISO_STATUS_PANIC = 9,
} IsoStatus;

/**
 * Opaque eigenstate handle.
 */
typedef struct IsoState IsoState;

typedef struct {
  double s_position;
  double s_momentum;
  double s_sum;
  double bbm_bound;
  bool bbm_satisfied;
  bool entropy_squeezed_position;
  bool entropy_squeezed_momentum;
} IsoEntropyReport;

typedef struct {
  double mean_x;
  double var_x;
  /**
   * Derivative route.
   */
  double var_p;
  /**
   * Momentum-density route with tail extrapolation.
   */
  double var_p_momentum_space;
  double product;
  double heisenberg_bound;
  bool x_squeezed;
  bool p_squeezed;
} IsoUncertaintyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Pointer to the message of the last failed call on this thread, or null
 * if the last call succeeded. Valid until the next call into this library
 * from the same thread.
 */
const char *iso_last_error_message(void);

/**
 * Builds the state (m, γ) and writes a new handle to `out`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
IsoStatus iso_state_new(uint32_t m, double gamma, IsoState **out);

/**
 * Releases a handle from [`iso_state_new`]. Null is ignored.
 *
 * # Safety
 * `state` must be null or a live handle not freed before.
 */
void iso_state_free(IsoState *state);

/**
 * Eigenvalue e_m = 2(2m + γ); NaN for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
double iso_state_eigenvalue(const IsoState *state);

/**
 * ψ(x); x < 0 gives 0.
 *
 * # Safety
 * `state` and `out` must be null or valid.
 */
IsoStatus iso_state_psi(const IsoState *state, double x, double *out);

/**
 * Normalized momentum amplitude φ(p).
 *
 * # Safety
 * `state`, `out_re` and `out_im` must be null or valid.
 */
IsoStatus iso_state_phi(const IsoState *state, double p, double *out_re, double *out_im);

/**
 * # Safety
 * `state` and `out` must be null or valid.
 */
IsoStatus iso_state_entropy_report(const IsoState *state, IsoEntropyReport *out);

/**
 * # Safety
 * `state` and `out` must be null or valid.
 */
IsoStatus iso_state_uncertainty_report(const IsoState *state, IsoUncertaintyReport *out);

/**
 * ½(1 + ln π).
 */
double iso_harmonic_ground_entropy(void);

/**
 * 1 + ln π.
 */
double iso_bbm_bound(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOTONIC_H */

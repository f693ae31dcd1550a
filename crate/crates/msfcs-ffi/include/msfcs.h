#ifndef MSFCS_H
#define MSFCS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MSFCS_SPECIES_SPINLESS 0

#define MSFCS_SPECIES_NR2P1_SPIN_UP 1

#define MSFCS_SPECIES_NR2P1_SPIN_DOWN 2

#define MSFCS_SPECIES_NR3P1 3

#define MSFCS_SPECIES_REL3P1 4

#define MSFCS_SPECIES_REL2P1_MASSIVE 5

#define MSFCS_SPECIES_MASSLESS2P1 6

#define MSFCS_MODE_NONREL_T 0

#define MSFCS_MODE_LIGHT_CONE 1

#define MSFCS_MODE_QUASI_CS 2

/**
 * Result codes. `MSFCS_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum MsfcsStatus {
  MSFCS_STATUS_OK = 0,
  MSFCS_STATUS_NULL_POINTER = 1,
  MSFCS_STATUS_CONFIG = 2,
  MSFCS_STATUS_DOMAIN = 3,
  MSFCS_STATUS_TRUNCATION = 4,
  MSFCS_STATUS_QUADRATURE = 5,
  MSFCS_STATUS_REGIME = 6,
  MSFCS_STATUS_AMBIGUOUS_ORBIT = 7,
  MSFCS_STATUS_DEGENERATE = 8,
  MSFCS_STATUS_INVARIANT = 9,
  MSFCS_STATUS_MODE = 10,
  MSFCS_STATUS_SAMPLING = 11,
  MSFCS_STATUS_IO = 12,
  MSFCS_STATUS_PANIC = 13,
} MsfcsStatus;

/**
 * Opaque coherent-state handle.
 */
typedef struct MsfcsState MsfcsState;

/**
 * Field parameters; the flux is given as a signed ratio to the flux quantum.
 */
typedef struct MsfcsField {
  double gamma;
  int32_t eps;
  double flux_ratio;
  int32_t sign_b;
} MsfcsField;

/**
 * Particle parameters. `sigma = 0` selects the value implied by the species.
 */
typedef struct MsfcsParticle {
  /**
   * One of the `MSFCS_SPECIES_*` constants.
   */
  uint32_t species;
  double mass;
  int32_t sigma;
  int32_t branch;
  double p3;
  double lambda;
} MsfcsParticle;

typedef struct MsfcsObservables {
  double norm;
  double norm_err;
  double n1_mean;
  double n2_mean;
  double re_a1;
  double im_a1;
  double re_a2;
  double im_a2;
  double x_mean;
  double y_mean;
  double r2_mean;
  double rc2_mean;
  double r_mean;
  double rc_mean;
  double jz_mean;
  double var_n1;
  double var_n2;
  double var_xy;
  double d_offset;
} MsfcsObservables;

typedef struct MsfcsUncertainty {
  double product_p;
  double bound_p;
  double ratio_p;
  double product_l;
  double bound_l;
  double ratio_l;
} MsfcsUncertainty;

/**
 * Mean position and `a1` at one evolution time.
 */
typedef struct MsfcsSample {
  double time;
  double x_mean;
  double y_mean;
  double re_a1;
  double im_a1;
  double norm;
} MsfcsSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
 * `len`). Returns the full message length without the terminator, or 0 when there is none.
 *
 * # Safety
 * `buf` must be null or point to at least `len` writable bytes.
 */
size_t msfcs_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *msfcs_version(void);

/**
 * Splits a signed flux ratio into integer part, mantissa and flux sign.
 *
 * # Safety
 * Output pointers must be valid for writes.
 */
enum MsfcsStatus msfcs_decompose_flux(double flux_ratio,
                                      int32_t sign_b,
                                      int64_t *l0,
                                      double *mu,
                                      int32_t *vartheta);

/**
 * Rotation frequency between neighbouring levels `n1` and `n1 + 1`; NaN on invalid input.
 */
double msfcs_omega_spectral(double n1, double mass, double gamma, int32_t sigma, int32_t eps);

/**
 * Creates a coherent state of type `j` (0 or 1). On success `*out` owns a new handle.
 *
 * # Safety
 * `field`, `particle` and `out` must be valid pointers.
 */
enum MsfcsStatus msfcs_state_new(const struct MsfcsField *field,
                                 const struct MsfcsParticle *particle,
                                 double re_z1,
                                 double im_z1,
                                 double re_z2,
                                 double im_z2,
                                 uint32_t j,
                                 struct MsfcsState **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `state` must be null or a handle from [`msfcs_state_new`] not yet freed.
 */
void msfcs_state_free(struct MsfcsState *state);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MsfcsStatus msfcs_state_observables(const struct MsfcsState *state,
                                         struct MsfcsObservables *out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MsfcsStatus msfcs_state_uncertainty(const struct MsfcsState *state,
                                         struct MsfcsUncertainty *out);

/**
 * Probability density per `d rho d phi` at `(rho, phi)`, with `rho = gamma r^2 / 2`.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MsfcsStatus msfcs_state_density(const struct MsfcsState *state,
                                     double phi,
                                     double rho,
                                     double *out);

/**
 * Means at time `t` under one of the `MSFCS_MODE_*` evolutions. `omega` is ignored by the
 * quasi-coherent mode.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MsfcsStatus msfcs_state_mean_at(const struct MsfcsState *state,
                                     uint32_t mode,
                                     double omega,
                                     int32_t branch,
                                     double t,
                                     struct MsfcsSample *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSFCS_H */

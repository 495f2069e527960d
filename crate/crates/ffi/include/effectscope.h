#ifndef EFFECTSCOPE_H
#define EFFECTSCOPE_H

/* Generated by cbindgen from effectscope-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum EsStatus {
  EsOk = 0,
  /**
   * Malformed input: files, entry counts, sample values.
   */
  EsParseError = 2,
  /**
   * The matrix has an eigenvalue outside `[0, 1]`.
   */
  EsNotAnEffect = 3,
  EsDimensionMismatch = 4,
  /**
   * Reconstruction system singular or zero samples inconsistent.
   */
  EsSingularSystem = 5,
  /**
   * Eigensolver or search failure.
   */
  EsNumericalError = 6,
  EsNullArgument = 7,
  /**
   * An internal panic was caught at the boundary.
   */
  EsPanic = 8,
} EsStatus;

/**
 * Opaque handle to a validated effect.
 */
typedef struct EsEffect EsEffect;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *es_last_error_message(void);

/**
 * Builds an effect from `dim * dim` row-major complex entries laid out as
 * `2 * dim * dim` doubles `[re, im, re, im, ...]`. The matrix is
 * symmetrized and validated to have spectrum in `[0, 1]`.
 *
 * # Safety
 * `entries` must point to `2 * dim * dim` readable doubles and `out` to a
 * writable pointer slot. A handle written to `out` must be released with
 * [`es_effect_free`].
 */
enum EsStatus es_effect_from_entries(size_t dim, const double *entries, struct EsEffect **out);

/**
 * Loads an effect from a JSON effect file.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string and `out` a writable slot;
 * the handle must be released with [`es_effect_free`].
 */
enum EsStatus es_effect_load(const char *path, struct EsEffect **out);

/**
 * Releases a handle returned by the constructors. Null is a no-op.
 *
 * # Safety
 * `effect` must be a pointer previously returned by this library and not
 * yet freed.
 */
void es_effect_free(struct EsEffect *effect);

/**
 * Hilbert-space dimension of the effect; zero for a null handle.
 *
 * # Safety
 * `effect` must be a live handle or null.
 */
size_t es_effect_dim(const struct EsEffect *effect);

/**
 * Writes the ascending (clamped) eigenvalues into `out` (`dim` doubles).
 *
 * # Safety
 * `effect` must be a live handle; `out` must hold `dim` writable doubles.
 */
enum EsStatus es_effect_eigenvalues(const struct EsEffect *effect, double *out);

/**
 * Whether the effect is a projection (spectrum within slack of `{0, 1}`).
 *
 * # Safety
 * `effect` must be a live handle; `out` writable.
 */
enum EsStatus es_effect_is_projection(const struct EsEffect *effect, bool *out);

/**
 * Closed-form strength of the effect along a ray of `2 * dim` doubles.
 *
 * # Safety
 * `effect` live; `ray` holds `2 * dim` readable doubles; `out` writable.
 */
enum EsStatus es_strength(const struct EsEffect *effect, const double *ray, double *out);

/**
 * Strength by the independent bisection oracle.
 *
 * # Safety
 * Same contract as [`es_strength`].
 */
enum EsStatus es_strength_bisection(const struct EsEffect *effect, const double *ray, double *out);

/**
 * Whether the ray lies in the range of the square root of the effect
 * (equivalently: the strength along it is strictly positive).
 *
 * # Safety
 * Same contract as [`es_strength`], with `out` a writable bool.
 */
enum EsStatus es_ray_in_range(const struct EsEffect *effect, const double *ray, bool *out);

/**
 * Whether the strength along the ray attains the expectation
 * `<phi, E phi>`, i.e. whether the ray is an eigenvector.
 *
 * # Safety
 * Same contract as [`es_strength`], with `out` a writable bool.
 */
enum EsStatus es_is_saturated(const struct EsEffect *effect, const double *ray, bool *out);

/**
 * Loewner comparison `a <= b`.
 *
 * # Safety
 * Both handles live; `out` writable.
 */
enum EsStatus es_loewner_leq(const struct EsEffect *a, const struct EsEffect *b, bool *out);

/**
 * Interpolation pair at a ray: writes the unit vector `psi` (`2 * dim`
 * doubles) and the scale `lam` with `lam P_psi <= E` and
 * `lam |<psi, phi>|^2 = <phi, E phi>`.
 *
 * # Safety
 * `psi_out` must hold `2 * dim` writable doubles; otherwise as
 * [`es_strength`].
 */
enum EsStatus es_interpolation_pair(const struct EsEffect *effect,
                                    const double *ray,
                                    double *psi_out,
                                    double *lam_out);

/**
 * Reconstructs an effect from `n_samples` strength samples. Rays are
 * packed consecutively (`2 * dim` doubles each); the recovered matrix is
 * written as `2 * dim * dim` row-major doubles.
 *
 * # Safety
 * `rays` must hold `n_samples * 2 * dim` readable doubles, `values`
 * `n_samples` readable doubles, `entries_out` `2 * dim * dim` writable
 * doubles; the scalar out-pointers must be writable.
 */
enum EsStatus es_reconstruct(size_t dim,
                             size_t n_samples,
                             const double *rays,
                             const double *values,
                             double *entries_out,
                             double *residual_out,
                             double *conditioning_out,
                             size_t *kernel_dim_out);

/**
 * Runs the property suite and returns the JSON report as a heap string to
 * be released with [`es_string_free`]. A status of `EsOk` means the suite
 * ran; consult the report's `all_passed` field for the verdict.
 *
 * # Safety
 * `dims` must hold `n_dims` readable size_t values; `out` must be a
 * writable pointer slot.
 */
enum EsStatus es_check_json(uint64_t seed,
                            const size_t *dims,
                            size_t n_dims,
                            size_t trials,
                            char **out);

/**
 * Releases a string returned by [`es_check_json`]. Null is a no-op.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not yet
 * freed.
 */
void es_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFFECTSCOPE_H */

#ifndef VQCAS_H
#define VQCAS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define VQCAS_METHOD_VQE 0

#define VQCAS_METHOD_VQD 1

#define VQCAS_METHOD_VQE_AC 2

typedef enum VqcasStatus {
  VQCAS_STATUS_OK = 0,
  VQCAS_STATUS_NULL_POINTER = 1,
  VQCAS_STATUS_INVALID_ARGUMENT = 2,
  VQCAS_STATUS_PARSE = 3,
  VQCAS_STATUS_SOLVER = 4,
  VQCAS_STATUS_IO = 5,
  VQCAS_STATUS_BUFFER_TOO_SMALL = 6,
  VQCAS_STATUS_PANIC = 7,
} VqcasStatus;

/**
 * Mapped two-qubit problem plus the integrals it came from.
 */
typedef struct VqcasProblem VqcasProblem;

typedef struct VqcasResult VqcasResult;

/**
 * Solver options. Obtain defaults from [`vqcas_solve_options_default`].
 */
typedef struct VqcasSolveOptions {
  /**
   * One of the `VQCAS_METHOD_*` constants.
   */
  int32_t method;
  /**
   * `sr`, `ra(D)` or `esu2(D)`; NULL selects `sr`.
   */
  const char *ansatz;
  double beta;
  double gamma;
  double epsilon;
  /**
   * Nonzero selects the noisy sampled backend with the default noise model.
   */
  int32_t noisy;
  uint64_t shots;
  uint64_t seed;
  size_t max_evaluations;
} VqcasSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *vqcas_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *vqcas_last_error(void);

/**
 * Load a two-orbital, two-electron, MS2 = 0 FCIDUMP file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum VqcasStatus vqcas_problem_from_fcidump(const char *path, struct VqcasProblem **out);

/**
 * Build a problem from two-orbital integrals in chemists' notation:
 * `h1[p*2 + q]` and `h2[((p*2 + q)*2 + r)*2 + s]`.
 *
 * # Safety
 * `h1` must point to 4 and `h2` to 16 readable doubles; `out` must be valid.
 */
enum VqcasStatus vqcas_problem_from_integrals(double e_core,
                                              const double *h1,
                                              const double *h2,
                                              struct VqcasProblem **out);

/**
 * # Safety
 * `problem` must be NULL or a handle from this library not yet freed.
 */
void vqcas_problem_free(struct VqcasProblem *problem);

/**
 * Exact singlet energies in ascending order.
 *
 * # Safety
 * `problem` must be a live handle, `out` must hold `capacity` doubles and
 * `written` must be valid.
 */
enum VqcasStatus vqcas_exact_singlet_energies(const struct VqcasProblem *problem,
                                              double *out,
                                              size_t capacity,
                                              size_t *written);

/**
 * Statevector VQE/AC with the spin-restricted ansatz and the default
 * overlap bound.
 */
struct VqcasSolveOptions vqcas_solve_options_default(void);

/**
 * Solve for the state above `lower` (the ground state when `n_lower` is 0).
 *
 * # Safety
 * `problem` must be a live handle, `options` valid, `lower` an array of
 * `n_lower` live result handles (may be NULL when `n_lower` is 0) and `out`
 * a valid pointer.
 */
enum VqcasStatus vqcas_solve(const struct VqcasProblem *problem,
                             const struct VqcasSolveOptions *options,
                             const struct VqcasResult *const *lower,
                             size_t n_lower,
                             struct VqcasResult **out);

/**
 * # Safety
 * `result` must be NULL or a handle from this library not yet freed.
 */
void vqcas_result_free(struct VqcasResult *result);

/**
 * # Safety
 * `result` must be a live handle and `energy` valid.
 */
enum VqcasStatus vqcas_result_energy(const struct VqcasResult *result, double *energy);

/**
 * # Safety
 * `result` must be a live handle and `s_squared` valid.
 */
enum VqcasStatus vqcas_result_s_squared(const struct VqcasResult *result, double *s_squared);

/**
 * Writes 1 when the optimizer met its tolerance, 0 otherwise.
 *
 * # Safety
 * `result` must be a live handle and `converged` valid.
 */
enum VqcasStatus vqcas_result_converged(const struct VqcasResult *result, int32_t *converged);

/**
 * Optimal circuit parameters.
 *
 * # Safety
 * `result` must be a live handle, `out` must hold `capacity` doubles and
 * `written` must be valid.
 */
enum VqcasStatus vqcas_result_parameters(const struct VqcasResult *result,
                                         double *out,
                                         size_t capacity,
                                         size_t *written);

/**
 * Squared overlaps with the lower states passed to [`vqcas_solve`].
 *
 * # Safety
 * As for [`vqcas_result_parameters`].
 */
enum VqcasStatus vqcas_result_overlaps(const struct VqcasResult *result,
                                       double *out,
                                       size_t capacity,
                                       size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VQCAS_H */

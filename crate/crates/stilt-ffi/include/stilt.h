#ifndef STILT_H
#define STILT_H

/* Generated from the stilt-ffi crate (cargo test -p stilt-ffi regenerates with STILT_REGENERATE_HEADER=1); do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Discrete formulation selector.
typedef enum StiltFormulation {
  // Lagrange multiplier on the 2D interface, conforming meshes.
  STILT_FORMULATION_COUPLED2D = 0,
  // Averaged multiplier on the 1D line, conforming meshes.
  STILT_FORMULATION_COUPLED1D = 1,
  // Cut-cell multiplier with jump stabilization, independent meshes.
  STILT_FORMULATION_STABILIZED1D = 2,
} StiltFormulation;

// Status code returned by every fallible entry point.
typedef enum StiltStatus {
  // The call succeeded.
  STILT_STATUS_OK = 0,
  // A required pointer argument was null.
  STILT_STATUS_NULL_POINTER = 1,
  // A parameter was out of range or inconsistent.
  STILT_STATUS_INVALID_ARGUMENT = 2,
  // A matrix factorization failed.
  STILT_STATUS_FACTORIZATION_FAILED = 3,
  // An iterative or spectral solve did not converge.
  STILT_STATUS_SOLVER_FAILED = 4,
  // The library caught an internal panic.
  STILT_STATUS_INTERNAL_ERROR = 5,
} StiltStatus;

// Opaque handle holding one assembled and solved benchmark instance.
typedef struct StiltSolution StiltSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library as a static, NUL-terminated string.
const char *stilt_version(void);

// Message describing the most recent failure on the calling thread.
// The pointer stays valid until the next failing call on this thread.
const char *stilt_last_error(void);

// Assembles the benchmark problem for a formulation at a refinement
// level (1 is the coarsest), solves it directly and computes the error
// norms. On success writes a heap-allocated handle to `out`; release it
// with [`stilt_solution_free`].
//
// # Safety
// `out` must be a valid pointer to writable memory.
enum StiltStatus stilt_solve_benchmark(enum StiltFormulation formulation,
                                       uint32_t level,
                                       struct StiltSolution **out);

// Releases a solution handle. Passing null is a no-op; passing the same
// handle twice is undefined behavior.
//
// # Safety
// `solution` must be null or a pointer obtained from
// [`stilt_solve_benchmark`] that has not been freed.
void stilt_solution_free(struct StiltSolution *solution);

// Writes the number of 3D, 1D and multiplier degrees of freedom.
//
// # Safety
// `solution` must be a live handle; out-pointers may be null to skip a
// field.
enum StiltStatus stilt_solution_dof_counts(const struct StiltSolution *solution,
                                           uint64_t *volume,
                                           uint64_t *line,
                                           uint64_t *multiplier);

// Writes the error norms of the discrete solution against the exact one:
// H¹(Ω) and H¹(Λ) field errors, the fractional dual norm of the
// multiplier error (NaN for the stabilized formulation, which has no
// conforming dual norm) and its L² norm.
//
// # Safety
// `solution` must be a live handle; out-pointers may be null to skip a
// field.
enum StiltStatus stilt_solution_error_norms(const struct StiltSolution *solution,
                                            double *h1_volume,
                                            double *h1_line,
                                            double *multiplier_dual,
                                            double *multiplier_l2);

// Evaluates the discrete 3D field at a point of the unit cube.
//
// # Safety
// `solution` must be a live handle and `value` a valid pointer.
enum StiltStatus stilt_solution_evaluate_volume(const struct StiltSolution *solution,
                                                double x,
                                                double y,
                                                double z,
                                                double *value);

// Evaluates the discrete 1D field at a coordinate along the line.
//
// # Safety
// `solution` must be a live handle and `value` a valid pointer.
enum StiltStatus stilt_solution_evaluate_line(const struct StiltSolution *solution,
                                              double z,
                                              double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STILT_H */

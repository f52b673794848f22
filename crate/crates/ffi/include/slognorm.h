#ifndef SLOGNORM_H
#define SLOGNORM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlnStatus {
  SLN_STATUS_OK = 0,
  SLN_STATUS_NULL_POINTER = 1,
  SLN_STATUS_INVALID_ARGUMENT = 2,
  SLN_STATUS_DIMENSION = 3,
  SLN_STATUS_NON_FINITE = 4,
  SLN_STATUS_NOT_HERMITIAN = 5,
  SLN_STATUS_CONVERGENCE = 6,
  SLN_STATUS_INTERNAL = 7,
} SlnStatus;

typedef enum SlnNorm {
  SLN_NORM_ONE = 1,
  SLN_NORM_TWO = 2,
  SLN_NORM_INF = 3,
} SlnNorm;

typedef enum SlnScheme {
  SLN_SCHEME_EULER_MARUYAMA = 0,
  SLN_SCHEME_MILSTEIN = 1,
} SlnScheme;

// Opaque square complex matrix.
typedef struct SlnMatrix SlnMatrix;

// Opaque linear SDE system.
typedef struct SlnSystem SlnSystem;

// A Monte Carlo estimate of the stochastic logarithmic norm.
typedef struct SlnEstimate {
  double value;
  double std_error;
  uint64_t samples;
} SlnEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *sln_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sln_version(void);

// Creates a rows × cols matrix from row-major real and imaginary parts.
// `im` may be null for a real matrix.
//
// # Safety
// `re` (and `im` when non-null) must point to rows·cols readable doubles;
// `out` must be writable.
enum SlnStatus sln_matrix_new(size_t rows,
                              size_t cols,
                              const double *re,
                              const double *im,
                              struct SlnMatrix **out);

// # Safety
// `m` must be null or a handle from [`sln_matrix_new`] not yet freed.
void sln_matrix_free(struct SlnMatrix *m);

// Logarithmic norm μ_p of a square matrix.
//
// # Safety
// `m` must be a live matrix handle and `out` writable.
enum SlnStatus sln_mu(const struct SlnMatrix *m, enum SlnNorm p, double *out);

// Builds dX = AX dt + Σⱼ BⱼX dWⱼ from a drift and `channels` diffusion
// matrices. The matrices are copied; the caller keeps ownership.
//
// # Safety
// `drift` must be a live matrix handle; `diffusions` must point to
// `channels` live handles (or be null when `channels` is 0); `out` must be
// writable.
enum SlnStatus sln_system_new(const struct SlnMatrix *drift,
                              const struct SlnMatrix *const *diffusions,
                              size_t channels,
                              struct SlnSystem **out);

// # Safety
// `s` must be null or a handle from [`sln_system_new`] not yet freed.
void sln_system_free(struct SlnSystem *s);

// Direct Monte Carlo estimate of ν_p^l with antithetic pairs.
//
// # Safety
// `sys` must be a live system handle and `out` writable.
enum SlnStatus sln_nu_direct(const struct SlnSystem *sys,
                             enum SlnNorm p,
                             uint32_t l,
                             uint64_t samples,
                             uint64_t seed,
                             size_t workers,
                             struct SlnEstimate *out);

// Definitional estimate of ν_p^l on the step ladder h0·2⁻ᵏ, k < steps.
// A non-positive `h0` selects the default starting step.
//
// # Safety
// `sys` must be a live system handle and `out` writable.
enum SlnStatus sln_nu_definitional(const struct SlnSystem *sys,
                                   enum SlnNorm p,
                                   uint32_t l,
                                   double h0,
                                   size_t steps,
                                   uint64_t samples,
                                   uint64_t seed,
                                   size_t workers,
                                   struct SlnEstimate *out);

// Simulates `paths` trajectories from x0 and writes E‖X‖_p^l and its
// standard error at the `checkpoints + 1` recording times (including
// t = 0). Diverged checkpoints are reported as +∞. `x0_im` may be null.
//
// # Safety
// `x0_re` (and `x0_im` when non-null) must hold the system dimension in
// doubles; `moments` and `std_errors` must hold `checkpoints + 1` doubles.
enum SlnStatus sln_simulate_moments(const struct SlnSystem *sys,
                                    const double *x0_re,
                                    const double *x0_im,
                                    double h,
                                    double t_end,
                                    uint64_t paths,
                                    size_t checkpoints,
                                    enum SlnScheme scheme,
                                    uint64_t seed,
                                    enum SlnNorm p,
                                    uint32_t l,
                                    size_t workers,
                                    double *moments,
                                    double *std_errors);

// Milstein mean-square stability function R(h) for dX = λX dt + μX dW.
double sln_milstein_r(double h, double lambda_re, double lambda_im, double mu_re, double mu_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLOGNORM_H */

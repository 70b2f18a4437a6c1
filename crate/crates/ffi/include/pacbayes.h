#ifndef PACBAYES_H
#define PACBAYES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PB_KIND_LIN 0

#define PB_KIND_SQ 1

#define PB_KIND_PINSKER 2

#define PB_KIND_CH 3

#define PB_KIND_KL 4

#define PB_POLICY_EXACT 0

#define PB_POLICY_TWO_SQRT_M 1

/**
 * Result of every fallible call. Values 10 and above match the library's
 * error codes.
 */
typedef enum PbStatus {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_ARGUMENT = 2,
  PB_STATUS_PANIC = 3,
  PB_STATUS_EMPTY_PROFILE = 10,
  PB_STATUS_RISK_OUT_OF_RANGE = 11,
  PB_STATUS_BAD_SAMPLE_SIZE = 12,
  PB_STATUS_DUPLICATE_ID = 13,
  PB_STATUS_EMPTY_WEIGHTS = 20,
  PB_STATUS_NEGATIVE_WEIGHT = 21,
  PB_STATUS_NON_FINITE_WEIGHT = 22,
  PB_STATUS_ALL_ZERO = 23,
  PB_STATUS_LENGTH_MISMATCH = 24,
  PB_STATUS_K_OUT_OF_RANGE = 30,
  PB_STATUS_UNSUPPORTED_KIND = 31,
  PB_STATUS_BAD_POLICY_FOR_KIND = 32,
  PB_STATUS_KL_UNDEFINED = 40,
  PB_STATUS_INVALID_ROOT_REQUEST = 41,
  PB_STATUS_OUT_OF_DOMAIN = 42,
  PB_STATUS_NOT_ABS_CONTINUOUS = 50,
  PB_STATUS_NEGATIVE_R = 51,
  PB_STATUS_INVALID_DELTA = 52,
  PB_STATUS_PRIOR_NOT_POSITIVE = 60,
  PB_STATUS_NOT_STRICTLY_POSITIVE = 61,
  PB_STATUS_KL_DEGENERATE = 62,
  PB_STATUS_NON_UNIFORM_PRIOR = 63,
  PB_STATUS_TOO_MANY_CLASSIFIERS = 64,
  PB_STATUS_INVALID_STEP = 65,
  PB_STATUS_INVALID_CONFIG = 66,
  PB_STATUS_MISSING_TEST_ERRORS = 70,
  PB_STATUS_INVALID_GENERATOR = 71,
} PbStatus;

/**
 * Opaque distribution over classifiers.
 */
typedef struct PbDistribution PbDistribution;

/**
 * Opaque optimizer output.
 */
typedef struct PbPosterior PbPosterior;

/**
 * Opaque risk profile.
 */
typedef struct PbProfile PbProfile;

typedef struct PbBoundValue {
  double value;
  double gibbs_emp_risk;
  double kl_qp;
  double log_ik;
  bool saturated;
} PbBoundValue;

/**
 * Fixed-point solver settings. Obtain defaults from
 * [`pb_solver_config_default`].
 */
typedef struct PbSolverConfig {
  double tol;
  size_t max_iters;
  double damping;
  double positivity_floor;
  /**
   * Start from a random point drawn with `seed` instead of the prior.
   */
  bool use_seed;
  uint64_t seed;
} PbSolverConfig;

typedef struct PbPosteriorSummary {
  struct PbBoundValue bound;
  size_t iterations;
  double residual;
  bool converged;
  size_t support_size;
} PbPosteriorSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *pb_last_error_message(void);

/**
 * Builds a profile from `n` empirical risks measured on `m` examples.
 */
enum PbStatus pb_profile_new(const double *risks, size_t n, uint64_t m, struct PbProfile **out);

size_t pb_profile_len(const struct PbProfile *profile);

void pb_profile_free(struct PbProfile *profile);

enum PbStatus pb_distribution_uniform(size_t n, struct PbDistribution **out);

/**
 * Normalizes `n` non-negative weights into a distribution.
 */
enum PbStatus pb_distribution_from_weights(const double *weights,
                                           size_t n,
                                           struct PbDistribution **out);

size_t pb_distribution_len(const struct PbDistribution *dist);

/**
 * Copies the probabilities into `buf`, which must hold `len` values.
 */
enum PbStatus pb_distribution_weights(const struct PbDistribution *dist, double *buf, size_t len);

void pb_distribution_free(struct PbDistribution *dist);

/**
 * Natural log of the threshold constant `I(m)`.
 */
enum PbStatus pb_ik_constant(int32_t kind, uint64_t m, int32_t policy, double *out_log_value);

/**
 * Larger root of `kl(phat, q) = x`. `out_saturated` may be NULL.
 */
enum PbStatus pb_kl_upper_root(double phat, double x, double *out_root, bool *out_saturated);

/**
 * Smaller root of `kl(phat, q) = x`. `out_saturated` may be NULL.
 */
enum PbStatus pb_kl_lower_root(double phat, double x, double *out_root, bool *out_saturated);

/**
 * Bound of `kind` at posterior `q` against `prior`.
 */
enum PbStatus pb_evaluate_bound(int32_t kind,
                                double delta,
                                int32_t policy,
                                const struct PbDistribution *q,
                                const struct PbDistribution *prior,
                                const struct PbProfile *profile,
                                struct PbBoundValue *out);

struct PbSolverConfig pb_solver_config_default(void);

/**
 * Bound-minimizing posterior: closed form for LIN, fixed-point iteration
 * otherwise. `config` may be NULL for defaults. Non-convergence is not an
 * error; check the summary's `converged` flag.
 */
enum PbStatus pb_optimize(int32_t kind,
                          const struct PbProfile *profile,
                          const struct PbDistribution *prior,
                          double delta,
                          int32_t policy,
                          const struct PbSolverConfig *config,
                          struct PbPosterior **out);

/**
 * Best posterior over prefixes of the risk-sorted profile; the prior must
 * be uniform. `out_prefix` (may be NULL) receives the winning prefix size.
 */
enum PbStatus pb_prefix_search(int32_t kind,
                               const struct PbProfile *profile,
                               const struct PbDistribution *prior,
                               double delta,
                               int32_t policy,
                               const struct PbSolverConfig *config,
                               struct PbPosterior **out,
                               size_t *out_prefix);

size_t pb_posterior_len(const struct PbPosterior *post);

/**
 * Copies the posterior probabilities into `buf`, which must hold `len` values.
 */
enum PbStatus pb_posterior_weights(const struct PbPosterior *post, double *buf, size_t len);

enum PbStatus pb_posterior_summary(const struct PbPosterior *post, struct PbPosteriorSummary *out);

void pb_posterior_free(struct PbPosterior *post);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PACBAYES_H */

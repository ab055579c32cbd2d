#ifndef QRANDOMNESS_H
#define QRANDOMNESS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_NOT_HERMITIAN = 2,
  QR_STATUS_NOT_PSD = 3,
  QR_STATUS_TRACE_NOT_ONE = 4,
  QR_STATUS_NOT_NORMALIZED = 5,
  QR_STATUS_BASIS_NOT_ORTHONORMAL = 6,
  QR_STATUS_DIM_MISMATCH = 7,
  QR_STATUS_INVALID_CONFIG = 8,
  QR_STATUS_INVALID_VALUE = 9,
  QR_STATUS_PANIC = 10,
} QrStatus;

/**
 * Opaque orthonormal basis.
 */
typedef struct QrBasis QrBasis;

/**
 * Opaque density matrix.
 */
typedef struct QrDensityMatrix QrDensityMatrix;

/**
 * Optimizer settings. `ensemble_size == 0` selects the default `rank^2`.
 */
typedef struct QrOptimizerConfig {
  size_t restarts;
  size_t ensemble_size;
  size_t max_iters;
  double tol;
  uint64_t seed;
} QrOptimizerConfig;

typedef struct QrGapCheck {
  double r_classical;
  double r_quantum;
  double discord;
  double residual;
  bool converged;
} QrGapCheck;

typedef struct QrLockingReport {
  double key_after_measurement;
  double key_before_measurement;
  double locking_advantage;
  double accessible_info_with_key;
  double message_entropy;
  double residual;
  bool converged;
} QrLockingReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * Valid until the next call into the library from the same thread.
 */
const char *qr_last_error_message(void);

const char *qr_version(void);

/**
 * Validates a `dim x dim` density matrix. `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim * dim` doubles; `out` must
 * be a valid pointer.
 */
enum QrStatus qr_density_matrix_new(size_t dim,
                                    const double *re,
                                    const double *im,
                                    struct QrDensityMatrix **out_state);

/**
 * # Safety
 * `state` must come from [`qr_density_matrix_new`] and not be freed twice.
 */
void qr_density_matrix_free(struct QrDensityMatrix *state);

/**
 * # Safety
 * `state` must be a live handle or null.
 */
size_t qr_density_matrix_dim(const struct QrDensityMatrix *state);

/**
 * Basis whose vectors are the columns of the given unitary.
 *
 * # Safety
 * As for [`qr_density_matrix_new`].
 */
enum QrStatus qr_basis_new(size_t dim,
                           const double *re,
                           const double *im,
                           struct QrBasis **out_basis);

/**
 * # Safety
 * `out_basis` must be a valid pointer.
 */
enum QrStatus qr_basis_computational(size_t dim, struct QrBasis **out_basis);

/**
 * # Safety
 * `basis` must come from a `qr_basis_*` constructor and not be freed twice.
 */
void qr_basis_free(struct QrBasis *basis);

struct QrOptimizerConfig qr_optimizer_config_default(void);

struct QrOptimizerConfig qr_optimizer_config_discord(void);

/**
 * Relative entropy of coherence, in bits.
 *
 * # Safety
 * Handles must be live; `out_value` must be a valid pointer.
 */
enum QrStatus qr_r_quantum(const struct QrDensityMatrix *state,
                           const struct QrBasis *basis,
                           double *out_value);

/**
 * Coherence of formation, in bits. `config` may be null for defaults.
 * `out_converged` may be null.
 *
 * # Safety
 * Handles must be live; `config` null or valid; `out_value` valid.
 */
enum QrStatus qr_r_classical(const struct QrDensityMatrix *state,
                             const struct QrBasis *basis,
                             const struct QrOptimizerConfig *config,
                             double *out_value,
                             bool *out_converged);

/**
 * Computes both measures and the discord of the post-measurement state.
 * Null configs select the defaults.
 *
 * # Safety
 * Handles must be live; configs null or valid; `out_check` valid.
 */
enum QrStatus qr_verify_gap(const struct QrDensityMatrix *state,
                            const struct QrBasis *basis,
                            const struct QrOptimizerConfig *roof_config,
                            const struct QrOptimizerConfig *discord_config,
                            struct QrGapCheck *out_check);

/**
 * Key sizes of the BB84 encoding. Null configs select the defaults.
 *
 * # Safety
 * Configs null or valid; `out_report` valid.
 */
enum QrStatus qr_bb84_report(const struct QrOptimizerConfig *roof_config,
                             const struct QrOptimizerConfig *discord_config,
                             struct QrLockingReport *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QRANDOMNESS_H */

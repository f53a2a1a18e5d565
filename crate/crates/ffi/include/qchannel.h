#ifndef QCHANNEL_H
#define QCHANNEL_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_ARGUMENT = 2,
  QC_STATUS_DIMENSION_MISMATCH = 3,
  QC_STATUS_INVALID_STATE = 4,
  QC_STATUS_INVALID_CHANNEL = 5,
  QC_STATUS_INCONSISTENT = 6,
  QC_STATUS_NOT_CORRECTABLE = 7,
  QC_STATUS_PANIC = 8,
} QcStatus;

/**
 * Kraus channel handle.
 */
typedef struct QcChannel QcChannel;

/**
 * Result of a correction attempt.
 */
typedef struct QcCorrection QcCorrection;

/**
 * Density operator handle.
 */
typedef struct QcDensity QcDensity;

/**
 * Information-theoretic report for one channel.
 */
typedef struct QcReport {
  double input_entropy;
  double output_entropy;
  double entanglement_fidelity;
  double entropy_exchange;
  double coherent_information;
  double fano_lhs;
  double fano_margin;
} QcReport;

/**
 * Quantities along a two-stage process.
 */
typedef struct QcDpiReport {
  double input_entropy;
  double ie_stage1;
  double ie_both;
  double se_stage1;
  double se_both;
  bool chain_holds;
} QcDpiReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *qc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qc_version(void);

/**
 * Density operator from `dim × dim` row-major arrays. `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `dim * dim` doubles.
 */
enum QcStatus qc_density_new(const double *re,
                             const double *im,
                             size_t dim,
                             struct QcDensity **out);

/**
 * Maximally mixed state `I/dim`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QcStatus qc_density_maxmixed(size_t dim, struct QcDensity **out);

/**
 * State from a CLI-style spec such as `maxmixed:2` or `density:@rho.json`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QcStatus qc_density_from_spec(const char *spec, struct QcDensity **out);

/**
 * Dimension of the state, 0 for a null handle.
 *
 * # Safety
 * `rho` must be null or a live handle.
 */
size_t qc_density_dim(const struct QcDensity *rho);

/**
 * Von Neumann entropy in bits.
 *
 * # Safety
 * `rho` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_density_entropy(const struct QcDensity *rho, double *out);

/**
 * # Safety
 * `rho` must be null or a handle not yet freed.
 */
void qc_density_free(struct QcDensity *rho);

/**
 * Channel from `count` operators of size `dim × dim`, packed one after
 * another in row-major order. `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `count * dim * dim` doubles.
 */
enum QcStatus qc_channel_new(const double *re,
                             const double *im,
                             size_t dim,
                             size_t count,
                             struct QcChannel **out);

/**
 * Channel from a CLI-style spec such as `dephasing:0.25` or `kraus:@dir`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QcStatus qc_channel_from_spec(const char *spec, struct QcChannel **out);

/**
 * Input dimension, 0 for a null handle.
 *
 * # Safety
 * `ch` must be null or a live handle.
 */
size_t qc_channel_dim(const struct QcChannel *ch);

/**
 * Number of Kraus operators, 0 for a null handle.
 *
 * # Safety
 * `ch` must be null or a live handle.
 */
size_t qc_channel_len(const struct QcChannel *ch);

/**
 * Copy operator `index` into `dim * dim` row-major buffers.
 *
 * # Safety
 * `ch` must be a live handle; `re` and `im` must hold `dim * dim` doubles.
 */
enum QcStatus qc_channel_operator(const struct QcChannel *ch, size_t index, double *re, double *im);

/**
 * # Safety
 * `ch` must be null or a handle not yet freed.
 */
void qc_channel_free(struct QcChannel *ch);

/**
 * Entanglement fidelity, entropy exchange and coherent information.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum QcStatus qc_analyze(const struct QcDensity *rho,
                         const struct QcChannel *ch,
                         struct QcReport *out);

/**
 * Coherent information before and after a second stage `ch2 ∘ ch1`.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum QcStatus qc_dpi(const struct QcDensity *rho,
                     const struct QcChannel *ch1,
                     const struct QcChannel *ch2,
                     struct QcDpiReport *out);

/**
 * Decide correctability and build a recovery channel when possible.
 *
 * A refusal is not an error: the call returns `Ok` and
 * [`qc_correction_is_correctable`] reports false.
 *
 * # Safety
 * Handles must be live and `out` a valid pointer.
 */
enum QcStatus qc_correct(const struct QcDensity *rho,
                         const struct QcChannel *ch,
                         double tol,
                         struct QcCorrection **out);

/**
 * # Safety
 * `c` must be null or a live handle.
 */
bool qc_correction_is_correctable(const struct QcCorrection *c);

/**
 * `S(ρ) − I_e`; NaN for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
double qc_correction_deficit(const struct QcCorrection *c);

/**
 * `‖ρ^{RE'} − ρ^R ⊗ ρ^{E'}‖_F`; NaN for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
double qc_correction_product_defect(const struct QcCorrection *c);

/**
 * Entanglement fidelity of recovery after noise.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_correction_verified_fidelity(const struct QcCorrection *c, double *out);

/**
 * New channel handle holding a copy of the recovery operators.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_correction_corrector(const struct QcCorrection *c, struct QcChannel **out);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void qc_correction_free(struct QcCorrection *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHANNEL_H */

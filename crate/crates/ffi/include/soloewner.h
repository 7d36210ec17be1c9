#ifndef SOLOEWNER_H
#define SOLOEWNER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  // Invalid input or configuration.
  SL_STATUS_INPUT_ERROR = 2,
  // The computation failed (singular pencil, collision, ...).
  SL_STATUS_NUMERICAL_ERROR = 3,
  SL_STATUS_NULL_POINTER = 4,
  // A Rust panic was caught at the boundary.
  SL_STATUS_PANIC = 5,
} SlStatus;

// Partition of samples into right and left interpolation data.
typedef enum SlPartition {
  SL_PARTITION_INTERLEAVE = 0,
  SL_PARTITION_FIRST_HALF_RIGHT = 1,
} SlPartition;

// An identified or generated realization.
typedef struct SlModel SlModel;

// Frequency samples `(s_k, H(s_k))`.
typedef struct SlSamples SlSamples;

// Best cell of a grid search.
typedef struct SlSweepBest {
  double alpha;
  double beta;
  double j;
  // Cells where identification failed.
  size_t failed_cells;
} SlSweepBest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the
// library; valid until the next failing call.
const char *sl_last_error(void);

// Builds a sample set from four arrays of length `n`.
//
// # Safety
// Each array must hold `n` doubles; `out` must be writable.
enum SlStatus sl_samples_new(const double *s_re,
                             const double *s_im,
                             const double *h_re,
                             const double *h_im,
                             size_t n,
                             struct SlSamples **out);

// Samples `model` at `i * omega[k]`.
//
// # Safety
// `omega` must hold `n` doubles; `out` must be writable.
enum SlStatus sl_samples_from_model(const struct SlModel *model,
                                    const double *omega,
                                    size_t n,
                                    struct SlSamples **out);

// Number of samples; 0 for NULL.
//
// # Safety
// `samples` must be NULL or a live handle.
size_t sl_samples_len(const struct SlSamples *samples);

// # Safety
// `samples` must be NULL or a handle not freed before.
void sl_samples_free(struct SlSamples *samples);

// The two-mass demo system (`alpha = 0.01`, `beta = 0.02`).
//
// # Safety
// `out` must be writable.
enum SlStatus sl_model_demo(struct SlModel **out);

// Parses a model from NUL-terminated JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SlStatus sl_model_from_json(const char *json, struct SlModel **out);

// Serializes a model; release the string with [`sl_string_free`].
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum SlStatus sl_model_to_json(const struct SlModel *model, char **out);

// # Safety
// `s` must be NULL or a string returned by this library.
void sl_string_free(char *s);

// Model order (number of second-order or first-order states); 0 for NULL.
//
// # Safety
// `model` must be NULL or a live handle.
size_t sl_model_order(const struct SlModel *model);

// 1 for a second-order model, 0 for first-order or NULL.
//
// # Safety
// `model` must be NULL or a live handle.
int32_t sl_model_is_second_order(const struct SlModel *model);

// Transfer function at `s = s_re + i s_im`.
//
// # Safety
// `model` must be a live handle; `h_re`, `h_im` must be writable.
enum SlStatus sl_model_eval(const struct SlModel *model,
                            double s_re,
                            double s_im,
                            double *h_re,
                            double *h_im);

// # Safety
// `model` must be NULL or a handle not freed before.
void sl_model_free(struct SlModel *model);

// Second-order Loewner identification with known damping. `order > 0`
// fixes the reduced order, otherwise singular values below `tol` relative
// to the largest are cut.
//
// # Safety
// `samples` must be a live handle; `out` must be writable.
enum SlStatus sl_identify_so(const struct SlSamples *samples,
                             double alpha,
                             double beta,
                             size_t order,
                             double tol,
                             enum SlPartition strategy,
                             struct SlModel **out);

// Classical first-order Loewner identification; truncation as in
// [`sl_identify_so`].
//
// # Safety
// `samples` must be a live handle; `out` must be writable.
enum SlStatus sl_identify_fo(const struct SlSamples *samples,
                             size_t order,
                             double tol,
                             enum SlPartition strategy,
                             struct SlModel **out);

// Grid search over `alphas x betas` (each strictly increasing) with a
// seeded train/test split.
//
// # Safety
// `alphas`/`betas` must hold `n_alpha`/`n_beta` doubles; `best` must be
// writable.
enum SlStatus sl_grid_search(const struct SlSamples *samples,
                             const double *alphas,
                             size_t n_alpha,
                             const double *betas,
                             size_t n_beta,
                             double test_fraction,
                             uint64_t seed,
                             size_t order,
                             double tol,
                             struct SlSweepBest *best);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLOEWNER_H */

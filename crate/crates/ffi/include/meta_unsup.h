#ifndef META_UNSUP_H
#define META_UNSUP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MuStatus {
  MU_STATUS_OK = 0,
  MU_STATUS_NULL_POINTER = 1,
  MU_STATUS_INVALID_ARGUMENT = 2,
  MU_STATUS_DATA_ERROR = 3,
  MU_STATUS_INFEASIBLE = 4,
  MU_STATUS_PANIC = 5,
} MuStatus;

typedef enum MuClusterer {
  MU_CLUSTERER_KMEANS = 0,
  MU_CLUSTERER_AGGLO_SINGLE = 1,
  MU_CLUSTERER_AGGLO_COMPLETE = 2,
  MU_CLUSTERER_AGGLO_AVERAGE = 3,
  MU_CLUSTERER_AGGLO_WARD = 4,
} MuClusterer;

/**
 * Per-member ARI predictors over a clustering family, loaded from JSON.
 */
typedef struct MuAlgoSelectModel MuAlgoSelectModel;

/**
 * Points with optional ground-truth labels.
 */
typedef struct MuDataset MuDataset;

/**
 * Per-k regression of ARI on silhouette, loaded from JSON.
 */
typedef struct MuMetaKModel MuMetaKModel;

/**
 * Accumulates labeled graphs and fits a single-linkage threshold on them.
 */
typedef struct MuThresholdTrainer MuThresholdTrainer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mu_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *mu_last_error_message(void);

/**
 * Build a dataset from a row-major `rows x cols` buffer. `labels` may be NULL.
 *
 * # Safety
 * `data` must hold `rows * cols` doubles; `labels`, when non-null, `rows` entries.
 */
enum MuStatus mu_dataset_new(const double *data,
                             size_t rows,
                             size_t cols,
                             const size_t *labels,
                             struct MuDataset **out);

/**
 * Load a CSV with columns `f0..f{d-1}` and, when `has_labels`, a final `label` column.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MuStatus mu_dataset_load_csv(const char *path, bool has_labels, struct MuDataset **out);

/**
 * # Safety
 * `ds` must be NULL or a handle from this library.
 */
size_t mu_dataset_rows(const struct MuDataset *ds);

/**
 * # Safety
 * `ds` must be NULL or a handle from this library.
 */
size_t mu_dataset_cols(const struct MuDataset *ds);

/**
 * # Safety
 * `ds` must be NULL or a handle from this library, not used afterwards.
 */
void mu_dataset_free(struct MuDataset *ds);

/**
 * Fraction of item pairs on which two labelings disagree.
 *
 * # Safety
 * `y` and `z` must hold `n` entries each.
 */
enum MuStatus mu_clustering_loss(const size_t *y, const size_t *z, size_t n, double *out);

/**
 * # Safety
 * `truth` and `pred` must hold `n` entries each.
 */
enum MuStatus mu_adjusted_rand_index(const size_t *truth,
                                     const size_t *pred,
                                     size_t n,
                                     double *out);

/**
 * # Safety
 * `assignment` must hold one entry per dataset row.
 */
enum MuStatus mu_silhouette(const struct MuDataset *ds, const size_t *assignment, double *out);

/**
 * Cluster a dataset into `k` parts and write one label per row into `assignment`.
 *
 * # Safety
 * `assignment` must hold `capacity` entries; `capacity` must equal the row count.
 */
enum MuStatus mu_cluster(const struct MuDataset *ds,
                         enum MuClusterer kind,
                         size_t k,
                         bool normalize,
                         uint64_t seed,
                         size_t *assignment,
                         size_t capacity);

/**
 * Excess-loss bound for ERM over `family_size` algorithms from `n` problems.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MuStatus mu_generalization_bound(size_t n, size_t family_size, double delta, double *out);

/**
 * Same bound for a family described by `bits` bits of parameters.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MuStatus mu_generalization_bound_bits(size_t n, uint32_t bits, double delta, double *out);

/**
 * Single-linkage threshold clustering of an edge list: vertices joined by edges of
 * weight `<= r` (or `< r` when `strict`) share a label.
 *
 * # Safety
 * `us`, `vs`, `ws` must hold `n_edges` entries; `assignment` must hold `n_vertices`.
 */
enum MuStatus mu_threshold_cluster(size_t n_vertices,
                                   const size_t *us,
                                   const size_t *vs,
                                   const double *ws,
                                   size_t n_edges,
                                   double r,
                                   bool strict,
                                   size_t *assignment);

struct MuThresholdTrainer *mu_threshold_trainer_new(void);

/**
 * Add one training graph with its ground-truth labels (`truth` has `n_vertices` entries).
 *
 * # Safety
 * `trainer` must be a live handle; array lengths as described.
 */
enum MuStatus mu_threshold_trainer_add_graph(struct MuThresholdTrainer *trainer,
                                             size_t n_vertices,
                                             const size_t *us,
                                             const size_t *vs,
                                             const double *ws,
                                             size_t n_edges,
                                             const size_t *truth);

/**
 * # Safety
 * `trainer` must be a live handle.
 */
size_t mu_threshold_trainer_len(const struct MuThresholdTrainer *trainer);

/**
 * Fit the threshold minimising mean training loss; writes the threshold and its loss.
 *
 * # Safety
 * `trainer` must be a live handle; outputs must be valid pointers.
 */
enum MuStatus mu_threshold_trainer_fit(const struct MuThresholdTrainer *trainer,
                                       double *r_star,
                                       double *min_mean_loss);

/**
 * # Safety
 * `trainer` must be NULL or a handle from this library, not used afterwards.
 */
void mu_threshold_trainer_free(struct MuThresholdTrainer *trainer);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MuStatus mu_meta_k_model_from_json(const char *json, struct MuMetaKModel **out);

/**
 * Run the k-means grid over the model's k range (`restarts` runs per k) and pick k.
 *
 * # Safety
 * Handles must be live; `k_out` a valid pointer.
 */
enum MuStatus mu_meta_k_predict(const struct MuMetaKModel *model,
                                const struct MuDataset *ds,
                                size_t restarts,
                                uint64_t seed,
                                size_t *k_out);

/**
 * # Safety
 * `model` must be NULL or a handle from this library, not used afterwards.
 */
void mu_meta_k_model_free(struct MuMetaKModel *model);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MuStatus mu_algo_select_model_from_json(const char *json, struct MuAlgoSelectModel **out);

/**
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t mu_algo_select_model_members(const struct MuAlgoSelectModel *model);

/**
 * Run every family member on `ds`, write the index of the member with the highest
 * predicted ARI and its labels.
 *
 * # Safety
 * Handles must be live; `assignment` must hold `capacity` entries equal to the row count.
 */
enum MuStatus mu_algo_select_choose(const struct MuAlgoSelectModel *model,
                                    const struct MuDataset *ds,
                                    size_t *member_out,
                                    size_t *assignment,
                                    size_t capacity);

/**
 * # Safety
 * `model` must be NULL or a handle from this library, not used afterwards.
 */
void mu_algo_select_model_free(struct MuAlgoSelectModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* META_UNSUP_H */

#ifndef UGCL_H
#define UGCL_H

/* Generated by cbindgen from the ugcl-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every FFI call.
 */
typedef enum UgclStatus {
  UGCL_STATUS_OK = 0,
  UGCL_STATUS_NULL_POINTER = 1,
  UGCL_STATUS_INVALID_ARGUMENT = 2,
  UGCL_STATUS_PARSE_ERROR = 3,
  UGCL_STATUS_NUMERIC_ERROR = 4,
  UGCL_STATUS_IO_ERROR = 5,
  UGCL_STATUS_CONFIG_DRIFT = 6,
  UGCL_STATUS_VERIFY_FAILED = 7,
  UGCL_STATUS_INTERNAL_PANIC = 8,
} UgclStatus;

/**
 * Ablation selector for [`UgclTrainOptions`].
 */
typedef enum UgclAblation {
  UGCL_ABLATION_NONE = 0,
  UGCL_ABLATION_MEAN_POOL = 1,
  UGCL_ABLATION_OVERSMOOTH = 2,
  UGCL_ABLATION_SINGLE_ENCODER = 3,
  UGCL_ABLATION_NO_SUBSAMPLE = 4,
  UGCL_ABLATION_NO_POWER = 5,
} UgclAblation;

/**
 * Opaque graph handle.
 */
typedef struct UgclGraph UgclGraph;

/**
 * Opaque trained-model handle.
 */
typedef struct UgclModel UgclModel;

/**
 * Training hyperparameters, plain-old-data for C callers.
 */
typedef struct UgclTrainOptions {
  uint64_t epochs;
  uint64_t sample_size;
  uint64_t power_n;
  uint64_t hidden_dim;
  double learning_rate;
  double temperature;
  uint64_t seed;
  enum UgclAblation ablation;
  bool use_bias;
} UgclTrainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next FFI call from the same thread.
 */
const char *ugcl_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ugcl_version(void);

/**
 * Fill `opts` with the library defaults.
 *
 * # Safety
 * `opts` must point to writable memory for one `UgclTrainOptions`.
 */
enum UgclStatus ugcl_train_options_default(struct UgclTrainOptions *opts);

/**
 * Build a graph from parallel edge arrays and a row-major feature matrix.
 * `labels` may be NULL; otherwise it holds `num_nodes` entries with -1 for
 * unlabeled nodes. Duplicate edges and self-loops are dropped.
 *
 * # Safety
 * `edge_u`/`edge_v` hold `num_edges` entries, `features` holds
 * `num_nodes * feature_dim` doubles, `labels` is NULL or `num_nodes` longs,
 * and `out` is a writable handle slot.
 */
enum UgclStatus ugcl_graph_from_arrays(size_t num_nodes,
                                       const uint64_t *edge_u,
                                       const uint64_t *edge_v,
                                       size_t num_edges,
                                       const double *features,
                                       size_t feature_dim,
                                       const int64_t *labels,
                                       struct UgclGraph **out);

/**
 * Load a graph from the plain-text dataset files. `labels_path` may be NULL.
 *
 * # Safety
 * Paths are NUL-terminated UTF-8 strings; `out` is a writable handle slot.
 */
enum UgclStatus ugcl_graph_load(const char *edges_path,
                                const char *features_path,
                                const char *labels_path,
                                struct UgclGraph **out);

/**
 * # Safety
 * `graph` must be a handle from this library, not yet freed; NULL is a no-op.
 */
void ugcl_graph_free(struct UgclGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle from this library.
 */
size_t ugcl_graph_num_nodes(const struct UgclGraph *graph);

/**
 * Undirected edge count (each edge counted once).
 *
 * # Safety
 * `graph` must be a live handle from this library.
 */
size_t ugcl_graph_num_edges(const struct UgclGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle from this library.
 */
size_t ugcl_graph_feature_dim(const struct UgclGraph *graph);

/**
 * Sparsity (E/N^2), average degree (E/N), and component count.
 *
 * # Safety
 * `graph` is a live handle; output pointers may be NULL to skip a field.
 */
enum UgclStatus ugcl_graph_stats(const struct UgclGraph *graph,
                                 double *out_sparsity,
                                 double *out_avg_degree,
                                 size_t *out_components);

/**
 * Train the encoders; `opts` may be NULL for defaults.
 *
 * # Safety
 * `graph` is a live handle, `opts` NULL or valid, `out` a writable slot.
 */
enum UgclStatus ugcl_train(const struct UgclGraph *graph,
                           const struct UgclTrainOptions *opts,
                           struct UgclModel **out);

/**
 * # Safety
 * `model` must be a handle from this library, not yet freed; NULL is a no-op.
 */
void ugcl_model_free(struct UgclModel *model);

/**
 * # Safety
 * `model` must be a live handle from this library.
 */
size_t ugcl_model_hidden_dim(const struct UgclModel *model);

/**
 * Final embeddings `H = H_theta + Â^n H_theta` on the full graph, written
 * row-major into `out`, which holds `num_nodes * hidden_dim` doubles.
 *
 * # Safety
 * `graph` and `model` are live handles; `out` points to `out_len` doubles.
 */
enum UgclStatus ugcl_embed(const struct UgclGraph *graph,
                           const struct UgclModel *model,
                           double *out,
                           size_t out_len);

/**
 * # Safety
 * `model` is a live handle; `path` is a NUL-terminated UTF-8 string.
 */
enum UgclStatus ugcl_model_save(const struct UgclModel *model, const char *path);

/**
 * # Safety
 * `path` is a NUL-terminated UTF-8 string; `out` a writable handle slot.
 */
enum UgclStatus ugcl_model_load(const char *path, struct UgclModel **out);

/**
 * Measured contextual homophily rate per scope, written into `out_rates`
 * (`n_max` doubles). Needs a labeled graph.
 *
 * # Safety
 * `graph` is a live handle; `out_rates` points to `n_max` doubles.
 */
enum UgclStatus ugcl_homophily_rates(const struct UgclGraph *graph,
                                     size_t n_max,
                                     double *out_rates);

/**
 * Recommended contextual scope: the largest `n <= n_max` whose measured
 * rate stays at or above `threshold`. `out_warning` is set when every rate
 * is below threshold (scope falls back to 1).
 *
 * # Safety
 * `graph` is a live handle; `out_n` and `out_warning` are writable or NULL.
 */
enum UgclStatus ugcl_recommend_scope(const struct UgclGraph *graph,
                                     size_t n_max,
                                     double threshold,
                                     size_t *out_n,
                                     bool *out_warning);

/**
 * Lower bound on the scope-`n` homophily rate from average degree `d` and
 * 1-hop rate `p1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum UgclStatus ugcl_homophily_lower_bound(double d, double p1, size_t n, double *out);

/**
 * Run the spectral contraction check on `graph` with a seeded random
 * feature block. Returns `VerifyFailed` when any assertion fails.
 *
 * # Safety
 * `graph` is a live handle.
 */
enum UgclStatus ugcl_verify_contraction(const struct UgclGraph *graph,
                                        size_t n_max,
                                        size_t eigen_budget,
                                        uint64_t seed);

/**
 * Median seconds for one `Â^n` application against a `width`-column block.
 *
 * # Safety
 * `graph` is a live handle; `out_seconds` must be writable.
 */
enum UgclStatus ugcl_measure_power_time(const struct UgclGraph *graph,
                                        size_t n,
                                        size_t repeats,
                                        size_t width,
                                        double *out_seconds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UGCL_H */

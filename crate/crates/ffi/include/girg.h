#ifndef GIRG_H
#define GIRG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GirgStatus {
  GIRG_STATUS_OK = 0,
  GIRG_STATUS_NULL_POINTER = 1,
  GIRG_STATUS_INVALID_ARGUMENT = 2,
  GIRG_STATUS_PARSE = 3,
  GIRG_STATUS_IO = 4,
  GIRG_STATUS_DISCONNECTED = 5,
  GIRG_STATUS_INSUFFICIENT_DATA = 6,
  GIRG_STATUS_INTERNAL = 7,
} GirgStatus;

typedef enum GirgTopology {
  GIRG_TOPOLOGY_TORUS = 0,
  GIRG_TOPOLOGY_CUBE = 1,
} GirgTopology;

/**
 * Parsed Boolean distance function.
 */
typedef struct GirgDistance GirgDistance;

/**
 * Named feature values of a graph.
 */
typedef struct GirgFeatures GirgFeatures;

/**
 * Undirected simple graph on vertices `0..n`.
 */
typedef struct GirgGraph GirgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Empty after a
 * successful call; valid until the next call on the same thread.
 */
const char *girg_last_error_message(void);

/**
 * Parses `text` (e.g. `"min(x0, max(x1, x2))"`) as a distance on `d` coordinates.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GirgStatus girg_distance_parse(const char *text, size_t d, struct GirgDistance **out);

/**
 * # Safety
 * `spec` must come from [`girg_distance_parse`] and not be used afterwards.
 */
void girg_distance_free(struct GirgDistance *spec);

/**
 * Number of coordinates of `spec`, 0 for a null handle.
 *
 * # Safety
 * `spec` must be null or a live handle.
 */
size_t girg_distance_dim(const struct GirgDistance *spec);

/**
 * Volume of the ball of radius `r` under `spec`.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum GirgStatus girg_distance_volume(const struct GirgDistance *spec, double r, double *out);

/**
 * Samples a GIRG with `n` Pareto(`tau`) weights (minimum 1) and uniform
 * positions, deterministically from `seed`.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum GirgStatus girg_sample_girg(const struct GirgDistance *spec,
                                 enum GirgTopology topology,
                                 size_t n,
                                 double tau,
                                 double alpha,
                                 double c,
                                 uint64_t seed,
                                 struct GirgGraph **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum GirgStatus girg_sample_erdos_renyi(size_t n, double p, uint64_t seed, struct GirgGraph **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum GirgStatus girg_sample_barabasi_albert(size_t n,
                                            size_t k,
                                            uint64_t seed,
                                            struct GirgGraph **out);

/**
 * Builds a graph from `m` edges `(us[i], vs[i])`; loops and repeats are dropped.
 *
 * # Safety
 * `us` and `vs` must each point to `m` readable values (or be null with
 * `m == 0`) and `out` must be a valid pointer.
 */
enum GirgStatus girg_graph_from_edges(size_t n,
                                      const size_t *us,
                                      const size_t *vs,
                                      size_t m,
                                      struct GirgGraph **out);

/**
 * # Safety
 * `graph` must be null or a live handle that is not used afterwards.
 */
void girg_graph_free(struct GirgGraph *graph);

/**
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t girg_graph_num_vertices(const struct GirgGraph *graph);

/**
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t girg_graph_num_edges(const struct GirgGraph *graph);

/**
 * Copies up to `capacity` edges, `us[i] < vs[i]`, in ascending order, and
 * stores the total edge count in `written`.
 *
 * # Safety
 * `graph` must be a live handle; `us` and `vs` must each have room for
 * `capacity` values; `written` must be a valid pointer.
 */
enum GirgStatus girg_graph_edges(const struct GirgGraph *graph,
                                 size_t *us,
                                 size_t *vs,
                                 size_t capacity,
                                 size_t *written);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GirgStatus girg_read_edge_list(const char *path, struct GirgGraph **out);

/**
 * # Safety
 * `graph` must be a live handle and `path` a NUL-terminated string.
 */
enum GirgStatus girg_write_edge_list(const struct GirgGraph *graph, const char *path);

/**
 * Feature vector of the largest connected component of `graph`.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum GirgStatus girg_features_compute(const struct GirgGraph *graph, struct GirgFeatures **out);

/**
 * # Safety
 * `features` must be null or a live handle that is not used afterwards.
 */
void girg_features_free(struct GirgFeatures *features);

/**
 * # Safety
 * `features` must be null or a live handle.
 */
size_t girg_features_len(const struct GirgFeatures *features);

/**
 * Key of entry `i`, owned by the handle; null when out of range.
 *
 * # Safety
 * `features` must be null or a live handle.
 */
const char *girg_features_key(const struct GirgFeatures *features, size_t i);

/**
 * Value of entry `i`. Undefined values (e.g. closeness of a single vertex)
 * are reported as NaN with `defined = false`.
 *
 * # Safety
 * `features` must be a live handle; `value` and `defined` valid pointers.
 */
enum GirgStatus girg_features_value(const struct GirgFeatures *features,
                                    size_t i,
                                    double *value,
                                    bool *defined);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIRG_H */

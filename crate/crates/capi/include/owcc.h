#ifndef OWCC_H
#define OWCC_H

/* Generated by cbindgen from owcc-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. `owcc_last_error` carries the detail text
 * for the most recent failure on the calling thread.
 */
typedef enum {
  OWCC_STATUS_OK = 0,
  OWCC_STATUS_NULL_POINTER = 1,
  OWCC_STATUS_INVALID_UTF8 = 2,
  OWCC_STATUS_IO = 3,
  OWCC_STATUS_PARSE = 4,
  OWCC_STATUS_EMPTY_GRAPH = 5,
  OWCC_STATUS_DATA_MISMATCH = 6,
  OWCC_STATUS_INVALID_CONFIG = 7,
  OWCC_STATUS_UNDEFINED_SCORE = 8,
} OwccStatus;

/**
 * Opaque community cover handle.
 */
typedef struct OwccCover OwccCover;

/**
 * Opaque preprocessed graph handle.
 */
typedef struct OwccGraph OwccGraph;

/**
 * Detection parameters; obtain defaults from `owcc_config_default`.
 */
typedef struct {
  /**
   * Nodes per batch; 1 runs the fully sequential algorithm.
   */
  uintptr_t queue_size;
  /**
   * Worker threads used per batch.
   */
  uintptr_t worker_count;
  /**
   * Relative improvement below which iteration stops (0 < t < 1).
   */
  double wcc_threshold;
  /**
   * Hard iteration cap.
   */
  uintptr_t max_iterations;
  /**
   * Final-cover cleanup: 0 none, 1 drop duplicates, 2 also drop nested.
   */
  int32_t post_process;
} OwccConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail message of the calling thread's most recent failure. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *owcc_last_error(void);

/**
 * Static description of a status code.
 */
const char *owcc_status_message(OwccStatus status);

/**
 * Read an edge list from a file and build the preprocessed graph.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
OwccStatus owcc_graph_read_file(const char *path, OwccGraph **out);

/**
 * Release a graph handle. NULL is ignored.
 *
 * # Safety
 * `graph` must come from this library and not have been freed already.
 */
void owcc_graph_free(OwccGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uintptr_t owcc_graph_node_count(const OwccGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uintptr_t owcc_graph_edge_count(const OwccGraph *graph);

/**
 * Mean local clustering coefficient of the graph.
 *
 * # Safety
 * `graph` must be a live handle.
 */
double owcc_graph_global_cc(const OwccGraph *graph);

/**
 * Default detection parameters: sequential queue, one worker, threshold
 * 0.01, at most 100 iterations, no post-processing.
 */
OwccConfig owcc_config_default(void);

/**
 * Detect overlapping communities; writes a new cover handle to `out`.
 *
 * # Safety
 * All pointers must be valid; `graph` must be a live handle.
 */
OwccStatus owcc_detect(const OwccGraph *graph, const OwccConfig *config, OwccCover **out);

/**
 * Detect starting from an existing cover instead of the greedy
 * self-initialization.
 *
 * # Safety
 * All pointers must be valid live handles; `initial` must belong to `graph`.
 */
OwccStatus owcc_detect_seeded(const OwccGraph *graph,
                              const OwccConfig *config,
                              const OwccCover *initial,
                              OwccCover **out);

/**
 * Release a cover handle. NULL is ignored.
 *
 * # Safety
 * `cover` must come from this library and not have been freed already.
 */
void owcc_cover_free(OwccCover *cover);

/**
 * # Safety
 * `cover` must be a live handle.
 */
uintptr_t owcc_cover_community_count(const OwccCover *cover);

/**
 * Estimator score of the cover against its graph.
 *
 * # Safety
 * Both handles must be live and belong together.
 */
OwccStatus owcc_cover_wcc(const OwccGraph *graph, const OwccCover *cover, double *out);

/**
 * Load a cover file (one community per line, original node IDs).
 *
 * # Safety
 * `graph` must be a live handle, `path` NUL-terminated, `out` valid.
 */
OwccStatus owcc_cover_read_file(const OwccGraph *graph, const char *path, OwccCover **out);

/**
 * Write a cover in the text format (communities in ID order, original node
 * IDs ascending, LF line endings).
 *
 * # Safety
 * Handles must be live and belong together; `path` NUL-terminated.
 */
OwccStatus owcc_cover_write_file(const OwccGraph *graph, const OwccCover *cover, const char *path);

/**
 * Overlapping F1 of `detected` against `truth` (asymmetric best-match
 * average over the detected communities).
 *
 * # Safety
 * All handles must be live and belong to `graph`; `out` must be valid.
 */
OwccStatus owcc_eval_f1(const OwccGraph *graph,
                        const OwccCover *detected,
                        const OwccCover *truth,
                        double *out);

/**
 * Symmetric overlapping NMI distance between the covers (0 identical,
 * 1 maximally dissimilar).
 *
 * # Safety
 * All handles must be live and belong to `graph`; `out` must be valid.
 */
OwccStatus owcc_eval_onmi(const OwccGraph *graph,
                          const OwccCover *detected,
                          const OwccCover *truth,
                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OWCC_H */

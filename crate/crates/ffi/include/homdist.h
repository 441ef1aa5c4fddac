#ifndef HOMDIST_H
#define HOMDIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define HD_OK 0

/**
 * Null pointer, invalid UTF-8 or an unknown enum value.
 */
#define HD_ERR_USAGE 1

#define HD_ERR_PARSE 2

#define HD_ERR_PRECONDITION 3

#define HD_ERR_NONCONVERGENCE 4

#define HD_ERR_INVARIANT 5

/**
 * A Rust panic was caught at the boundary.
 */
#define HD_ERR_PANIC 6

#define HD_KIND_TREE_SPECTRAL 0

#define HD_KIND_TREE_CUT 1

#define HD_KIND_PATH_SPECTRAL 2

#define HD_KIND_CUT 3

#define HD_KIND_COLOR 4

#define HD_BOUND_EXACT 0

#define HD_BOUND_UPPER 1

#define HD_BOUND_ESTIMATE 2

/**
 * A simple undirected graph.
 */
typedef struct HdGraph HdGraph;

/**
 * The result of a distance computation.
 */
typedef struct HdReport HdReport;

/**
 * A weighted graph with positive vertex weights and edge weights in [0, 1].
 */
typedef struct HdWeightedGraph HdWeightedGraph;

typedef struct HdSolverOptions {
  double tol;
  uintptr_t max_iters;
  uintptr_t restarts;
  uint64_t seed;
} HdSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hd_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed at most once.
 */
void hd_string_free(char *s);

/**
 * Parses the `n m` / `u v` edge-list format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
int32_t hd_graph_parse(const char *text_in, struct HdGraph **out);

/**
 * Builds a graph from `m` edges stored as `2m` consecutive vertex indices.
 *
 * # Safety
 * `edges` must point to `2 * m` readable values (or be NULL when `m == 0`).
 */
int32_t hd_graph_from_edges(uintptr_t n, const uintptr_t *edges, uintptr_t m, struct HdGraph **out);

/**
 * # Safety
 * `g` must be NULL or a handle from this library, freed at most once.
 */
void hd_graph_free(struct HdGraph *g);

/**
 * # Safety
 * `g` must be a valid handle.
 */
uintptr_t hd_graph_vertex_count(const struct HdGraph *g);

/**
 * # Safety
 * `g` must be a valid handle.
 */
uintptr_t hd_graph_edge_count(const struct HdGraph *g);

/**
 * Parses the JSON weighted-graph format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
int32_t hd_weighted_parse(const char *text_in, struct HdWeightedGraph **out);

/**
 * # Safety
 * `w` must be NULL or a handle from this library, freed at most once.
 */
void hd_weighted_free(struct HdWeightedGraph *w);

/**
 * # Safety
 * `w` must be a valid handle and `out` a valid pointer.
 */
int32_t hd_weighted_to_json(const struct HdWeightedGraph *w, char **out);

/**
 * The color-refinement quotient of `g`.
 *
 * # Safety
 * `g` must be a valid handle and `out` a valid pointer.
 */
int32_t hd_quotient(const struct HdGraph *g, struct HdWeightedGraph **out);

/**
 * Whether color refinement fails to distinguish `g` and `h`.
 *
 * # Safety
 * `g`, `h` must be valid handles and `out` a valid pointer.
 */
int32_t hd_cr_equivalent(const struct HdGraph *g, const struct HdGraph *h, bool *out);

/**
 * Exact homomorphism count from a tree, written as a rational `p/q` or integer string.
 *
 * # Safety
 * `tree`, `target` must be valid handles and `out` a valid pointer.
 */
int32_t hd_hom_tree(const struct HdGraph *tree, const struct HdWeightedGraph *target, char **out);

struct HdSolverOptions hd_solver_options_default(void);

/**
 * Computes the distance selected by `kind` (`HD_KIND_*`). `options` may be
 * NULL for the defaults. A report is produced even when the solver hits its
 * iteration cap; check `hd_report_converged`.
 *
 * # Safety
 * `g`, `h` must be valid handles, `options` NULL or valid, `out` a valid pointer.
 */
int32_t hd_distance(int32_t kind,
                    const struct HdGraph *g,
                    const struct HdGraph *h,
                    const struct HdSolverOptions *options,
                    struct HdReport **out);

/**
 * # Safety
 * `r` must be NULL or a handle from this library, freed at most once.
 */
void hd_report_free(struct HdReport *r);

/**
 * The reported value, or NaN for a NULL handle.
 *
 * # Safety
 * `r` must be NULL or a valid handle.
 */
double hd_report_value(const struct HdReport *r);

/**
 * # Safety
 * `r` must be NULL or a valid handle.
 */
double hd_report_lower_bound(const struct HdReport *r);

/**
 * One of `HD_BOUND_*`, or -1 for a NULL handle.
 *
 * # Safety
 * `r` must be NULL or a valid handle.
 */
int32_t hd_report_bound(const struct HdReport *r);

/**
 * # Safety
 * `r` must be NULL or a valid handle.
 */
bool hd_report_converged(const struct HdReport *r);

/**
 * # Safety
 * `r` must be a valid handle and `out` a valid pointer.
 */
int32_t hd_report_to_json(const struct HdReport *r, char **out);

/**
 * Certificate CSV with a marginal and residual header line.
 *
 * # Safety
 * `r` must be a valid handle and `out` a valid pointer.
 */
int32_t hd_report_certificate_csv(const struct HdReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMDIST_H */

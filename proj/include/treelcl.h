/* C interface to the tree-LCL toolkit: forest parsing and generation,
 * deterministic MPC-simulated rooting, rake-and-compress decomposition,
 * the generic LCL solver, the solution checker, and the brute-force
 * oracle. All functions are synchronous and thread-compatible (no shared
 * mutable state except the per-thread error string).
 *
 * Conventions: every constructor-style function stores its product through
 * an out-parameter and returns a status code; on failure the out-parameter
 * is set to NULL and tl_last_error() describes the problem. All returned
 * handles must be released with the matching _free function. Strings
 * returned by accessors stay owned by the handle they came from.
 */
#ifndef TREELCL_H
#define TREELCL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tl_forest tl_forest;
typedef struct tl_lcl tl_lcl;
typedef struct tl_result tl_result;

typedef enum {
  TL_OK = 0,
  TL_EPARSE = 1,   /* malformed input text */
  TL_EINVALID = 2, /* structurally valid input outside the supported domain */
  TL_EMEMORY = 3,  /* simulated-cluster memory budget exceeded */
  TL_EUNKNOWN = 4, /* anything else; see tl_last_error() */
} tl_status;

/* Description of the most recent failure on this thread; never NULL. */
const char* tl_last_error(void);

typedef struct {
  double delta;      /* memory exponent of the simulated cluster (0,1) */
  int l;             /* decomposition path-length parameter (>= 1) */
  int use_cluster;   /* 1: run inside the simulated cluster; 0: direct */
  int reverse_order; /* reverse machine evaluation order inside rounds */
  int check_order;   /* double-evaluate rounds and compare outboxes */
  int want_trace;    /* record a per-iteration trace (tl_result_trace) */
} tl_options;

/* delta 0.5, l 4, cluster on, order checks off, no trace. */
tl_options tl_default_options(void);

/* ------------------------------------------------------------- forests */

/* TREE v1 text. */
tl_status tl_forest_parse(const char* text, tl_forest** out);

/* kind: path | star | balanced | caterpillar | random-tree | forest. */
tl_status tl_forest_generate(const char* kind, int n, int max_degree,
                             unsigned long long seed, tl_forest** out);

int tl_forest_nodes(const tl_forest* f);
int tl_forest_edges(const tl_forest* f);

/* TREE v1 text including any input labels carried by the forest. */
tl_status tl_forest_serialize(const tl_forest* f, tl_result** out);

void tl_forest_free(tl_forest* f);

/* ------------------------------------------------------------ problems */

/* LCL v1 text. */
tl_status tl_lcl_parse(const char* text, tl_lcl** out);

/* name: three-coloring | two-coloring | unsatisfiable-edge | free. */
tl_status tl_lcl_builtin(const char* name, int max_degree, tl_lcl** out);

void tl_lcl_free(tl_lcl* lcl);

/* ---------------------------------------------------------- operations */

/* Orients every component; text is ORIENT v1. */
tl_status tl_root(const tl_forest* f, const tl_options* opt, tl_result** out);

/* Layer decomposition; text is DECOMP v1. */
tl_status tl_decompose(const tl_forest* f, const tl_options* opt,
                       tl_result** out);

/* Solves the problem; text is OUT v1 or the single line "no solution".
 * Statistic "solved" is 1 when a labeling was produced. */
tl_status tl_solve(const tl_forest* f, const tl_lcl* lcl,
                   const tl_options* opt, tl_result** out);

/* Validates OUT v1 text against the forest and problem. Statistic "valid"
 * is 1/0; when invalid, the text lists one violation per line. */
tl_status tl_check(const tl_forest* f, const tl_lcl* lcl,
                   const char* out_text, tl_result** out);

/* Exhaustive reference solver; text is OUT v1 or "no solution". */
tl_status tl_oracle(const tl_forest* f, const tl_lcl* lcl, long long budget,
                    tl_result** out);

/* ------------------------------------------------------------- results */

/* Primary text product; never NULL (may be empty). */
const char* tl_result_text(const tl_result* r);

/* Trace CSV when the operation was run with want_trace; else "". */
const char* tl_result_trace(const tl_result* r);

/* Named counters; -1 for unknown keys. Keys by operation:
 *   all cluster runs: rounds, peak_local_words, peak_global_words,
 *                     local_capacity, global_capacity
 *   root:      phases
 *   decompose: layers, phases
 *   solve:     solved, reduce_steps, phase1_iterations, phase2_iterations,
 *              total_links, max_stored_links
 *   check:     valid
 *   oracle:    solved
 */
long long tl_result_stat(const tl_result* r, const char* key);

void tl_result_free(tl_result* r);

#ifdef __cplusplus
}
#endif

#endif /* TREELCL_H */

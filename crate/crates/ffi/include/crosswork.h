/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef CROSSWORK_H
#define CROSSWORK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  CW_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  CW_STATUS_UTF8 = 2,
  /*
   A JSON document or stem string could not be decoded.
   */
  CW_STATUS_PARSE = 3,
  /*
   A precondition of the operation does not hold.
   */
  CW_STATUS_INPUT = 4,
  /*
   An enumeration or fragment cap was reached.
   */
  CW_STATUS_CAP = 5,
  /*
   An internal consistency check failed or the library panicked.
   */
  CW_STATUS_INTERNAL = 6,
} CwStatus;

/*
 An element of a Gamma space.
 */
typedef struct CwGamma CwGamma;

/*
 A solution of the combinatorial-core construction.
 */
typedef struct CwSolution CwSolution;

/*
 A Gamma-approximation table.
 */
typedef struct CwTable CwTable;

/*
 A cross-tree.
 */
typedef struct CwTree CwTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *cw_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string returned through a `char**` out-parameter.
 */
void cw_string_free(char *s);

/*
 Loads a tree from its JSON document. The tree is not validated.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum CwStatus cw_tree_from_json(const char *json, struct CwTree **out);

/*
 # Safety
 `tree` must be null or a handle from this library, not yet freed.
 */
void cw_tree_free(struct CwTree *tree);

/*
 Canonical JSON document of the tree.

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_tree_to_json(const struct CwTree *tree, char **out);

/*
 Writes whether the tree satisfies every shape invariant.

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_tree_is_valid(const struct CwTree *tree, bool *out);

/*
 Number of nodes.

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_tree_len(const struct CwTree *tree, size_t *out);

/*
 Left-fullness of the tree below the pair. `rho` is a word over 0..2,
 `sigma` comma-separated binary words (empty for the empty tuple).

 # Safety
 Strings must be nul-terminated; `tree` live; `out` writable.
 */
enum CwStatus cw_tree_leftfull(const struct CwTree *tree,
                               const char *rho,
                               const char *sigma,
                               bool *out);

/*
 The right-pruned subtree, as a new handle.

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_tree_right_prune(const struct CwTree *tree, struct CwTree **out);

/*
 Runs the construction on a tree that is left-full below its root.

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_solve(const struct CwTree *tree, struct CwSolution **out);

/*
 # Safety
 `sol` must be null or a handle from this library, not yet freed.
 */
void cw_solution_free(struct CwSolution *sol);

/*
 Number of excluded components.

 # Safety
 `sol` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_solution_excluded_count(const struct CwSolution *sol, size_t *out);

/*
 JSON document of the solution.

 # Safety
 `sol` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_solution_to_json(const struct CwSolution *sol, char **out);

/*
 Loads a Gamma-space element from its JSON document.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum CwStatus cw_gamma_from_json(const char *json, struct CwGamma **out);

/*
 # Safety
 `g` must be null or a handle from this library, not yet freed.
 */
void cw_gamma_free(struct CwGamma *g);

/*
 Writes whether the element is a well-formed computation path.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_gamma_is_valid(const struct CwGamma *g, bool *out);

/*
 Writes whether `a` lies below `b`; both must have the same level.

 # Safety
 `a`, `b` must be live handles; `out` must be writable.
 */
enum CwStatus cw_gamma_leq(const struct CwGamma *a, const struct CwGamma *b, bool *out);

/*
 The set of colorings the element denotes, as a JSON array.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_gamma_interpret(const struct CwGamma *g, char **out);

/*
 Length of the longest chain in the level-`m` fragment with child
 indices below `bound` and supports inside `0..=support`.

 # Safety
 `out` must be writable.
 */
enum CwStatus cw_longest_chain(size_t m, uint32_t bound, uint32_t support, size_t *out);

/*
 Loads an approximation table from its JSON document.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum CwStatus cw_table_from_json(const char *json, struct CwTable **out);

/*
 # Safety
 `t` must be null or a handle from this library, not yet freed.
 */
void cw_table_free(struct CwTable *t);

/*
 Diagonalizes against `count` tables and writes the coloring prefix as a
 digit string. The certificate is re-verified before returning.

 # Safety
 `tables` must point to `count` live handles; `out` must be writable.
 */
enum CwStatus cw_diagonalize(const struct CwTable *const *tables, size_t count, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSWORK_H */

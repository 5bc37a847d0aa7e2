#ifndef MIRRORCODE_H
#define MIRRORCODE_H

#include <stddef.h>
#include <stdbool.h>

// Result code of every fallible call.
typedef enum MirrorcodeStatus {
  MIRRORCODE_STATUS_OK = 0,
  MIRRORCODE_STATUS_NULL_POINTER = 1,
  MIRRORCODE_STATUS_INVALID_ARGUMENT = 2,
  MIRRORCODE_STATUS_PARSE = 3,
  MIRRORCODE_STATUS_INFEASIBLE = 4,
  MIRRORCODE_STATUS_SOLVER_FAILURE = 5,
  MIRRORCODE_STATUS_BUFFER_TOO_SMALL = 6,
  MIRRORCODE_STATUS_PANIC = 7,
} MirrorcodeStatus;

// Which program to solve.
typedef enum MirrorcodeProblem {
  MIRRORCODE_PROBLEM_ATOM_SUBSET = 0,
  MIRRORCODE_PROBLEM_SUBSET = 1,
  MIRRORCODE_PROBLEM_CODED = 2,
  MIRRORCODE_PROBLEM_ATOM_CODED = 3,
  MIRRORCODE_PROBLEM_GAP = 4,
} MirrorcodeProblem;

// Opaque network instance.
typedef struct MirrorcodeNetwork MirrorcodeNetwork;

// Opaque solved program.
typedef struct MirrorcodeSolution MirrorcodeSolution;

// Coded and uncoded optima with the gap bounds. `three_source_bound` is NaN
// unless the instance has exactly three sources.
typedef struct MirrorcodeGap {
  double coded;
  double subset;
  double gap_lp;
  double greedy;
  double three_source_bound;
} MirrorcodeGap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *mirrorcode_last_error(void);

// Library version as a static NUL-terminated string.
const char *mirrorcode_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void mirrorcode_string_free(char *s);

// Parses an instance from its text form.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum MirrorcodeStatus mirrorcode_network_parse(const char *text, struct MirrorcodeNetwork **out);

// Loads a built-in instance: `"butterfly"` or `"fig5"`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum MirrorcodeStatus mirrorcode_network_fixture(const char *name, struct MirrorcodeNetwork **out);

// # Safety
// `net` must come from this library and not have been freed already. Null is ignored.
void mirrorcode_network_free(struct MirrorcodeNetwork *net);

// # Safety
// `net` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_network_source_count(const struct MirrorcodeNetwork *net,
                                                      size_t *out);

// Canonical text form of the instance; release with [`mirrorcode_string_free`].
//
// # Safety
// `net` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_network_serialize(const struct MirrorcodeNetwork *net, char **out);

// Solves `problem` on `net`, in exact rational arithmetic when `exact` is set.
//
// # Safety
// `net` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_solve(const struct MirrorcodeNetwork *net,
                                       enum MirrorcodeProblem problem,
                                       bool exact,
                                       struct MirrorcodeSolution **out);

// # Safety
// `sol` must come from this library and not have been freed already. Null is ignored.
void mirrorcode_solution_free(struct MirrorcodeSolution *sol);

// # Safety
// `sol` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_solution_objective(const struct MirrorcodeSolution *sol,
                                                    double *out);

// Copies the atom measures (canonical order; none for the coded program)
// into `buf`. `needed`, when non-null, receives the count even on failure.
//
// # Safety
// `sol` must be a live handle; `buf` must hold `len` doubles.
enum MirrorcodeStatus mirrorcode_solution_atoms(const struct MirrorcodeSolution *sol,
                                                double *buf,
                                                size_t len,
                                                size_t *needed);

// Copies the per-source stored amounts into `buf`.
//
// # Safety
// `sol` must be a live handle; `buf` must hold `len` doubles.
enum MirrorcodeStatus mirrorcode_solution_storage(const struct MirrorcodeSolution *sol,
                                                  double *buf,
                                                  size_t len,
                                                  size_t *needed);

// `key=value` report; release with [`mirrorcode_string_free`].
//
// # Safety
// `sol` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_solution_report(const struct MirrorcodeSolution *sol, char **out);

// Solves the coded, uncoded and gap programs plus the greedy bound.
//
// # Safety
// `net` must be a live handle; `out` must be writable.
enum MirrorcodeStatus mirrorcode_gap(const struct MirrorcodeNetwork *net,
                                     struct MirrorcodeGap *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIRRORCODE_H */

#ifndef DGCELL_H
#define DGCELL_H

/* Generated by cbindgen. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum DgcellOrderKind {
  DGCELL_ORDER_KIND_WEAK = 0,
  DGCELL_ORDER_KIND_STRONG = 1,
  DGCELL_ORDER_KIND_TRI = 2,
} DgcellOrderKind;

typedef enum DgcellSide {
  DGCELL_SIDE_LEFT = 0,
  DGCELL_SIDE_RIGHT = 1,
  DGCELL_SIDE_TWO_SIDED = 2,
} DgcellSide;

/**
 * Result codes. `Contradiction` still delivers a report.
 */
typedef enum DgcellStatus {
  DGCELL_STATUS_OK = 0,
  DGCELL_STATUS_CONTRADICTION = 1,
  DGCELL_STATUS_INPUT_ERROR = 2,
  DGCELL_STATUS_NULL_POINTER = 3,
  DGCELL_STATUS_INVALID_UTF8 = 4,
  DGCELL_STATUS_UNKNOWN_CELL = 5,
  DGCELL_STATUS_UNKNOWN_GENERATOR = 6,
  DGCELL_STATUS_UNSUPPORTED = 7,
  DGCELL_STATUS_PANIC = 8,
} DgcellStatus;

/**
 * Parsed and validated algebra.
 */
typedef struct DgcellAlgebra DgcellAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dgcell_version(void);

/**
 * Message for the last failure on this thread. Valid until the next call
 * on the same thread.
 */
const char *dgcell_last_error(void);

/**
 * Parse and validate a TOML algebra description.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum DgcellStatus dgcell_algebra_parse(const char *text, struct DgcellAlgebra **out);

/**
 * Release a handle from [`dgcell_algebra_parse`]. Null is ignored.
 *
 * # Safety
 * `alg` must come from [`dgcell_algebra_parse`] and not be freed twice.
 */
void dgcell_algebra_free(struct DgcellAlgebra *alg);

/**
 * Dimension of the algebra, 0 for a null handle.
 *
 * # Safety
 * `alg` must be null or a live handle.
 */
uintptr_t dgcell_algebra_dim(const struct DgcellAlgebra *alg);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void dgcell_string_free(char *s);

/**
 * Validation summary as JSON.
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
enum DgcellStatus dgcell_validate(const struct DgcellAlgebra *alg, uint64_t seed, char **out);

/**
 * Cell structure as JSON. `weak_only` skips the bounded searches.
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
enum DgcellStatus dgcell_cells(const struct DgcellAlgebra *alg,
                               uint32_t depth,
                               bool weak_only,
                               uint64_t seed,
                               char **out);

/**
 * Maximal dg ideals of a cell's 2-representation as JSON.
 *
 * # Safety
 * `alg` must be a live handle, `cell` NUL-terminated and `out` writable.
 */
enum DgcellStatus dgcell_maxspec(const struct DgcellAlgebra *alg,
                                 const char *cell,
                                 uint64_t seed,
                                 char **out);

/**
 * Cell 2-representation descriptor for the `ideal`-th maximal ideal.
 *
 * # Safety
 * `alg` must be a live handle, `cell` NUL-terminated and `out` writable.
 */
enum DgcellStatus dgcell_cellrep(const struct DgcellAlgebra *alg,
                                 const char *cell,
                                 uint32_t ideal,
                                 uint64_t seed,
                                 char **out);

/**
 * Compare two generators, e.g. `"Id:1"` and `"P:e1,e2"`.
 *
 * # Safety
 * `alg` must be a live handle, `lhs`/`rhs` NUL-terminated and `out` writable.
 */
enum DgcellStatus dgcell_order(const struct DgcellAlgebra *alg,
                               enum DgcellOrderKind kind,
                               enum DgcellSide side,
                               const char *lhs,
                               const char *rhs,
                               uint32_t depth,
                               uint64_t seed,
                               char **out);

/**
 * Full classification with cross-checks as JSON.
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
enum DgcellStatus dgcell_verify(const struct DgcellAlgebra *alg,
                                uint32_t depth,
                                uint64_t seed,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGCELL_H */

#ifndef QUATRANK_H
#define QUATRANK_H

/* Generated by cbindgen from the quatrank-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrSolveMode {
  /**
   * Every free block of the general solution set to zero.
   */
  QR_SOLVE_MODE_PARTICULAR = 0,
  QR_SOLVE_MODE_MIN_RANK_X = 1,
  QR_SOLVE_MODE_MIN_RANK_Y = 2,
} QrSolveMode;

typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_INVALID_UTF8 = 2,
  QR_STATUS_PARSE = 3,
  QR_STATUS_DIMENSION_MISMATCH = 4,
  QR_STATUS_PRECONDITION_VIOLATED = 5,
  /**
   * The equation has no solution.
   */
  QR_STATUS_INCONSISTENT = 6,
  /**
   * A witness failed to reach its closed-form rank, or a result failed
   * verification.
   */
  QR_STATUS_VERIFICATION_FAILED = 7,
  QR_STATUS_INTERNAL = 8,
  QR_STATUS_IO = 9,
  QR_STATUS_ZERO_INVERSE = 10,
  QR_STATUS_INDEX_OUT_OF_RANGE = 11,
  /**
   * A Rust panic was caught at the boundary.
   */
  QR_STATUS_PANIC = 12,
} QrStatus;

/**
 * Opaque matrix handle.
 */
typedef struct QrMatrix QrMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on the calling thread, or null if
 * nothing has failed yet. The pointer stays valid until the next failing
 * call on the same thread and must not be freed.
 */
const char *qr_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed yet.
 */
void qr_string_free(char *s);

/**
 * Creates a `rows × cols` zero matrix.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QrStatus qr_matrix_new(size_t rows, size_t cols, struct QrMatrix **out);

/**
 * Parses a JSON matrix document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be valid for writing.
 */
enum QrStatus qr_matrix_from_json(const char *json, struct QrMatrix **out);

/**
 * Serializes a matrix as a JSON document; free the result with
 * [`qr_string_free`].
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writing.
 */
enum QrStatus qr_matrix_to_json(const struct QrMatrix *m, char **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must be null or a live handle from this library.
 */
void qr_matrix_free(struct QrMatrix *m);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t qr_matrix_rows(const struct QrMatrix *m);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t qr_matrix_cols(const struct QrMatrix *m);

/**
 * Sets entry `(i, j)` from a quaternion literal.
 *
 * # Safety
 * `m` must be a live handle; `literal` must be a nul-terminated string.
 */
enum QrStatus qr_matrix_set(struct QrMatrix *m, size_t i, size_t j, const char *literal);

/**
 * Entry `(i, j)` in canonical literal form; free with [`qr_string_free`].
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writing.
 */
enum QrStatus qr_matrix_get(const struct QrMatrix *m, size_t i, size_t j, char **out);

/**
 * Quaternion rank.
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writing.
 */
enum QrStatus qr_rank(const struct QrMatrix *m, size_t *out);

/**
 * Whether `B·X·D + C·Y·E = A` has a solution.
 *
 * # Safety
 * All handles must be live; `out` must be valid for writing.
 */
enum QrStatus qr_is_consistent(const struct QrMatrix *a,
                               const struct QrMatrix *b,
                               const struct QrMatrix *c,
                               const struct QrMatrix *d,
                               const struct QrMatrix *e,
                               bool *out);

/**
 * Solves `B·X·D + C·Y·E = A`, returning new handles for `X` and `Y`. An
 * unsolvable equation gives `QR_STATUS_INCONSISTENT` and names the failing
 * rank equality in the error message.
 *
 * # Safety
 * All handles must be live; `x_out` and `y_out` must be valid for writing.
 */
enum QrStatus qr_solve(const struct QrMatrix *a,
                       const struct QrMatrix *b,
                       const struct QrMatrix *c,
                       const struct QrMatrix *d,
                       const struct QrMatrix *e,
                       enum QrSolveMode mode,
                       struct QrMatrix **x_out,
                       struct QrMatrix **y_out);

/**
 * Maximal and minimal rank of `A − B·X·D − C·Y·E`.
 *
 * # Safety
 * All handles must be live; `max_out` and `min_out` must be valid for
 * writing.
 */
enum QrStatus qr_extremal_p(const struct QrMatrix *a,
                            const struct QrMatrix *b,
                            const struct QrMatrix *c,
                            const struct QrMatrix *d,
                            const struct QrMatrix *e,
                            size_t *max_out,
                            size_t *min_out);

/**
 * Simultaneous decomposition as a JSON document, produced only after it
 * passes verification. Free the result with [`qr_string_free`].
 *
 * # Safety
 * All handles must be live; `out` must be valid for writing.
 */
enum QrStatus qr_decompose_json(const struct QrMatrix *a,
                                const struct QrMatrix *b,
                                const struct QrMatrix *c,
                                const struct QrMatrix *d,
                                const struct QrMatrix *e,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUATRANK_H */

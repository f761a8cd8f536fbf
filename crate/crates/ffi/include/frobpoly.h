#ifndef FROBPOLY_H
#define FROBPOLY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FrobpolyStatus {
  FROBPOLY_STATUS_OK = 0,
  FROBPOLY_STATUS_NULL_POINTER = 1,
  FROBPOLY_STATUS_BUFFER_TOO_SMALL = 2,
  FROBPOLY_STATUS_TOO_LONG = 3,
  FROBPOLY_STATUS_INVALID_ARGUMENT = 4,
  FROBPOLY_STATUS_PANIC = 5,
} FrobpolyStatus;

/**
 * Field selection for [`frobpoly_multiplier_new`].
 */
typedef enum FrobpolyField {
  FROBPOLY_FIELD_AUTO = 0,
  FROBPOLY_FIELD_GF64 = 64,
  FROBPOLY_FIELD_GF128 = 128,
} FrobpolyField;

/**
 * Opaque multiplier handle.
 */
typedef struct FrobpolyMultiplier FrobpolyMultiplier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a multiplier. `field` is one of the [`FrobpolyField`] values:
 * 0 picks the field per input size, 64 and 128 force one.
 * On success `*out` receives a handle to release with
 * [`frobpoly_multiplier_free`].
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum FrobpolyStatus frobpoly_multiplier_new(uint32_t field, struct FrobpolyMultiplier **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must be null or come from [`frobpoly_multiplier_new`], and must
 * not be used afterwards.
 */
void frobpoly_multiplier_free(struct FrobpolyMultiplier *handle);

/**
 * Number of output words [`frobpoly_mul`] needs for operands of the given
 * bit lengths.
 */
size_t frobpoly_product_words(size_t a_bits, size_t b_bits);

/**
 * Computes `a * b`.
 *
 * The product has `a_bits + b_bits - 1` bits (0 if either operand is
 * empty); that length is stored in `*out_bits` and the words written to
 * `out`. Unused high bits of the last word are zero. If `out_words` is too
 * small, nothing is written to `out`, `*out_bits` still receives the
 * required length, and `FROBPOLY_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `handle` must be a live handle. `a` and `b` must point to enough words
 * for their bit lengths (null is allowed for a length of 0). `out` must be
 * valid for `out_words` writes (null if `out_words` is 0), and `out_bits`
 * must be valid for one write.
 */
enum FrobpolyStatus frobpoly_mul(const struct FrobpolyMultiplier *handle,
                                 const uint64_t *a,
                                 size_t a_bits,
                                 const uint64_t *b,
                                 size_t b_bits,
                                 uint64_t *out,
                                 size_t out_words,
                                 size_t *out_bits);

/**
 * Static, NUL-terminated description of a status code. Unknown codes
 * get a generic message.
 */
const char *frobpoly_status_message(int status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FROBPOLY_H */

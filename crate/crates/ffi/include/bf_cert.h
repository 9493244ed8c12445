#ifndef BF_CERT_H
#define BF_CERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every `bfc_*` function.
 */
typedef enum BfcStatus {
  BFC_STATUS_OK = 0,
  BFC_STATUS_NULL_POINTER = 1,
  BFC_STATUS_INVALID_SPEC = 2,
  BFC_STATUS_DIMENSION = 3,
  BFC_STATUS_CONFIG = 4,
  BFC_STATUS_DOMAIN = 5,
  BFC_STATUS_GUARD = 6,
  BFC_STATUS_PRECONDITION = 7,
  BFC_STATUS_NO_KEY = 8,
  BFC_STATUS_IO = 9,
  BFC_STATUS_UTF8 = 10,
  BFC_STATUS_PANIC = 11,
} BfcStatus;

/**
 * Opaque parity-check matrix.
 */
typedef struct BfcCode BfcCode;

/**
 * One-iteration correction capability of a code.
 */
typedef struct BfcCapability {
  uint64_t n;
  uint64_t v_star;
  uint64_t delta;
  /**
   * Majority-logic radius; `u64::MAX` when unbounded.
   */
  uint64_t t_majority;
  uint64_t t_mu;
  /**
   * Smallest and largest threshold that guarantees correction of `t_mu`
   * errors; both zero when `t_mu` is zero.
   */
  uint64_t b_lo;
  uint64_t b_hi;
} BfcCapability;

/**
 * A DFR bound. `log2_bound` is `-inf` when the bound is exactly zero.
 */
typedef struct BfcBound {
  uint64_t t;
  uint64_t b;
  double log2_bound;
  uint64_t numerator_bits;
} BfcBound;

typedef struct BfcDfrEstimate {
  uint64_t trials;
  uint64_t failures;
  double p_hat;
  double std_err;
} BfcDfrEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failing call on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bfc_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void bfc_string_free(char *s);

/**
 * Builds a code from a JSON code spec.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BfcStatus bfc_code_from_json(const char *json, struct BfcCode **out);

/**
 * Builds one of the bundled codes (`"C0"` to `"C8"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum BfcStatus bfc_code_builtin(const char *name, struct BfcCode **out);

/**
 * Builds the two-circulant code `[H0 | H1]` of circulant size `p` from the
 * first-column supports of both blocks.
 *
 * # Safety
 * `s0`/`s1` must point to `len0`/`len1` readable values; `out` must be
 * writable.
 */
enum BfcStatus bfc_code_qc2(size_t p,
                            const size_t *s0,
                            size_t len0,
                            const size_t *s1,
                            size_t len1,
                            struct BfcCode **out);

/**
 * Releases a code handle. Null is ignored.
 *
 * # Safety
 * `code` must come from a `bfc_code_*` constructor and not have been freed.
 */
void bfc_code_free(struct BfcCode *code);

/**
 * Code length; zero for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t bfc_code_n(const struct BfcCode *code);

/**
 * Number of parity checks; zero for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t bfc_code_r(const struct BfcCode *code);

/**
 * Tanner-graph girth. When no cycle up to the search cutoff exists,
 * `*exact` is set to 0 and `*girth_out` holds the lower bound.
 *
 * # Safety
 * `code` must be a live handle; the out pointers must be writable.
 */
enum BfcStatus bfc_code_girth(const struct BfcCode *code, uint32_t *girth_out, bool *exact);

/**
 * # Safety
 * `code` must be a live handle; `out` must be writable.
 */
enum BfcStatus bfc_capability(const struct BfcCode *code, struct BfcCapability *out);

/**
 * Failure-rate bound at error weight `t` and uniform threshold `b`. The QC
 * fast path is used for two-circulant codes. When `numerator` is non-null
 * it receives the exact unclamped numerator in decimal.
 *
 * # Safety
 * `code` must be a live handle; `out` must be writable; `numerator` must be
 * null or writable.
 */
enum BfcStatus bfc_bound(const struct BfcCode *code,
                         uint64_t t,
                         uint64_t b,
                         struct BfcBound *out,
                         char **numerator);

/**
 * Like `bfc_bound`, with the threshold chosen to minimize the bound.
 *
 * # Safety
 * As for `bfc_bound`.
 */
enum BfcStatus bfc_bound_optimized(const struct BfcCode *code,
                                   uint64_t t,
                                   struct BfcBound *out,
                                   char **numerator);

/**
 * One bit-flipping iteration with uniform threshold `b` on the error with
 * support `error[0..len]`. `*decoded` is set when the decoder output equals
 * the error exactly.
 *
 * # Safety
 * `code` must be a live handle; `error` must point to `len` readable
 * values; `decoded` must be writable.
 */
enum BfcStatus bfc_decode(const struct BfcCode *code,
                          const size_t *error,
                          size_t len,
                          uint64_t b,
                          bool *decoded);

/**
 * Monte Carlo DFR estimate at weight `t`, threshold `b`. Stops after 100
 * failures or `max_trials` trials. `workers == 0` uses the global pool.
 *
 * # Safety
 * `code` must be a live handle; `out` must be writable.
 */
enum BfcStatus bfc_estimate_dfr(const struct BfcCode *code,
                                size_t t,
                                uint64_t b,
                                uint64_t max_trials,
                                uint64_t seed,
                                size_t workers,
                                struct BfcDfrEstimate *out);

/**
 * Number of size-`m` subsets of `values[0..len]` whose sum exceeds `alpha`,
 * written as a decimal string.
 *
 * # Safety
 * `values` must point to `len` readable values; `out` must be writable.
 */
enum BfcStatus bfc_count_exceeding(const int64_t *values,
                                   size_t len,
                                   uint64_t m,
                                   uint64_t alpha,
                                   char **out);

/**
 * Rejection-samples a two-circulant key whose certified bound at weight `t`
 * is below `2^target_log2`. `b == 0` optimizes the threshold per key. The
 * key record is written as JSON.
 *
 * # Safety
 * `out` must be writable.
 */
enum BfcStatus bfc_keygen(size_t p,
                          size_t v,
                          uint64_t t,
                          int64_t target_log2,
                          uint64_t b,
                          uint64_t max_attempts,
                          uint64_t seed,
                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BF_CERT_H */

#ifndef SEQSPACE_H
#define SEQSPACE_H

#include <stddef.h>
#include <stdint.h>

/**
 * Values accepted by the `mode` parameters.
 */
typedef enum {
  SEQSPACE_MODE_FLOAT = 0,
  SEQSPACE_MODE_RATIONAL = 1,
} SeqspaceMode;

/**
 * Values accepted by the `space` parameter of [`seqspace_membership`].
 */
typedef enum {
  SEQSPACE_SPACE_ELLP = 0,
  SEQSPACE_SPACE_ELL_LAMBDA = 1,
  SEQSPACE_SPACE_C0_LAMBDA = 2,
} SeqspaceSpace;

typedef enum {
  SEQSPACE_STATUS_OK = 0,
  SEQSPACE_STATUS_NULL_POINTER = 1,
  SEQSPACE_STATUS_INVALID_UTF8 = 2,
  SEQSPACE_STATUS_PARSE_ERROR = 3,
  SEQSPACE_STATUS_INVALID_INPUT = 4,
  SEQSPACE_STATUS_HYPOTHESIS_VIOLATED = 5,
  SEQSPACE_STATUS_UNSUPPORTED = 6,
  SEQSPACE_STATUS_BUFFER_TOO_SMALL = 7,
  SEQSPACE_STATUS_PANIC = 8,
} SeqspaceStatus;

/**
 * Values accepted by the `target` parameter of [`seqspace_classify_json`].
 */
typedef enum {
  SEQSPACE_TARGET_LQ = 0,
  SEQSPACE_TARGET_C0Q = 1,
  SEQSPACE_TARGET_CQ = 2,
  SEQSPACE_TARGET_LINF_Q = 3,
} SeqspaceTarget;

typedef enum {
  SEQSPACE_VERDICT_CONVERGENT_NUMERIC = 0,
  SEQSPACE_VERDICT_DIVERGENT_NUMERIC = 1,
  SEQSPACE_VERDICT_INCONCLUSIVE = 2,
} SeqspaceVerdict;

typedef struct SeqspaceExponents SeqspaceExponents;

typedef struct SeqspaceLambda SeqspaceLambda;

typedef struct SeqspaceMatrix SeqspaceMatrix;

typedef struct SeqspaceSequence SeqspaceSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or NULL after a successful call.
 * The pointer stays valid until the next library call on this thread.
 */
const char *seqspace_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *seqspace_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void seqspace_string_free(char *s);

/**
 * Parses a λ generator (expression, list shorthand or JSON).
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
SeqspaceStatus seqspace_lambda_parse(const char *spec, SeqspaceLambda **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`seqspace_lambda_parse`] not yet freed.
 */
void seqspace_lambda_free(SeqspaceLambda *h);

/**
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
SeqspaceStatus seqspace_sequence_parse(const char *spec, SeqspaceSequence **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`seqspace_sequence_parse`] not yet freed.
 */
void seqspace_sequence_free(SeqspaceSequence *h);

/**
 * Parses an exponent sequence. A NaN `bound` means no declared bound,
 * which is accepted only when one can be inferred from the spec.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
SeqspaceStatus seqspace_exponents_parse(const char *spec, double bound, SeqspaceExponents **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`seqspace_exponents_parse`] not yet freed.
 */
void seqspace_exponents_free(SeqspaceExponents *h);

/**
 * Parses a matrix spec. `lambda` may be NULL unless the spec is `lambda`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string, `lambda` NULL or a live handle,
 * and `out` a writable pointer.
 */
SeqspaceStatus seqspace_matrix_parse(const char *spec,
                                     const SeqspaceLambda *lambda,
                                     SeqspaceMatrix **out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`seqspace_matrix_parse`] not yet freed.
 */
void seqspace_matrix_free(SeqspaceMatrix *h);

/**
 * Writes (Λx)_0..=(Λx)_horizon into `out`, which must hold `horizon + 1`
 * doubles.
 *
 * # Safety
 * Handles must be live and `out` must point to `out_len` writable doubles.
 */
SeqspaceStatus seqspace_transform(const SeqspaceLambda *lambda,
                                  const SeqspaceSequence *x,
                                  size_t horizon,
                                  double *out,
                                  size_t out_len);

/**
 * Writes (Λ⁻¹y)_0..=(Λ⁻¹y)_horizon into `out`.
 *
 * # Safety
 * As for [`seqspace_transform`].
 */
SeqspaceStatus seqspace_inverse(const SeqspaceLambda *lambda,
                                const SeqspaceSequence *y,
                                size_t horizon,
                                double *out,
                                size_t out_len);

/**
 * Writes S(x)_0..=S(x)_horizon into `out`.
 *
 * # Safety
 * As for [`seqspace_transform`].
 */
SeqspaceStatus seqspace_s_operator(const SeqspaceLambda *lambda,
                                   const SeqspaceSequence *x,
                                   size_t horizon,
                                   double *out,
                                   size_t out_len);

/**
 * Exact Λx as a JSON array of rational strings ("p/q" or "p").
 *
 * # Safety
 * Handles must be live and `out_json` writable; free the result with
 * [`seqspace_string_free`].
 */
SeqspaceStatus seqspace_transform_exact(const SeqspaceLambda *lambda,
                                        const SeqspaceSequence *x,
                                        size_t horizon,
                                        char **out_json);

/**
 * Exact Λ⁻¹y as a JSON array of rational strings.
 *
 * # Safety
 * As for [`seqspace_transform_exact`].
 */
SeqspaceStatus seqspace_inverse_exact(const SeqspaceLambda *lambda,
                                      const SeqspaceSequence *y,
                                      size_t horizon,
                                      char **out_json);

/**
 * Membership verdict for `x` in the space selected by `space` (a
 * [`SeqspaceSpace`] value). `lambda` may be NULL for ℓ(p). `out_estimate`
 * receives the paranorm estimate, or NaN for c₀(λ, p). Either output
 * pointer may be NULL. Default thresholds apply.
 *
 * # Safety
 * Handles must be live; output pointers must be NULL or writable.
 */
SeqspaceStatus seqspace_membership(const SeqspaceSequence *x,
                                   int space,
                                   const SeqspaceLambda *lambda,
                                   const SeqspaceExponents *p,
                                   size_t horizon,
                                   int mode,
                                   SeqspaceVerdict *out_verdict,
                                   double *out_estimate);

/**
 * Classification report for `A` against `target` (a [`SeqspaceTarget`]
 * value), serialized as JSON.
 *
 * # Safety
 * Handles must be live and `out_json` writable; free the result with
 * [`seqspace_string_free`].
 */
SeqspaceStatus seqspace_classify_json(const SeqspaceMatrix *matrix,
                                      const SeqspaceLambda *lambda,
                                      const SeqspaceExponents *p,
                                      const SeqspaceExponents *q,
                                      int target,
                                      size_t horizon,
                                      int mode,
                                      char **out_json);

/**
 * sup over finite subsets F of |Σ_{k∈F} column_k|.
 *
 * # Safety
 * `column` must point to `len` readable doubles (or be NULL with `len` 0);
 * `out` must be writable.
 */
SeqspaceStatus seqspace_subset_sup(const double *column, size_t len, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SEQSPACE_H */

#ifndef LEIBNIZ_H
#define LEIBNIZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LbzClassification {
  LBZ_CLASSIFICATION_ZERO = 0,
  LBZ_CLASSIFICATION_INFINITESIMAL = 1,
  LBZ_CLASSIFICATION_APPRECIABLE = 2,
  LBZ_CLASSIFICATION_INFINITE = 3,
} LbzClassification;

typedef enum LbzStatus {
  LBZ_STATUS_OK = 0,
  LBZ_STATUS_NULL_POINTER = 1,
  LBZ_STATUS_INVALID_UTF8 = 2,
  LBZ_STATUS_INVALID_ARGUMENT = 3,
  LBZ_STATUS_SYNTAX_ERROR = 4,
  LBZ_STATUS_UNBOUND_VARIABLE = 5,
  LBZ_STATUS_DIVISION_BY_ZERO = 6,
  LBZ_STATUS_NEGATIVE_LEADING_COEFFICIENT = 7,
  LBZ_STATUS_IRRATIONAL_SQUARE_ROOT = 8,
  LBZ_STATUS_INFINITE_OPERAND = 9,
  LBZ_STATUS_PRECISION_EXHAUSTED = 10,
  LBZ_STATUS_NOT_FINITE = 11,
  LBZ_STATUS_NOT_RATIONAL = 12,
  /**
   * The computation finished but a checked claim does not hold; the
   * result is still written.
   */
  LBZ_STATUS_CHECK_FAILED = 13,
  LBZ_STATUS_PANIC = 14,
} LbzStatus;

/**
 * Opaque variable environment used by evaluation.
 */
typedef struct LbzBindings LbzBindings;

/**
 * Opaque series value.
 */
typedef struct LbzNumber LbzNumber;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread, or an empty
 * string. Valid until the next call into this library on the same thread.
 */
const char *lbz_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lbz_string_free(char *s);

/**
 * The real number `num/den`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LbzStatus lbz_number_real(int64_t num,
                               int64_t den,
                               uint32_t precision,
                               struct LbzNumber **out);

/**
 * `(coef_num/coef_den)·eps^(exp_num/exp_den)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LbzStatus lbz_number_monomial(int64_t coef_num,
                                   int64_t coef_den,
                                   int64_t exp_num,
                                   int64_t exp_den,
                                   uint32_t precision,
                                   struct LbzNumber **out);

/**
 * The positive infinitesimal unit. Returns null for a precision below 2.
 */
struct LbzNumber *lbz_number_eps(uint32_t precision);

/**
 * The infinite unit `H = 1/eps`. Returns null for a precision below 2.
 */
struct LbzNumber *lbz_number_h(uint32_t precision);

/**
 * # Safety
 * `n` must be a live handle.
 */
struct LbzNumber *lbz_number_clone(const struct LbzNumber *n);

/**
 * # Safety
 * `n` must be null or a handle from this library, not yet freed.
 */
void lbz_number_free(struct LbzNumber *n);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum LbzStatus lbz_number_add(const struct LbzNumber *a,
                              const struct LbzNumber *b,
                              struct LbzNumber **out);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum LbzStatus lbz_number_sub(const struct LbzNumber *a,
                              const struct LbzNumber *b,
                              struct LbzNumber **out);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum LbzStatus lbz_number_mul(const struct LbzNumber *a,
                              const struct LbzNumber *b,
                              struct LbzNumber **out);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum LbzStatus lbz_number_div(const struct LbzNumber *a,
                              const struct LbzNumber *b,
                              struct LbzNumber **out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_neg(const struct LbzNumber *a, struct LbzNumber **out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_sqrt(const struct LbzNumber *a, struct LbzNumber **out);

/**
 * Writes -1, 0 or 1.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum LbzStatus lbz_number_compare(const struct LbzNumber *a,
                                  const struct LbzNumber *b,
                                  int32_t *out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_classify(const struct LbzNumber *a, enum LbzClassification *out);

/**
 * The shadow as `p/q` text.
 *
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_standard_part(const struct LbzNumber *a, char **out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_to_string(const struct LbzNumber *a, char **out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for writes.
 */
enum LbzStatus lbz_number_to_json(const struct LbzNumber *a, char **out);

/**
 * An empty environment. Returns null for a precision below 2.
 */
struct LbzBindings *lbz_bindings_new(uint32_t precision);

/**
 * # Safety
 * `b` must be null or a handle from this library, not yet freed.
 */
void lbz_bindings_free(struct LbzBindings *b);

/**
 * Binds `name` to a copy of `value`.
 *
 * # Safety
 * `b` and `value` must be live handles; `name` a nul-terminated string.
 */
enum LbzStatus lbz_bindings_set(struct LbzBindings *b,
                                const char *name,
                                const struct LbzNumber *value);

/**
 * Evaluates an expression. `bindings` may be null for the empty
 * environment at the default precision.
 *
 * # Safety
 * `expr` must be a nul-terminated string, `bindings` null or live, and
 * `out` valid for writes.
 */
enum LbzStatus lbz_eval(const char *expr,
                        const struct LbzBindings *bindings,
                        struct LbzNumber **out);

/**
 * Derivative of `expr` in `var` at the rational `point` (`p`, `p/q` or a
 * decimal), as JSON `{"quotient", "shadow", "discarded"}`.
 *
 * # Safety
 * String arguments must be nul-terminated, `bindings` null or live, and
 * `out` valid for writes.
 */
enum LbzStatus lbz_derivative_at_json(const char *expr,
                                      const char *var,
                                      const char *point,
                                      const struct LbzBindings *bindings,
                                      char **out);

/**
 * Runs a worked example by id (`parallel_lines`, `infinitesimal_equality`,
 * `ellipse_parabola`, `product_rule`) and writes its report as JSON. A
 * report with a failing claim is written and `CheckFailed` returned.
 *
 * # Safety
 * `example` must be a nul-terminated string and `out` valid for writes.
 */
enum LbzStatus lbz_gallery_json(const char *example, uint32_t precision, char **out);

/**
 * Checks `lhs == rhs` as a rational identity and writes the transfer
 * report as JSON. A failed identity is written and `CheckFailed` returned.
 *
 * # Safety
 * String arguments must be nul-terminated and `out` valid for writes.
 */
enum LbzStatus lbz_transfer_json(const char *lhs,
                                 const char *rhs,
                                 uint32_t trials,
                                 uint64_t seed,
                                 uint32_t precision,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEIBNIZ_H */

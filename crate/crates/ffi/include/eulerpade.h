#ifndef EULERPADE_H
#define EULERPADE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `EP_UNDETERMINED` is not a failure: the output is written.
 */
typedef enum EpStatus {
  EP_OK = 0,
  EP_UNDETERMINED = 1,
  EP_NULL_POINTER = 2,
  EP_INVALID_UTF8 = 3,
  EP_PARSE = 4,
  EP_INVALID_INPUT = 5,
  EP_FIELD_MISMATCH = 6,
  EP_DIVISION_BY_ZERO = 7,
  EP_INVALID_PRIME = 8,
  EP_NOT_INTEGRAL = 9,
  EP_PRECISION = 10,
  EP_DOMAIN = 11,
  EP_PANIC = 99,
} EpStatus;

/**
 * Arithmetic operation selector for `ep_element_arith`.
 */
typedef enum EpOp {
  EP_ADD = 0,
  EP_SUB = 1,
  EP_MUL = 2,
  EP_DIV = 3,
} EpOp;

/**
 * Opaque field element.
 */
typedef struct EpElement EpElement;

/**
 * Opaque number field `Q` or `Q(sqrt d)`.
 */
typedef struct EpField EpField;

/**
 * Opaque Padé system.
 */
typedef struct EpPadeSystem EpPadeSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ep_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ep_string_free(char *s);

/**
 * `Q` when `rational` is nonzero, otherwise `Q(sqrt d)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EpStatus ep_field_new(int64_t d, int32_t rational, struct EpField **out);

/**
 * # Safety
 * `f` must come from `ep_field_new` (or be NULL).
 */
void ep_field_free(struct EpField *f);

/**
 * Parses `"x"` or `"x,y"` (meaning `x + y sqrt d`).
 *
 * # Safety
 * Pointers must be valid; `text` NUL-terminated.
 */
enum EpStatus ep_element_parse(const struct EpField *field,
                               const char *text,
                               struct EpElement **out);

/**
 * # Safety
 * `e` must come from this library (or be NULL).
 */
void ep_element_free(struct EpElement *e);

/**
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_element_arith(const struct EpElement *a,
                               const struct EpElement *b,
                               enum EpOp op,
                               struct EpElement **out);

/**
 * Element as `"x"` or `"x,y"`; free with `ep_string_free`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_element_to_string(const struct EpElement *e, char **out);

/**
 * Norm as an exact rational string.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_element_norm(const struct EpElement *e, char **out);

/**
 * Builds the Padé system for `alphas` (`"x,y;x,y;..."`, `m` entries).
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_pade_construct(const struct EpField *field,
                                uint32_t l,
                                uintptr_t mu,
                                const char *alphas,
                                struct EpPadeSystem **out);

/**
 * # Safety
 * `s` must come from `ep_pade_construct` (or be NULL).
 */
void ep_pade_free(struct EpPadeSystem *s);

/**
 * Order of the remainder series, computed up to `cutoff`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_pade_order(const struct EpPadeSystem *sys, uintptr_t cutoff, uintptr_t *out);

/**
 * The B-polynomials as JSON.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_pade_to_json(const struct EpPadeSystem *sys, char **out);

/**
 * JSON array of certified values of `F_v(alpha)` at the places above `p`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_eval_json(const struct EpElement *alpha,
                           uint64_t p,
                           uint32_t precision,
                           char **out);

/**
 * Certificate search; writes the certificate or the undetermined report as
 * JSON and returns `EP_UNDETERMINED` in the latter case.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EpStatus ep_certify_json(const struct EpField *field,
                              const char *lambdas,
                              const char *alphas,
                              uint64_t p_min,
                              uint64_t p_max,
                              uint32_t max_precision,
                              char **out);

/**
 * Effective bound report as JSON.
 *
 * # Safety
 * `out` must be valid.
 */
enum EpStatus ep_bounds_json(uint32_t m, uint32_t kappa, double c1, double log_h, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EULERPADE_H */

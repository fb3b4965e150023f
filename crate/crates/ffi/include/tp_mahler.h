/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef TP_MAHLER_H
#define TP_MAHLER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Coefficient generator.
typedef enum TpmAlgorithm {
  TPM_ALGORITHM_LOG_EXP = 0,
  TPM_ALGORITHM_CAUCHY = 1,
  TPM_ALGORITHM_DIFF = 2,
} TpmAlgorithm;

// Certified evaluation route.
typedef enum TpmMethod {
  TPM_METHOD_PRODUCT = 0,
  TPM_METHOD_LOG_SERIES = 1,
} TpmMethod;

// Result code of every fallible entry point.
typedef enum TpmStatus {
  TPM_STATUS_OK = 0,
  TPM_STATUS_INVALID_ARGUMENT = 1,
  TPM_STATUS_PRECONDITION = 2,
  TPM_STATUS_INTERNAL = 3,
  TPM_STATUS_NULL_POINTER = 4,
  TPM_STATUS_PARSE = 5,
  TPM_STATUS_PANIC = 6,
} TpmStatus;

// Auxiliary polynomial scheme.
typedef struct TpmAuxScheme TpmAuxScheme;

// Exact coefficient table `t_p(0..=N)`.
typedef struct TpmCoeffTable TpmCoeffTable;

// Complex ball enclosing a value of `T_p`.
typedef struct TpmValue TpmValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *tpm_last_error(void);

// Forgets the stored error message.
void tpm_clear_error(void);

// Library version as a static NUL-terminated string.
const char *tpm_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and must not be used afterwards.
void tpm_string_free(char *s);

// Computes `t_p(0..=order)` with the chosen generator.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum TpmStatus tpm_coeffs_generate(uint64_t p,
                                   size_t order,
                                   enum TpmAlgorithm algorithm,
                                   struct TpmCoeffTable **out);

// Reads a table from the JSON form written by [`tpm_coeffs_to_json`].
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum TpmStatus tpm_coeffs_from_json(const char *json, struct TpmCoeffTable **out);

// Highest index `N` in the table, or 0 for a null handle.
//
// # Safety
// `table` must be null or a live handle.
size_t tpm_coeffs_order(const struct TpmCoeffTable *table);

// The prime of the table, or 0 for a null handle.
//
// # Safety
// `table` must be null or a live handle.
uint64_t tpm_coeffs_prime(const struct TpmCoeffTable *table);

// `t_p(n)` as a newly allocated `"num/den"` string, e.g. `"3/25"` or `"0/1"`.
//
// # Safety
// `table` must be a live handle and `out` writable.
enum TpmStatus tpm_coeffs_entry(const struct TpmCoeffTable *table, size_t n, char **out);

// The table as CSV with header `p,n,numerator,denominator`.
//
// # Safety
// `table` must be a live handle and `out` writable.
enum TpmStatus tpm_coeffs_to_csv(const struct TpmCoeffTable *table, char **out);

// The table as a JSON document.
//
// # Safety
// `table` must be a live handle and `out` writable.
enum TpmStatus tpm_coeffs_to_json(const struct TpmCoeffTable *table, char **out);

// Runs the vanishing, denominator, functional-equation and reference-value
// audits and stores the total number of violations in `violations`.
//
// # Safety
// `table` must be a live handle and `violations` writable.
enum TpmStatus tpm_coeffs_verify(const struct TpmCoeffTable *table, size_t *violations);

// Releases a table. Null is ignored.
//
// # Safety
// `table` must be null or a handle not yet freed.
void tpm_coeffs_free(struct TpmCoeffTable *table);

// Certified value of `T_p(alpha)` at `prec` bits.
//
// `alpha` uses the command-line syntax: `"1/2"`, `"-0.4"`, `"1/3-1/4i"`.
//
// # Safety
// `alpha` must be a NUL-terminated string and `out` writable.
enum TpmStatus tpm_eval(uint64_t p,
                        const char *alpha,
                        enum TpmMethod method,
                        uint32_t prec,
                        struct TpmValue **out);

// Real part of the ball centre as a double (NaN for a null handle).
//
// # Safety
// `value` must be null or a live handle.
double tpm_value_re(const struct TpmValue *value);

// Imaginary part of the ball centre as a double (NaN for a null handle).
//
// # Safety
// `value` must be null or a live handle.
double tpm_value_im(const struct TpmValue *value);

// Upper bound on the ball radius as a double (NaN for a null handle).
//
// # Safety
// `value` must be null or a live handle.
double tpm_value_radius(const struct TpmValue *value);

// Number of series terms or product factors used (0 for a null handle).
//
// # Safety
// `value` must be null or a live handle.
size_t tpm_value_terms(const struct TpmValue *value);

// Real part of the centre in decimal, with every digit the precision carries.
//
// # Safety
// `value` must be a live handle and `out` writable.
enum TpmStatus tpm_value_re_string(const struct TpmValue *value, char **out);

// Imaginary part of the centre in decimal.
//
// # Safety
// `value` must be a live handle and `out` writable.
enum TpmStatus tpm_value_im_string(const struct TpmValue *value, char **out);

// Releases a value. Null is ignored.
//
// # Safety
// `value` must be null or a handle not yet freed.
void tpm_value_free(struct TpmValue *value);

// Builds the auxiliary scheme of degree `degree` for `T_p`, from a table of
// order `degree² + degree`.
//
// # Safety
// `out` must be writable.
enum TpmStatus tpm_aux_build(uint64_t p, size_t degree, struct TpmAuxScheme **out);

// First index where the scheme's Taylor expansion is nonzero (0 for null).
//
// # Safety
// `scheme` must be null or a live handle.
size_t tpm_aux_vanishing_order(const struct TpmAuxScheme *scheme);

// Dimension of the solution space the scheme was picked from (0 for null).
//
// # Safety
// `scheme` must be null or a live handle.
size_t tpm_aux_nullity(const struct TpmAuxScheme *scheme);

// The scheme as JSON with keys `p`, `P`, `d`, `achieved_vanishing`.
//
// # Safety
// `scheme` must be a live handle and `out` writable.
enum TpmStatus tpm_aux_to_json(const struct TpmAuxScheme *scheme, char **out);

// Releases a scheme. Null is ignored.
//
// # Safety
// `scheme` must be null or a handle not yet freed.
void tpm_aux_free(struct TpmAuxScheme *scheme);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TP_MAHLER_H */

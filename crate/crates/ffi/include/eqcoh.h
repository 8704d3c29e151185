#ifndef EQCOH_H
#define EQCOH_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum EqcohStatus {
  EQCOH_STATUS_OK = 0,
  /**
   * The computation ran and a checked identity failed.
   */
  EQCOH_STATUS_VERIFICATION_FAILED = 1,
  /**
   * Malformed model, unknown name, missing parameter, out of range.
   */
  EQCOH_STATUS_INPUT_ERROR = 2,
  EQCOH_STATUS_NULL_POINTER = 3,
  EQCOH_STATUS_INVALID_UTF8 = 4,
  /**
   * An internal invariant broke. The handle is still valid.
   */
  EQCOH_STATUS_PANIC = 5,
} EqcohStatus;

/**
 * A loaded model.
 */
typedef struct EqcohModel EqcohModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a model from TOML text. On success `*out` owns a new handle.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EqcohStatus eqcoh_model_load(const char *toml, struct EqcohModel **out);

/**
 * Load a built-in model such as `su2`, `rotation`, `cp8`, `rp9` or `lens3_7`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EqcohStatus eqcoh_model_builtin(const char *name, struct EqcohModel **out);

/**
 * Release a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void eqcoh_model_free(struct EqcohModel *model);

/**
 * Run an operation (`check-gstar`, `weil-cohomology`, `chern-simons`,
 * `equiv-cw`, `diffcoh`, `verify-ses`, `witness-inj`) and return its JSON
 * result in `*out_json`. Negative degrees and a null `poly` mean "not
 * given". The JSON is set also when the status is `VerificationFailed`.
 *
 * # Safety
 * `model` must be a live handle, `op` and `poly` (if not null)
 * NUL-terminated strings, `out_json` a valid pointer.
 */
enum EqcohStatus eqcoh_execute(const struct EqcohModel *model,
                               const char *op,
                               int32_t max_degree,
                               int32_t degree,
                               const char *poly,
                               char **out_json);

/**
 * Highest degree in which results on a finite model are certified, or -1
 * when the model has no geometric part. Complete models report `i32::MAX`.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
int32_t eqcoh_model_certified_max(const struct EqcohModel *model);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread.
 */
const char *eqcoh_last_error(void);

/**
 * Release a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void eqcoh_string_free(char *s);

/**
 * Library version, static.
 */
const char *eqcoh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQCOH_H */

#ifndef WHYLOG_H
#define WHYLOG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum WhylogStatus {
  WHYLOG_STATUS_OK = 0,
  WHYLOG_STATUS_NULL_ARGUMENT = 1,
  WHYLOG_STATUS_INVALID_UTF8 = 2,
  WHYLOG_STATUS_PARSE = 3,
  WHYLOG_STATUS_MODEL = 4,
  WHYLOG_STATUS_EVALUATION = 5,
  WHYLOG_STATUS_PROOF = 6,
  WHYLOG_STATUS_WRONG_MODEL_KIND = 7,
  WHYLOG_STATUS_PANIC = 8,
} WhylogStatus;

/**
 * A parsed formula.
 */
typedef struct WhylogFormula WhylogFormula;

/**
 * A loaded model: either an explanation model or a justification-style one.
 */
typedef struct WhylogModel WhylogModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *whylog_version(void);

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next call on the same thread.
 */
const char *whylog_last_error(void);

/**
 * Parses model text. On success `*out` receives a new handle.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WhylogStatus whylog_model_load(const char *source, struct WhylogModel **out);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void whylog_model_free(struct WhylogModel *model);

/**
 * Whether the handle holds a justification-style model.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
bool whylog_model_is_jl(const struct WhylogModel *model);

/**
 * Canonical text of the model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum WhylogStatus whylog_model_print(const struct WhylogModel *model, char **out);

/**
 * Evaluates `formula` at the named world. Justification-style models use
 * the evidence semantics; with `jl` set, an explanation model is first
 * converted to one.
 *
 * # Safety
 * `model` and `formula` must be live handles, `world` a NUL-terminated
 * string and `out` a valid pointer.
 */
enum WhylogStatus whylog_check(const struct WhylogModel *model,
                               const char *world,
                               const struct WhylogFormula *formula,
                               bool jl,
                               bool *out);

/**
 * The factive restriction of an explanation model, as a new handle.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum WhylogStatus whylog_model_factive(const struct WhylogModel *model, struct WhylogModel **out);

/**
 * The justification-style model of an explanation model, as a new handle.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum WhylogStatus whylog_model_jl(const struct WhylogModel *model, struct WhylogModel **out);

/**
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WhylogStatus whylog_formula_parse(const char *source, struct WhylogFormula **out);

/**
 * Canonical text of the formula.
 *
 * # Safety
 * `formula` must be a live handle and `out` a valid pointer.
 */
enum WhylogStatus whylog_formula_print(const struct WhylogFormula *formula, char **out);

/**
 * # Safety
 * `formula` must come from this library and not be used afterwards.
 */
void whylog_formula_free(struct WhylogFormula *formula);

/**
 * Checks a proof text. `*accepted` tells whether every line checks;
 * `*failed_line` is the first failing line number, or 0.
 *
 * # Safety
 * `source` must be a NUL-terminated string; both outputs valid pointers.
 */
enum WhylogStatus whylog_proof_check(const char *source, bool *accepted, size_t *failed_line);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void whylog_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WHYLOG_H */

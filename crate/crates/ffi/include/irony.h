#ifndef IRONY_H
#define IRONY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Values 3 to 9 match the `irony` command's exit codes.
typedef enum IronyStatus {
  IRONY_STATUS_OK = 0,
  IRONY_STATUS_NULL_ARGUMENT = 1,
  IRONY_STATUS_INVALID_UTF8 = 2,
  IRONY_STATUS_IO = 3,
  IRONY_STATUS_INVALID_INPUT = 4,
  IRONY_STATUS_MISSING_RESOURCE = 5,
  IRONY_STATUS_CONFIG = 6,
  IRONY_STATUS_TASK_MISMATCH = 7,
  IRONY_STATUS_MODEL_FILE = 8,
  IRONY_STATUS_INTERNAL = 9,
  IRONY_STATUS_BUFFER_TOO_SMALL = 10,
  IRONY_STATUS_PANIC = 11,
} IronyStatus;

typedef enum IronyTask {
  // Binary: 0 non-ironic, 1 ironic.
  IRONY_TASK_A = 0,
  // Four classes: non-irony, polarity contrast, other verbal, situational.
  IRONY_TASK_B = 1,
} IronyTask;

// Opaque trained ensemble.
typedef struct IronyModel IronyModel;

// Task-level scores; for task B precision, recall and F1 are macro averages.
typedef struct IronyScores {
  double accuracy;
  double precision;
  double recall;
  double f1;
} IronyScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// success. Valid until the next call into the library on the same thread.
const char *irony_last_error(void);

// Loads a model file written by `irony train`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum IronyStatus irony_model_load(const char *path, struct IronyModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from [`irony_model_load`] and not be used afterwards.
void irony_model_free(struct IronyModel *model);

// Number of classes the model predicts (2 or 4), or 0 for null.
//
// # Safety
// `model` must be null or a live handle.
size_t irony_model_num_classes(const struct IronyModel *model);

// Feature vector width of the model, or 0 for null.
//
// # Safety
// `model` must be null or a live handle.
size_t irony_model_feature_width(const struct IronyModel *model);

// Classifies one raw tweet. `probs` receives the mean member probability
// per class and must hold at least `irony_model_num_classes` values; it may
// be null when `probs_len` is 0.
//
// # Safety
// Pointers must be valid; `probs` must point to `probs_len` writable doubles.
enum IronyStatus irony_predict(const struct IronyModel *model,
                               const char *text,
                               uint32_t *label,
                               double *probs,
                               size_t probs_len);

// Normalizes a tweet with the model's resources. The result must be
// released with [`irony_string_free`].
//
// # Safety
// Pointers must be valid and `text` NUL-terminated.
enum IronyStatus irony_normalize(const struct IronyModel *model, const char *text, char **out);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void irony_string_free(char *s);

// Scores `n` predicted labels against gold labels.
//
// # Safety
// `gold` and `predicted` must point to `n` readable values, `out` to one
// writable [`IronyScores`].
enum IronyStatus irony_evaluate(const uint32_t *gold,
                                const uint32_t *predicted,
                                size_t n,
                                enum IronyTask task,
                                struct IronyScores *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IRONY_H */

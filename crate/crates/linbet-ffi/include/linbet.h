#ifndef LINBET_H
#define LINBET_H

/* Generated by cbindgen from linbet-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum LinbetStatus {
  LINBET_STATUS_OK = 0,
  LINBET_STATUS_NULL_POINTER = 1,
  LINBET_STATUS_INVALID_INPUT = 2,
  LINBET_STATUS_INVALID_CONFIG = 3,
  LINBET_STATUS_RUNTIME = 4,
  LINBET_STATUS_UTF8 = 5,
  LINBET_STATUS_JSON = 6,
  LINBET_STATUS_PANIC = 7,
} LinbetStatus;

/**
 * Opaque bandit instance handle.
 */
typedef struct LinbetInstance LinbetInstance;

/**
 * Opaque result handle: per-repetition trajectories plus the aggregate.
 */
typedef struct LinbetRunResult LinbetRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; valid until the next failing call.
 */
const char *linbet_last_error_message(void);

/**
 * Build a named dataset instance (s1-s4), deterministically in `seed`.
 */
enum LinbetStatus linbet_instance_from_dataset(const char *dataset,
                                               uint64_t seed,
                                               struct LinbetInstance **out);

/**
 * Deserialize an instance from its JSON form.
 */
enum LinbetStatus linbet_instance_from_json(const char *json, struct LinbetInstance **out);

/**
 * Serialize an instance; free the string with `linbet_string_free`.
 */
enum LinbetStatus linbet_instance_to_json(const struct LinbetInstance *instance, char **out);

void linbet_instance_free(struct LinbetInstance *instance);

void linbet_string_free(char *s);

/**
 * Run `reps` seeded repetitions of one algorithm ("menu", "tofu", "mom" or
 * "crt") with default parameters inherited from the instance.
 */
enum LinbetStatus linbet_run(const struct LinbetInstance *instance,
                             const char *algo,
                             uint64_t horizon,
                             uint32_t reps,
                             uint64_t seed,
                             struct LinbetRunResult **out);

/**
 * Number of repetitions in a result (0 for a null handle).
 */
uint32_t linbet_result_reps(const struct LinbetRunResult *result);

/**
 * Effective rounds per repetition (0 for a null handle).
 */
uint64_t linbet_result_rounds(const struct LinbetRunResult *result);

/**
 * Final cumulative pseudo-regret of one repetition.
 */
enum LinbetStatus linbet_result_final_regret(const struct LinbetRunResult *result,
                                             uint32_t rep,
                                             double *out);

/**
 * Final cumulative payoff of one repetition.
 */
enum LinbetStatus linbet_result_final_payoff(const struct LinbetRunResult *result,
                                             uint32_t rep,
                                             double *out);

/**
 * Copy the mean cumulative-regret curve into a caller-owned buffer of
 * `len` doubles; `len` must equal `linbet_result_rounds`.
 */
enum LinbetStatus linbet_result_mean_cum_regret(const struct LinbetRunResult *result,
                                                double *buf,
                                                uintptr_t len);

/**
 * Serialize the per-round trajectories as CSV; free with `linbet_string_free`.
 */
enum LinbetStatus linbet_result_to_csv(const struct LinbetRunResult *result, char **out);

void linbet_result_free(struct LinbetRunResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINBET_H */

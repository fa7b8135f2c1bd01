#ifndef JAMSEC_H
#define JAMSEC_H

/* Generated by cbindgen from the jamsec-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible call.
 */
typedef enum JamsecStatus {
  JAMSEC_STATUS_OK = 0,
  JAMSEC_STATUS_NULL_ARGUMENT = 1,
  JAMSEC_STATUS_INVALID_UTF8 = 2,
  JAMSEC_STATUS_CONFIG_ERROR = 3,
  JAMSEC_STATUS_SIM_ERROR = 4,
  JAMSEC_STATUS_GRID_ERROR = 5,
  JAMSEC_STATUS_PANIC = 6,
} JamsecStatus;

/**
 * Secrecy accounting for slots where the attacker is not listening.
 */
typedef enum JamsecStarvedSecrecy {
  JAMSEC_STARVED_SECRECY_AS_WRITTEN = 0,
  JAMSEC_STARVED_SECRECY_LINK_BASED = 1,
} JamsecStarvedSecrecy;

/**
 * Detector statistic model.
 */
typedef enum JamsecDetectorModel {
  JAMSEC_DETECTOR_MODEL_GAUSSIAN_APPROX = 0,
  JAMSEC_DETECTOR_MODEL_CHI_SQUARE_EXACT = 1,
} JamsecDetectorModel;

/**
 * Opaque validated system configuration.
 */
typedef struct JamsecConfig JamsecConfig;

/**
 * Opaque grid-search result (full surface plus argmin).
 */
typedef struct JamsecGridResult JamsecGridResult;

/**
 * Attacker policy (plain data).
 */
typedef struct JamsecPolicy {
  double alpha_e;
  double rho;
  bool sensing_enabled;
  double tau;
  double p_fa;
} JamsecPolicy;

/**
 * Engine options (plain data).
 */
typedef struct JamsecOptions {
  double burn_in_frac;
  bool jam_success_departs;
  enum JamsecStarvedSecrecy starved_secrecy;
  enum JamsecDetectorModel detector_model;
  uint64_t initial_queue;
  double initial_battery;
} JamsecOptions;

/**
 * Simulation estimates (plain data mirror of the library report).
 */
typedef struct JamsecReport {
  uint64_t n_slots;
  uint64_t counted;
  double mu_a_hat;
  double mu_a_ci;
  double service_rate_hat;
  double service_rate_ci;
  double mu_sec_hat;
  double mu_sec_ci;
  double p_low;
  double p_mid;
  double p_high;
  double p_queue_nonempty;
  double p_jam_capable;
  double eh_rate;
  double depletion_rate;
  double queue_mean;
  uint64_t queue_max;
  uint64_t queue_final;
  double battery_mean;
  double battery_final;
  uint64_t arrivals_total;
  uint64_t departures_total;
} JamsecReport;

/**
 * One grid cell (plain data).
 */
typedef struct JamsecGridCell {
  double rho;
  double alpha_e;
  /**
   * Sensing window of the cell when the window axis was searched;
   * meaningless when `has_tau` is false.
   */
  double tau;
  bool has_tau;
  double mu_sec;
  double ci;
} JamsecGridCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static C string.
 */
const char *jamsec_version(void);

/**
 * Copy the last error message for this thread into `buf` (truncated to
 * `cap - 1` bytes, always NUL-terminated when `cap > 0`). Returns the full
 * message length in bytes, or 0 when no error is pending.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null (then only the
 * length is returned).
 */
size_t jamsec_last_error(char *buf, size_t cap);

/**
 * Default configuration (documented defaults; access probability from the
 * stability rule). Free with [`jamsec_config_free`].
 */
struct JamsecConfig *jamsec_config_default(void);

/**
 * Parse a TOML config. On success `*out_config` receives a new handle and,
 * when `out_policy` is non-null, the file's policy section (or defaults) is
 * written there.
 *
 * # Safety
 * `text` must be a NUL-terminated string; out pointers must be valid.
 */
enum JamsecStatus jamsec_config_from_toml(const char *text,
                                          struct JamsecConfig **out_config,
                                          struct JamsecPolicy *out_policy);

/**
 * Free a configuration handle. Null is a no-op.
 *
 * # Safety
 * `config` must have come from this library and not been freed before.
 */
void jamsec_config_free(struct JamsecConfig *config);

/**
 * Set a configuration field by name (see the header for the field list).
 * The change is validated together with the rest of the config.
 *
 * # Safety
 * Pointers must be valid; `key` NUL-terminated.
 */
enum JamsecStatus jamsec_config_set(struct JamsecConfig *config, const char *key, double value);

/**
 * Read a configuration field by name.
 *
 * # Safety
 * Pointers must be valid; `key` NUL-terminated.
 */
enum JamsecStatus jamsec_config_get(const struct JamsecConfig *config,
                                    const char *key,
                                    double *out);

/**
 * Default attacker policy.
 */
struct JamsecPolicy jamsec_policy_default(void);

/**
 * Default engine options.
 */
struct JamsecOptions jamsec_options_default(void);

/**
 * Run the slot engine; fills `*out` on success. `options` may be null for
 * defaults.
 *
 * # Safety
 * Pointers must be valid for the duration of the call.
 */
enum JamsecStatus jamsec_run(const struct JamsecConfig *config,
                             const struct JamsecPolicy *policy,
                             const struct JamsecOptions *options,
                             uint64_t seed,
                             uint64_t n_slots,
                             struct JamsecReport *out);

/**
 * Exhaustive strategy search over the split fraction and jam probability
 * (plus the sensing window when `optimize_tau` is set), minimizing the
 * simulated secure throughput with common random numbers across cells.
 * `options` may be null. Free the result with [`jamsec_grid_free`].
 *
 * # Safety
 * Pointers must be valid for the duration of the call.
 */
enum JamsecStatus jamsec_grid_search(const struct JamsecConfig *config,
                                     const struct JamsecPolicy *base_policy,
                                     uint32_t m_points,
                                     bool optimize_tau,
                                     uint64_t slots_per_cell,
                                     const struct JamsecOptions *options,
                                     uint64_t seed,
                                     struct JamsecGridResult **out);

/**
 * Argmin cell of a grid result.
 *
 * # Safety
 * Pointers must be valid.
 */
enum JamsecStatus jamsec_grid_best(const struct JamsecGridResult *result,
                                   struct JamsecGridCell *out);

/**
 * Number of successfully evaluated cells.
 *
 * # Safety
 * `result` must be valid.
 */
size_t jamsec_grid_cell_count(const struct JamsecGridResult *result);

/**
 * Fetch cell `index` (lexicographic order over the axes).
 *
 * # Safety
 * Pointers must be valid.
 */
enum JamsecStatus jamsec_grid_cell(const struct JamsecGridResult *result,
                                   size_t index,
                                   struct JamsecGridCell *out);

/**
 * Free a grid result. Null is a no-op.
 *
 * # Safety
 * `result` must have come from this library and not been freed before.
 */
void jamsec_grid_free(struct JamsecGridResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JAMSEC_H */

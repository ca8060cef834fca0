#ifndef GYROFREE_H
#define GYROFREE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum GyrofreeStatus {
  GYROFREE_STATUS_OK = 0,
  GYROFREE_STATUS_NULL_POINTER = 1,
  GYROFREE_STATUS_INVALID_ARGUMENT = 2,
  GYROFREE_STATUS_NOT_A_ROTATION = 3,
  /**
   * The step ran as a pure prediction because accelerometer 0 read zero.
   */
  GYROFREE_STATUS_MEASUREMENT_DROPOUT = 4,
  GYROFREE_STATUS_IO = 5,
  GYROFREE_STATUS_CONFIG = 6,
  /**
   * No run has been performed on the simulation handle yet.
   */
  GYROFREE_STATUS_NOT_RUN = 7,
  GYROFREE_STATUS_PANIC = 8,
} GyrofreeStatus;

/**
 * Opaque observer handle.
 */
typedef struct GyrofreeObserver GyrofreeObserver;

/**
 * Opaque simulation handle: a configuration plus the most recent run.
 */
typedef struct GyrofreeSimulation GyrofreeSimulation;

/**
 * Observer gains, lever arm and the fixed reference state.
 */
typedef struct GyrofreeObserverParams {
  double k1;
  double k2;
  double lever_arm;
  /**
   * Row-major; must be within 1e-6 of a rotation.
   */
  double reference_attitude[9];
  double reference_omega[3];
  /**
   * Inertial magnetic direction; normalized on use.
   */
  double mag_reference[3];
} GyrofreeObserverParams;

typedef struct GyrofreeTraceRecord {
  double t;
  double att_err_rad;
  double omega_err;
  double lyapunov;
  double innovation_norm;
  double commutation_residual;
} GyrofreeTraceRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length. Pass a
 * null `buf` to query the length. The message is empty after a successful call.
 *
 * # Safety
 * `buf` must be null or point to at least `len` writable bytes.
 */
size_t gyrofree_last_error_message(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *gyrofree_status_string(enum GyrofreeStatus status);

/**
 * Fills `params` with gains 3 and 1, a unit lever arm, identity reference
 * attitude, zero reference rate and the magnetic direction (1, 0, 1)/√2.
 *
 * # Safety
 * `params` must be null or valid for writes.
 */
enum GyrofreeStatus gyrofree_observer_default_params(struct GyrofreeObserverParams *params);

/**
 * Creates an observer. `init_rotation` (9) and `init_translation` (3) set the
 * initial group estimate; either may be null for identity and zero.
 *
 * # Safety
 * Pointers must be null or valid for the documented number of elements.
 */
enum GyrofreeStatus gyrofree_observer_new(const struct GyrofreeObserverParams *params,
                                          const double *init_rotation,
                                          const double *init_translation,
                                          struct GyrofreeObserver **out);

/**
 * Advances the observer by `dt` with one accelerometer frame (12) and a
 * magnetometer reading (3, normalized here). If accelerometer 0 reads zero
 * the step is a pure prediction and the call returns
 * `GYROFREE_STATUS_MEASUREMENT_DROPOUT`; the state is still advanced.
 *
 * # Safety
 * `observer` must come from [`gyrofree_observer_new`]; arrays must hold the
 * documented number of elements.
 */
enum GyrofreeStatus gyrofree_observer_step(struct GyrofreeObserver *observer,
                                           const double *accel,
                                           const double *mag,
                                           double dt);

/**
 * Writes the current attitude estimate (9, row-major) and angular velocity
 * estimate (3).
 *
 * # Safety
 * `observer` must be a live handle; outputs must hold 9 and 3 doubles.
 */
enum GyrofreeStatus gyrofree_observer_estimate(const struct GyrofreeObserver *observer,
                                               double *attitude_out,
                                               double *omega_out);

/**
 * Writes the internal group estimate: rotation (9, row-major) and translation (3).
 *
 * # Safety
 * `observer` must be a live handle; outputs must hold 9 and 3 doubles.
 */
enum GyrofreeStatus gyrofree_observer_group_state(const struct GyrofreeObserver *observer,
                                                  double *rotation_out,
                                                  double *translation_out);

/**
 * # Safety
 * `observer` must be null or a handle not yet freed.
 */
void gyrofree_observer_free(struct GyrofreeObserver *observer);

/**
 * Angular acceleration (3) from one accelerometer frame (12).
 *
 * # Safety
 * `accel` must hold 12 doubles and `theta_out` 3.
 */
enum GyrofreeStatus gyrofree_extract_theta(const double *accel,
                                           double lever_arm,
                                           double *theta_out);

/**
 * Creates a simulation from TOML text. Keys left out take their defaults; an
 * empty string gives the default configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum GyrofreeStatus gyrofree_simulation_new_from_toml(const char *toml,
                                                      struct GyrofreeSimulation **out);

/**
 * Creates a simulation from a TOML file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GyrofreeStatus gyrofree_simulation_load(const char *path, struct GyrofreeSimulation **out);

/**
 * Replaces the seed and discards any previous run.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum GyrofreeStatus gyrofree_simulation_set_seed(struct GyrofreeSimulation *sim, uint64_t seed);

/**
 * Runs the configured simulation, replacing any previous result.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum GyrofreeStatus gyrofree_simulation_run(struct GyrofreeSimulation *sim);

/**
 * Number of trace records of the last run (steps + 1).
 *
 * # Safety
 * `sim` must be a live handle and `len_out` writable.
 */
enum GyrofreeStatus gyrofree_simulation_trace_len(const struct GyrofreeSimulation *sim,
                                                  size_t *len_out);

/**
 * Copies trace record `index` of the last run.
 *
 * # Safety
 * `sim` must be a live handle and `record_out` writable.
 */
enum GyrofreeStatus gyrofree_simulation_trace_record(const struct GyrofreeSimulation *sim,
                                                     size_t index,
                                                     struct GyrofreeTraceRecord *record_out);

/**
 * Writes `trace.csv`, `trace.svg` and `measurements.csv` of the last run into
 * `dir`, creating it if needed.
 *
 * # Safety
 * `sim` must be a live handle and `dir` a NUL-terminated string.
 */
enum GyrofreeStatus gyrofree_simulation_write_outputs(const struct GyrofreeSimulation *sim,
                                                      const char *dir);

/**
 * # Safety
 * `sim` must be null or a handle not yet freed.
 */
void gyrofree_simulation_free(struct GyrofreeSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GYROFREE_H */

#ifndef LONGWAVE_H
#define LONGWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; 2, 3 and 4 match the CLI exit codes.
typedef enum LwStatus {
  LW_STATUS_OK = 0,
  LW_STATUS_INVALID_ARGUMENT = 1,
  LW_STATUS_CONFIG = 2,
  LW_STATUS_NUMERICAL = 3,
  LW_STATUS_IO = 4,
  LW_STATUS_BUFFER_TOO_SMALL = 5,
  LW_STATUS_PANIC = 6,
} LwStatus;

typedef struct LwBoussinesq LwBoussinesq;

typedef struct LwKdv LwKdv;

// Parameters of a Boussinesq handle.
typedef struct LwBoussinesqParams {
  double epsilon;
  double theta;
  double lambda1;
  double lambda2;
  size_t num_points;
  double dx;
} LwBoussinesqParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *lw_version(void);

// Copies the last error of this thread into `buf` (NUL-terminated, truncated
// to `len`). Returns the full message length plus one, or 0 when there is none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t lw_last_error_message(char *buf, size_t len);

// Samples the soliton of amplitude `alpha` and initial shift `shift` at time `t`.
//
// # Safety
// `out` must point to `num_points` writable doubles.
enum LwStatus lw_soliton_sample(double alpha,
                                double shift,
                                double epsilon,
                                size_t num_points,
                                double dx,
                                double t,
                                double *out);

// Creates a classical KdV integrator with time step `dx`, starting from `u0`.
//
// # Safety
// `u0` must point to `num_points` doubles; `out` must be a valid pointer.
enum LwStatus lw_kdv_create(double epsilon,
                            size_t num_points,
                            double dx,
                            const double *u0,
                            struct LwKdv **out);

// Advances by `steps` time steps. The handle is unchanged on failure.
//
// # Safety
// `h` must be null or a live handle from [`lw_kdv_create`].
enum LwStatus lw_kdv_step(struct LwKdv *h, size_t steps);

// Current time; NaN for a null handle.
//
// # Safety
// `h` must be null or a live handle.
double lw_kdv_time(const struct LwKdv *h);

// # Safety
// `h` must be null or a live handle; `buf` must hold `len` doubles.
enum LwStatus lw_kdv_get_field(const struct LwKdv *h, double *buf, size_t len);

// # Safety
// `h` must be null or a handle from [`lw_kdv_create`] not yet freed.
void lw_kdv_free(struct LwKdv *h);

// Creates a Boussinesq integrator. `bottom` holds `b` at the nodes, or is
// null for a flat bottom.
//
// # Safety
// `params` and `out` must be valid; `v0`, `eta0` and a non-null `bottom`
// must point to `params.num_points` doubles.
enum LwStatus lw_boussinesq_create(const struct LwBoussinesqParams *params,
                                   const double *v0,
                                   const double *eta0,
                                   const double *bottom,
                                   struct LwBoussinesq **out);

// # Safety
// `h` must be null or a live handle from [`lw_boussinesq_create`].
enum LwStatus lw_boussinesq_step(struct LwBoussinesq *h, size_t steps);

// # Safety
// `h` must be null or a live handle.
double lw_boussinesq_time(const struct LwBoussinesq *h);

// Copies the velocity `v` into `buf`.
//
// # Safety
// `h` must be null or a live handle; `buf` must hold `len` doubles.
enum LwStatus lw_boussinesq_get_velocity(const struct LwBoussinesq *h, double *buf, size_t len);

// Copies the surface elevation `eta` into `buf`.
//
// # Safety
// `h` must be null or a live handle; `buf` must hold `len` doubles.
enum LwStatus lw_boussinesq_get_surface(const struct LwBoussinesq *h, double *buf, size_t len);

// # Safety
// `h` must be null or a handle from [`lw_boussinesq_create`] not yet freed.
void lw_boussinesq_free(struct LwBoussinesq *h);

// Runs a scenario given as a JSON config and writes its CSV/JSON outputs to
// `out_dir`, or to the config's `output_dir` when `out_dir` is null.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out_dir` null or one.
enum LwStatus lw_run_scenario_json(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LONGWAVE_H */

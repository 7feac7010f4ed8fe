#ifndef MUSCL_H
#define MUSCL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum {
  MUSCL_STATUS_OK = 0,
  MUSCL_STATUS_NULL_POINTER = 1,
  MUSCL_STATUS_INVALID_ARGUMENT = 2,
  MUSCL_STATUS_CONFIG = 3,
  MUSCL_STATUS_IO = 4,
  MUSCL_STATUS_MESH = 5,
  MUSCL_STATUS_OPTIM = 6,
  MUSCL_STATUS_PHYSICS = 7,
  MUSCL_STATUS_SOLVER = 8,
  MUSCL_STATUS_PANIC = 9,
} MusclStatus;

/**
 * Benchmark configuration.
 */
typedef struct MusclConfig MusclConfig;

/**
 * Mesh loaded from a file.
 */
typedef struct MusclMesh MusclMesh;

/**
 * Result table of a convergence study.
 */
typedef struct MusclReport MusclReport;

/**
 * One row of a report. `eoc` is NaN on the first row.
 */
typedef struct {
  size_t elements;
  double h;
  double l1_error;
  double eoc;
  double wall_seconds;
} MusclReportRow;

/**
 * Gas state in primitive variables.
 */
typedef struct {
  double rho;
  double u;
  double p;
} MusclPrimitive;

/**
 * Star region of an exact Riemann solution.
 */
typedef struct {
  double p_star;
  double u_star;
  double rho_star_left;
  double rho_star_right;
} MusclStarState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *muscl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *muscl_version(void);

/**
 * Parses a TOML benchmark configuration.
 *
 * # Safety
 * `toml` must be NUL-terminated; `out` must be writable.
 */
MusclStatus muscl_config_from_toml(const char *toml, MusclConfig **out);

/**
 * Overrides the worker count of a configuration (0 means all cores).
 *
 * # Safety
 * `config` must come from [`muscl_config_from_toml`].
 */
MusclStatus muscl_config_set_threads(MusclConfig *config, size_t threads);

/**
 * Serializes a configuration back to TOML. The string must be released
 * with [`muscl_string_free`].
 *
 * # Safety
 * `config` must come from [`muscl_config_from_toml`]; `out` must be writable.
 */
MusclStatus muscl_config_to_toml(const MusclConfig *config, char **out);

/**
 * Releases a configuration. NULL is ignored.
 *
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void muscl_config_free(MusclConfig *config);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void muscl_string_free(char *s);

/**
 * Runs every level of a configuration and returns the report.
 *
 * # Safety
 * `config` must come from [`muscl_config_from_toml`]; `out` must be writable.
 */
MusclStatus muscl_run_study(const MusclConfig *config, MusclReport **out);

/**
 * Number of rows (mesh levels) in a report.
 *
 * # Safety
 * `report` must come from [`muscl_run_study`]; `out` must be writable.
 */
MusclStatus muscl_report_len(const MusclReport *report, size_t *out);

/**
 * Copies row `index` of a report.
 *
 * # Safety
 * `report` must come from [`muscl_run_study`]; `out` must be writable.
 */
MusclStatus muscl_report_row(const MusclReport *report, size_t index, MusclReportRow *out);

/**
 * Writes a report as CSV to `path`.
 *
 * # Safety
 * `report` must come from [`muscl_run_study`]; `path` must be NUL-terminated.
 */
MusclStatus muscl_report_write_csv(const MusclReport *report, const char *path);

/**
 * Releases a report. NULL is ignored.
 *
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void muscl_report_free(MusclReport *report);

/**
 * Loads a mesh from a Gmsh `.msh` file or the native text format.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
MusclStatus muscl_mesh_load(const char *path, MusclMesh **out);

/**
 * Spatial dimension and element count of a mesh.
 *
 * # Safety
 * `mesh` must come from [`muscl_mesh_load`]; both outputs must be writable.
 */
MusclStatus muscl_mesh_info(const MusclMesh *mesh, size_t *dim, size_t *elements);

/**
 * Releases a mesh. NULL is ignored.
 *
 * # Safety
 * `mesh` must come from this library and not be used afterwards.
 */
void muscl_mesh_free(MusclMesh *mesh);

/**
 * Star state of the exact Riemann problem for the 1D Euler equations.
 *
 * # Safety
 * `out` must be writable.
 */
MusclStatus muscl_riemann_star(MusclPrimitive left,
                               MusclPrimitive right,
                               double gamma,
                               MusclStarState *out);

/**
 * Exact Riemann solution at similarity coordinate `xi = x / t`.
 *
 * # Safety
 * `out` must be writable.
 */
MusclStatus muscl_riemann_sample(MusclPrimitive left,
                                 MusclPrimitive right,
                                 double gamma,
                                 double xi,
                                 MusclPrimitive *out);

/**
 * Gradient of one cell from the weighted least-squares fit restricted to
 * the admissible set: `count` neighbours with centroid offsets
 * `offsets[dim * k ..]`, value jumps `jumps[k]` and positive weights
 * `weights[k]`. Writes `dim` values to `gradient`.
 *
 * # Safety
 * The input arrays must hold `dim * count`, `count` and `count` values;
 * `gradient` must hold `dim` values.
 */
MusclStatus muscl_qp_gradient(size_t dim,
                              size_t count,
                              const double *offsets,
                              const double *jumps,
                              const double *weights,
                              double *gradient);

/**
 * Largest deviation between QP and minmod gradients over `trials` random
 * fields on a periodic grid with `cells` cells per direction.
 *
 * # Safety
 * `out` must be writable.
 */
MusclStatus muscl_check_minmod_equivalence(size_t dim,
                                           size_t cells,
                                           size_t trials,
                                           uint64_t seed,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUSCL_H */

/* rdslab — random dynamical systems laboratory.
 *
 * C interface to the core library: opaque handles, integer status codes,
 * caller-provided buffers. All functions return RDS_OK (0) on success or a
 * negative rds_status value; rds_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef RDSLAB_H
#define RDSLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rds_status {
  RDS_OK = 0,
  RDS_ERR_INVALID_ARGUMENT = -1,
  RDS_ERR_PARSE = -2,
  RDS_ERR_DOMAIN = -3,
  RDS_ERR_NO_DENSITY = -4,
  RDS_ERR_NOT_CONVERGED = -5,
  RDS_ERR_UNSUPPORTED = -6,
  RDS_ERR_INSUFFICIENT_SAMPLES = -7,
  RDS_ERR_OVERFLOW = -8,
  RDS_ERR_IO = -9,
  RDS_ERR_BUFFER_TOO_SMALL = -10,
  RDS_ERR_ANALYSIS_FAILED = -11,
  RDS_ERR_INTERNAL = -12,
} rds_status;

/* Opaque handles. */
typedef struct rds_kernel rds_kernel;
typedef struct rds_experiment rds_experiment;

int rds_api_version(void);
const char *rds_version_string(void);

/* Message for the last failure on this thread; empty string if none. */
const char *rds_last_error(void);

/* ----- catalogs ----- */

int rds_map_count(void);
int rds_map_name(int index, char *buf, size_t cap);
int rds_sde_count(void);
int rds_sde_name(int index, char *buf, size_t cap);
int rds_kernel_variant_count(void);
int rds_kernel_variant_name(int index, char *buf, size_t cap);

/* ----- transition kernels ----- */

/* variant: "additive_map" | "random_jump" | "parametric" | "degenerate_trap"
 * | "delta". map_name selects the base map; params_json is an optional JSON
 * object of map parameters (e.g. {"b":3}) or NULL. */
int rds_kernel_create(const char *variant, const char *map_name,
                      const char *params_json, double epsilon, rds_kernel **out);
void rds_kernel_free(rds_kernel *kernel);

int rds_kernel_dim(const rds_kernel *kernel, int *out_dim);

/* count draws from p(.|x); out holds count*dim doubles, sample-major. */
int rds_kernel_sample(const rds_kernel *kernel, const double *x, int dim,
                      uint64_t seed, int count, double *out);

int rds_kernel_density(const rds_kernel *kernel, const double *x, const double *y,
                       int dim, double *out_density);

/* Stationary probability vector of the bin-discretized kernel (1-d spaces).
 * weights must hold `bins` doubles. */
int rds_kernel_stationary(const rds_kernel *kernel, int bins, double *weights);

/* Trap map value phi_eps(z) on the circle. */
int rds_trap_map(double epsilon, double z, double *out);

/* ----- experiments ----- */

int rds_experiment_create(const char *config_json, rds_experiment **out);
int rds_experiment_create_from_file(const char *path, rds_experiment **out);
int rds_experiment_set_seed(rds_experiment *exp, uint64_t seed);
int rds_experiment_set_output_dir(rds_experiment *exp, const char *dir);

/* Runs every configured analysis. Returns RDS_OK only if all analyses
 * succeeded; per-analysis failures yield RDS_ERR_ANALYSIS_FAILED with the
 * manifest still available. */
int rds_experiment_run(rds_experiment *exp);

/* JSON manifest of the last run. If cap is too small, fills *needed and
 * returns RDS_ERR_BUFFER_TOO_SMALL. */
int rds_experiment_manifest_json(const rds_experiment *exp, char *buf, size_t cap,
                                 size_t *needed);

void rds_experiment_free(rds_experiment *exp);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RDSLAB_H */

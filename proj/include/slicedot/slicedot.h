/* C interface to the slicedot library: sliced and max-sliced Wasserstein
 * distances, spectral outlier filtering, and the experiment harness.
 *
 * All entry points return a status code; 0 means success. On failure,
 * sot_last_error() describes the problem for the calling thread, and
 * output handles are left untouched. Handles are created and destroyed
 * by this library only.
 */
#ifndef SLICEDOT_SLICEDOT_H
#define SLICEDOT_SLICEDOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sot_status {
    SOT_OK = 0,
    SOT_ERR_INVALID_ARGUMENT = 1, /* bad parameters, shape/weight violations */
    SOT_ERR_PARSE = 2,            /* malformed CSV or JSON input */
    SOT_ERR_IO = 3,               /* filesystem failure */
    SOT_ERR_NUMERIC = 4,          /* numerical failure (solver overflow, divergence) */
    SOT_ERR_INTERNAL = 5
} sot_status;

typedef struct sot_cloud sot_cloud;   /* a weighted point cloud */
typedef struct sot_result sot_result; /* a JSON result document */

const char* sot_version(void);
const char* sot_status_name(sot_status status);
/* Message for the most recent failure on this thread; never NULL. */
const char* sot_last_error(void);

/* ----- point clouds ----- */

/* Builds a cloud from row-major data (n x d). weights may be NULL for
 * uniform; otherwise length n, nonnegative, summing to 1 within 1e-9. */
sot_status sot_cloud_create(const double* data, int64_t n, int64_t d, const double* weights,
                            sot_cloud** out);

/* Headerless CSV, one point per row; with has_weight_column != 0 the
 * trailing column holds per-point weights. */
sot_status sot_cloud_load_csv(const char* path, int has_weight_column, sot_cloud** out);

int64_t sot_cloud_size(const sot_cloud* cloud);
int64_t sot_cloud_dim(const sot_cloud* cloud);
void sot_cloud_free(sot_cloud* cloud);

/* ----- results ----- */

/* Stable-key-ordered JSON text; owned by the result handle. */
const char* sot_result_json(const sot_result* result);
/* Reads a number at a JSON pointer, e.g. "/value" or "/meta/d". */
sot_status sot_result_number(const sot_result* result, const char* json_pointer, double* out);
void sot_result_free(sot_result* result);

/* ----- distances ----- */

/* Monte Carlo estimate of SW_p^p over num_projections random
 * directions. projections_csv_path (optional, may be NULL) receives the
 * per-direction values, one per line. */
sot_status sot_sliced_wasserstein(const sot_cloud* x, const sot_cloud* y, double p,
                                  int64_t num_projections, uint64_t seed, int workers,
                                  const char* projections_csv_path, sot_result** out);

typedef enum sot_msw_method {
    SOT_MSW_SUBGRADIENT = 0,
    SOT_MSW_LIPO = 1,
    SOT_MSW_GRID = 2
} sot_msw_method;

/* Max-sliced distance. budget_or_iterations is the iteration count for
 * the subgradient method, the evaluation budget for LIPO, and the
 * angular resolution for the grid oracle (d <= 3 only). step_scale <= 0
 * selects the default. trace_csv_path (optional) receives the iterate
 * trace for the subgradient method. */
sot_status sot_max_sliced(const sot_cloud* x, const sot_cloud* y, double p,
                          sot_msw_method method, int64_t budget_or_iterations,
                          double step_scale, uint64_t seed, const char* trace_csv_path,
                          sot_result** out);

/* ----- robust estimation ----- */

/* Spectral filtering under contamination fraction epsilon and clean
 * covariance bound sigma2; stops at top eigenvalue <= threshold_mult *
 * sigma2. weights_csv_path (optional) receives index,weight lines. */
sot_status sot_robust_filter(const sot_cloud* cloud, double epsilon, double sigma2,
                             double threshold_mult, const char* weights_csv_path,
                             sot_result** out);

/* ----- experiments ----- */

/* Runs a named experiment (mc-complexity, sample-complexity, rates,
 * msw-bench, robust) with a JSON config (NULL or "" for defaults),
 * writing curve CSVs and a manifest under out_dir. The returned result
 * holds the manifest. */
sot_status sot_experiment(const char* name, const char* config_json, const char* out_dir,
                          uint64_t seed, int workers, sot_result** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SLICEDOT_SLICEDOT_H */

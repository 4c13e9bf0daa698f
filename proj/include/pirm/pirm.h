/*
 * C interface to the parallel regularization solvers.
 *
 * Objects are opaque handles. Every call returns a pirm_status; on failure
 * pirm_last_error() describes the problem (per thread). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * pirm_string_free().
 */
#ifndef PIRM_PIRM_H
#define PIRM_PIRM_H

#include <stddef.h>

#if defined(_WIN32)
#define PIRM_API __declspec(dllexport)
#else
#define PIRM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pirm_status {
  PIRM_OK = 0,
  PIRM_SOLVER_FAILURE = 1,
  PIRM_CONFIG_ERROR = 2,
  PIRM_STRICT_VIOLATION = 3,
  PIRM_INVALID_ARGUMENT = 4,
  PIRM_IO_ERROR = 5,
  PIRM_NO_ADMISSIBLE_INDEX = 6,
  PIRM_INTERNAL_ERROR = 7
} pirm_status;

typedef struct pirm_experiment pirm_experiment;
typedef struct pirm_space pirm_space;

PIRM_API const char* pirm_version(void);

/* Message of the last failed call on this thread; "" when none. */
PIRM_API const char* pirm_last_error(void);

PIRM_API void pirm_string_free(char* s);

/* Experiments ------------------------------------------------------------ */

PIRM_API pirm_status pirm_experiment_load(const char* path, pirm_experiment** out);
PIRM_API pirm_status pirm_experiment_parse(const char* json_text, pirm_experiment** out);
PIRM_API void pirm_experiment_free(pirm_experiment* exp);

/* Schedule validator reports as JSON. Returns PIRM_STRICT_VIOLATION when a
 * condition is violated (the report is still produced). */
PIRM_API pirm_status pirm_experiment_validate(const pirm_experiment* exp, char** report_json);

/* Runs the experiment and writes artifacts to out_dir (NULL: config value).
 * strict: -1 keeps the config setting, 0/1 override it. threads <= 0 keeps
 * the config setting. summary_json may be NULL. */
PIRM_API pirm_status pirm_experiment_solve(pirm_experiment* exp, const char* out_dir, int strict,
                                           int threads, char** summary_json);

/* Compares CSV traces of the same problem; report as JSON. */
PIRM_API pirm_status pirm_compare_traces(const char* const* paths, size_t count,
                                         char** report_json);

/* Stopping index for alpha_n = c0 (n+1)^-k. */
PIRM_API pirm_status pirm_stopping_index(double delta, double h, double eta, double c0, double k,
                                         long n_cap, long* index, int* clamped);

/* Spaces ----------------------------------------------------------------- */

/* p == 2 with hilbert != 0 gives the Hilbert space R^dim. */
PIRM_API pirm_status pirm_space_create(int hilbert, double p, int dim, pirm_space** out);
PIRM_API void pirm_space_free(pirm_space* space);
PIRM_API pirm_status pirm_space_norm(const pirm_space* space, const double* x, size_t n,
                                     double* out);
PIRM_API pirm_status pirm_space_duality_map(const pirm_space* space, const double* x, size_t n,
                                            double* out);

#ifdef __cplusplus
}
#endif

#endif

#ifndef ILLPOSE_ILLPOSE_H
#define ILLPOSE_ILLPOSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ILLPOSE_BUILDING)
#define ILLPOSE_API __attribute__((visibility("default")))
#else
#define ILLPOSE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum illpose_status {
    ILLPOSE_OK = 0,
    ILLPOSE_ERR_INVALID_ARGUMENT = 1,
    ILLPOSE_ERR_PRECONDITION = 2,
    ILLPOSE_ERR_WINDOW_OVERFLOW = 3,
    ILLPOSE_ERR_BANDWIDTH_OVERFLOW = 4,
    ILLPOSE_ERR_RESOLUTION = 5,
    ILLPOSE_ERR_NON_CONVERGENCE = 6,
    ILLPOSE_ERR_BLOWUP = 7,
    ILLPOSE_ERR_CONFIG = 8,
    ILLPOSE_ERR_IO = 9,
    ILLPOSE_ERR_INFEASIBLE = 10,
    ILLPOSE_ERR_NOT_FOUND = 11,
    ILLPOSE_ERR_INTERNAL = 99
} illpose_status;

typedef struct illpose_config illpose_config;
typedef struct illpose_report illpose_report;

/* Message of the last failed call on this thread; empty after a success. */
ILLPOSE_API const char* illpose_last_error(void);
ILLPOSE_API const char* illpose_status_name(illpose_status status);
ILLPOSE_API const char* illpose_version(void);

/* Experiment names accepted by illpose_config_new, excluding "suite". */
ILLPOSE_API size_t illpose_experiment_count(void);
ILLPOSE_API const char* illpose_experiment_name(size_t index);

/* experiment may be NULL and set later. */
ILLPOSE_API illpose_status illpose_config_new(const char* experiment, illpose_config** out);
ILLPOSE_API void illpose_config_free(illpose_config* cfg);
ILLPOSE_API illpose_status illpose_config_set_experiment(illpose_config* cfg, const char* experiment);
ILLPOSE_API illpose_status illpose_config_set_output_dir(illpose_config* cfg, const char* dir);
ILLPOSE_API illpose_status illpose_config_set_seed(illpose_config* cfg, uint64_t seed);
ILLPOSE_API illpose_status illpose_config_set(illpose_config* cfg, const char* key, const char* value);
/* "key=value" */
ILLPOSE_API illpose_status illpose_config_set_assignment(illpose_config* cfg, const char* assignment);
/* INI file; [section] keys become "section.key". */
ILLPOSE_API illpose_status illpose_config_load(illpose_config* cfg, const char* path);
ILLPOSE_API const char* illpose_config_experiment(const illpose_config* cfg);

/* Runs one experiment in memory; nothing is written. */
ILLPOSE_API illpose_status illpose_run_experiment(const illpose_config* cfg, illpose_report** out);

/* Runs the configured experiment, or all of them for "suite", and writes the
   artifacts. exit_code is 0 on success, 1 on a failed verdict or aborted run,
   2 on a configuration error. message stays valid until the next call on this
   thread. */
ILLPOSE_API illpose_status illpose_run(const illpose_config* cfg, int* exit_code, const char** message);

ILLPOSE_API void illpose_report_free(illpose_report* report);
ILLPOSE_API int illpose_report_passed(const illpose_report* report);
/* Strings live as long as the report. */
ILLPOSE_API const char* illpose_report_experiment(const illpose_report* report);
ILLPOSE_API const char* illpose_report_csv(const illpose_report* report);
ILLPOSE_API const char* illpose_report_summary(const illpose_report* report);
ILLPOSE_API size_t illpose_report_verdict_count(const illpose_report* report);
ILLPOSE_API const char* illpose_report_verdict_name(const illpose_report* report, size_t index);
ILLPOSE_API int illpose_report_verdict_passed(const illpose_report* report, size_t index);
ILLPOSE_API illpose_status illpose_report_metric(const illpose_report* report, const char* key, double* out);
ILLPOSE_API size_t illpose_report_row_count(const illpose_report* report);
ILLPOSE_API illpose_status illpose_report_value(const illpose_report* report, size_t row, const char* column, double* out);
ILLPOSE_API double illpose_report_wall_seconds(const illpose_report* report);
ILLPOSE_API illpose_status illpose_report_write(const illpose_report* report, const char* dir);

/* sqrt(2 pi Gamma(2s + 1)) / (2p)^{s + 1/2}, the H^s norm of 1/(x + ip) */
ILLPOSE_API illpose_status illpose_cauchy_hs_norm(double p, double s, double* out);
/* Region-map verdict at one (beta, s); theta, a, b may be NULL. */
ILLPOSE_API illpose_status illpose_classify_point(double beta, double s, int* feasible, double* theta, double* a,
                                                  double* b);
ILLPOSE_API double illpose_scaling_critical_index(double beta);

#ifdef __cplusplus
}
#endif

#endif

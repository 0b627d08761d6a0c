/*
 * rspi: rollout sampling approximate policy iteration.
 *
 * C interface over opaque handles. Every fallible call returns an rspi_status;
 * on failure a description is available from rspi_last_error() on the same
 * thread until the next failing call. Handles are not thread safe; distinct
 * handles may be used from different threads.
 */
#ifndef RSPI_RSPI_H
#define RSPI_RSPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RSPI_BUILDING_LIBRARY)
#    define RSPI_API __declspec(dllexport)
#  else
#    define RSPI_API __declspec(dllimport)
#  endif
#else
#  define RSPI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rspi_status {
  RSPI_OK = 0,
  RSPI_ERROR_INVALID_ARGUMENT = 1, /* bad key, value, or null pointer */
  RSPI_ERROR_STATE = 2,            /* call not valid for the handle's state */
  RSPI_ERROR_IO = 3,               /* file missing, unreadable or malformed */
  RSPI_ERROR_RUNTIME = 4           /* anything else raised while computing */
} rspi_status;

typedef struct rspi_config rspi_config;
typedef struct rspi_run rspi_run;
typedef struct rspi_policy rspi_policy;

typedef struct rspi_run_summary {
  int success;             /* 1 if the best policy passed the success test */
  int64_t metric;          /* steps balanced (pendulum) or steps to goal (mountain-car) */
  uint64_t m_total;        /* state-samples over all iterations */
  uint64_t rollouts_total; /* m_total * number of actions */
  uint64_t iterations;
  int64_t wall_ms;
  double best_performance; /* estimated discounted return of the best policy */
} rspi_run_summary;

RSPI_API const char* rspi_version(void);
RSPI_API const char* rspi_last_error(void);
RSPI_API const char* rspi_status_name(rspi_status status);

/* Configuration: flat key=value pairs. Unknown keys and unparsable values are
 * rejected by rspi_config_set. */
RSPI_API rspi_status rspi_config_create(rspi_config** out);
RSPI_API void rspi_config_destroy(rspi_config* config);
RSPI_API rspi_status rspi_config_set(rspi_config* config, const char* key, const char* value);
RSPI_API rspi_status rspi_config_load_file(rspi_config* config, const char* path);
/* Copies the effective value (set or default) into buf, NUL terminated.
 * *needed receives the required size including the terminator. */
RSPI_API rspi_status rspi_config_get(const rspi_config* config, const char* key, char* buf, size_t buf_size,
                                     size_t* needed);

/* Single run: policy iteration then success evaluation of the best policy. */
RSPI_API rspi_status rspi_run_execute(const rspi_config* config, rspi_run** out);
RSPI_API void rspi_run_destroy(rspi_run* run);
RSPI_API rspi_status rspi_run_get_summary(const rspi_run* run, rspi_run_summary* out);
/* Appends one row to a records CSV, writing the header if the file is new or empty. */
RSPI_API rspi_status rspi_run_append_record(const rspi_run* run, const char* records_path);
RSPI_API rspi_status rspi_run_write_iterations(const rspi_run* run, const char* path);
RSPI_API rspi_status rspi_run_best_policy(const rspi_run* run, rspi_policy** out);

/* Sweep over the grid.* keys. Records are written to records_path in
 * (cell, seed) order; *out_count receives the number of runs. */
RSPI_API rspi_status rspi_grid_execute(const rspi_config* config, const char* records_path, size_t parallelism,
                                       size_t* out_count);

RSPI_API rspi_status rspi_policy_load(const char* path, rspi_policy** out);
RSPI_API rspi_status rspi_policy_save(const rspi_policy* policy, const char* path);
RSPI_API void rspi_policy_destroy(rspi_policy* policy);
RSPI_API rspi_status rspi_policy_num_actions(const rspi_policy* policy, size_t* out);
/* Chooses an action for a state of dimension state_dim. */
RSPI_API rspi_status rspi_policy_act(const rspi_policy* policy, const double* state, size_t state_dim,
                                     uint64_t seed, size_t* out_action);
/* Success test on the domain named by the config's "domain" key. */
RSPI_API rspi_status rspi_policy_evaluate(const rspi_policy* policy, const rspi_config* config, uint64_t seed,
                                          int* out_success, int64_t* out_metric);

/* Reads a records CSV and writes the cumulative success curve CSV. */
RSPI_API rspi_status rspi_curve_write(const char* records_path, const char* curve_path);

#ifdef __cplusplus
}
#endif

#endif /* RSPI_RSPI_H */

/* C interface of the beamsched library. All handles are opaque; every call
 * that can fail returns a bs_status and leaves a message for bs_last_error()
 * on the calling thread. Strings returned through char** are owned by the
 * caller and released with bs_string_free. */
#ifndef BEAMSCHED_H
#define BEAMSCHED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BEAMSCHED_BUILDING_LIBRARY)
#    define BS_API __declspec(dllexport)
#  else
#    define BS_API __declspec(dllimport)
#  endif
#else
#  define BS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* The first six values double as CLI exit codes. */
typedef enum bs_status {
  BS_OK = 0,
  BS_PROBE_FAILED = 1,
  BS_CONFIG = 2,
  BS_INDEX_ANOMALY = 3,
  BS_DUAL_SETUP = 4,
  BS_CONVERGENCE = 5,
  BS_NUMERICAL = 6,
  BS_IO = 7,
  BS_INVALID_ARGUMENT = 8,
  BS_INTERNAL = 9
} bs_status;

typedef struct bs_scenario bs_scenario;
typedef struct bs_result bs_result;

BS_API const char* bs_version(void);
BS_API const char* bs_status_name(bs_status status);
/* Message of the last failed call on this thread; "" if none. */
BS_API const char* bs_last_error(void);
BS_API void bs_string_free(char* s);

/* 0 quiet, 1 warnings (default), 2 info. */
BS_API void bs_set_log_level(int level);
/* requested > 0 wins, then RMAB_BEAMSCHED_THREADS, then hardware threads. */
BS_API int bs_resolve_threads(int requested);

/* ---- scenarios ---- */

BS_API bs_status bs_scenario_load(const char* path, bs_scenario** out);
BS_API bs_status bs_scenario_parse(const char* json_text, bs_scenario** out);
BS_API void bs_scenario_free(bs_scenario* scenario);
BS_API bs_status bs_scenario_to_json(const bs_scenario* scenario, char** out);
BS_API int bs_scenario_target_count(const bs_scenario* scenario);
BS_API int bs_scenario_radars(const bs_scenario* scenario);
BS_API int bs_scenario_horizon(const bs_scenario* scenario);
BS_API int bs_scenario_is_scalar(const bs_scenario* scenario);

/* ---- single episodes and indices ---- */

/* Policy names: "whittle" (alias "mp"), "myopic", "tec" (alias "tev"). */
BS_API int bs_policy_known(const char* name);

/* One episode from the initial states of `seed`. actions_out, when not NULL,
 * receives horizon * N bytes in slot-major order. */
BS_API bs_status bs_run_episode(const bs_scenario* scenario, const char* policy, int horizon, uint64_t seed,
                                double* cost_out, unsigned char* actions_out);

/* MP index of target `target` at the isotropic state level * I. */
BS_API bs_status bs_mp_index(const bs_scenario* scenario, int target, double level, double* out);

/* Index table CSV: P_or_trace_over_L,mp,tec,myopic,g,flag. Rows with g <= 0 carry flag 1
 * and an empty mp; the call then returns BS_INDEX_ANOMALY after writing
 * the whole table. tau <= 0 keeps the scenario's truncation. */
BS_API bs_status bs_index_dump(const bs_scenario* scenario, int target, double p_min, double p_max, double step,
                               int tau, const char* path, int* anomalies_out);

/* ---- Monte Carlo ---- */

typedef struct bs_simulate_options {
  int replications;  /* N_mc, default 100 */
  uint64_t seed;     /* master seed, default 1 */
  int horizon;       /* < 0: scenario horizon */
  int threads;       /* <= 0: resolved */
  int nonneg_filter; /* default 1 */
  int with_bound;    /* compute V^D and gaps (scalar scenarios), default 0 */
  int anomaly_ratio; /* 1: states with g <= 0 use f/g and are counted instead of failing, default 0 */
} bs_simulate_options;

typedef struct bs_policy_summary {
  const char* policy; /* valid while the result lives */
  double mean_cost;
  double std_error;
  double runtime_ms;
  double tail_bound;
  int has_gap;
  double gap_percent;
  long index_anomalies;
} bs_policy_summary;

BS_API void bs_simulate_options_init(bs_simulate_options* options);
BS_API bs_status bs_simulate(const bs_scenario* scenario, const char* const* policies, size_t policy_count,
                             const bs_simulate_options* options, bs_result** out);
BS_API void bs_result_free(bs_result* result);
BS_API size_t bs_result_policy_count(const bs_result* result);
BS_API bs_status bs_result_policy(const bs_result* result, size_t index, bs_policy_summary* out);
/* Per-replication discounted costs of policy `index`; returns the count. */
BS_API size_t bs_result_costs(const bs_result* result, size_t index, const double** costs);
BS_API bs_status bs_result_dual_bound(const bs_result* result, double* out);
BS_API bs_status bs_result_write_csv(const bs_result* result, const char* path);

/* ---- Lagrangian bound ---- */

typedef struct bs_bound_options {
  int has_lambda_max;
  double lambda_max;
  int has_tol;
  double tol;
  int replications; /* initial-state draws averaged, default 1 */
  uint64_t seed;
  int threads;
} bs_bound_options;

BS_API void bs_bound_options_init(bs_bound_options* options);
/* trace_path (may be NULL) receives the lambda trace of the first draw. */
BS_API bs_status bs_lower_bound(const bs_scenario* scenario, const bs_bound_options* options, const char* trace_path,
                                double* lambda_star, double* bound);

/* ---- PCL probes ---- */

typedef struct bs_pcl_options {
  double p_min, p_max, step; /* state grid, default 0.01..20 step 0.01 */
  const double* thresholds;  /* z grid, default {4, 10} when NULL */
  size_t threshold_count;
  double tolerance; /* monotonicity tolerance, default 1e-9 */
  int threads;
} bs_pcl_options;

BS_API void bs_pcl_options_init(bs_pcl_options* options);
/* Probes every target; writes per-probe CSVs and summary.txt into out_dir.
 * Returns BS_PROBE_FAILED when any probe fails; summary_out (may be NULL)
 * receives the summary text in both cases. */
BS_API bs_status bs_pcl_check(const bs_scenario* scenario, const bs_pcl_options* options, const char* out_dir,
                              char** summary_out);

/* ---- presets ---- */

/* Newline-separated preset names. */
BS_API bs_status bs_preset_names(char** out);
BS_API bs_status bs_reproduce(const char* preset, const char* out_dir, uint64_t seed, int replications,
                              int threads, const int* sizes, size_t size_count, int svg, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* BEAMSCHED_H */

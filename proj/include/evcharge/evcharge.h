/* Copyright 2026 The evcharge Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the evcharge robust EV charging scheduler.
 *
 * All objects are opaque handles created by an evc_*_create/load/solve call
 * and released by the matching evc_*_free. Every fallible function returns an
 * evc_status; on failure a message is available from evc_last_error() on the
 * calling thread until the next failing call on that thread.
 *
 * Functions that return text take (buf, cap, needed): the text including its
 * terminating NUL is copied when cap is large enough, otherwise
 * EVC_ERR_BUFFER_TOO_SMALL is returned. *needed always receives the required
 * size. Passing buf = NULL, cap = 0 is the usual way to query the size.
 */
#ifndef EVCHARGE_EVCHARGE_H_
#define EVCHARGE_EVCHARGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EVC_BUILDING_LIBRARY)
#define EVC_API __attribute__((visibility("default")))
#else
#define EVC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evc_status {
  EVC_OK = 0,
  EVC_ERR_INVALID_ARGUMENT = 1,
  EVC_ERR_PARSE = 2,
  EVC_ERR_VALIDATION = 3,
  EVC_ERR_IO = 4,
  EVC_ERR_BUFFER_TOO_SMALL = 5,
  EVC_ERR_TOO_LARGE = 6,
  EVC_ERR_INTERNAL = 99
} evc_status;

typedef enum evc_solve_status {
  EVC_SOLVE_CONVERGED = 0,
  EVC_SOLVE_ITER_LIMIT = 1,
  EVC_SOLVE_INFEASIBLE = 2
} evc_solve_status;

typedef enum evc_demand_policy {
  EVC_POLICY_CLAMP = 0,
  EVC_POLICY_REJECT = 1
} evc_demand_policy;

typedef struct evc_tariff evc_tariff;
typedef struct evc_sessions evc_sessions;
typedef struct evc_instance evc_instance;
typedef struct evc_solution evc_solution;
typedef struct evc_sweep evc_sweep;

EVC_API const char* evc_version(void);
EVC_API const char* evc_last_error(void);
EVC_API const char* evc_status_name(evc_status status);

/* ---- tariff ------------------------------------------------------------ */

EVC_API evc_status evc_tariff_load(const char* path, evc_tariff** out);
EVC_API evc_status evc_tariff_parse(const char* json_text, evc_tariff** out);
/* Vietnam off-peak/peak/normal preset in thousand VND per kWh. */
EVC_API evc_status evc_tariff_vietnam(evc_tariff** out);
EVC_API evc_status evc_tariff_price_at(const evc_tariff* tariff, int minute,
                                       double* price);
/* Writes num_slots minute-weighted slot prices into out. horizon_start is an
 * ISO-8601 local timestamp. */
EVC_API evc_status evc_tariff_price_vector(const evc_tariff* tariff,
                                           const char* horizon_start,
                                           int slot_minutes, int num_slots,
                                           double* out);
EVC_API evc_status evc_tariff_to_json(const evc_tariff* tariff, char* buf,
                                      size_t cap, size_t* needed);
EVC_API void evc_tariff_free(evc_tariff* tariff);

/* ---- sessions ---------------------------------------------------------- */

/* Loads a session CSV. Structural problems fail with EVC_ERR_PARSE; rows
 * that parse but violate session invariants are kept as issues and excluded
 * from the list. */
EVC_API evc_status evc_sessions_load(const char* path, evc_sessions** out);
EVC_API evc_status evc_sessions_parse(const char* csv_text, evc_sessions** out);
/* config_json may be NULL for the default day profile. */
EVC_API evc_status evc_sessions_generate(uint64_t seed, size_t n,
                                         const char* config_json,
                                         evc_sessions** out);
/* Metadata document describing the generator distributions. */
EVC_API evc_status evc_sessions_generator_metadata(uint64_t seed, size_t n,
                                                   const char* config_json,
                                                   char* buf, size_t cap,
                                                   size_t* needed);
EVC_API size_t evc_sessions_count(const evc_sessions* sessions);
EVC_API size_t evc_sessions_issue_count(const evc_sessions* sessions);
/* JSON lines {"row","session_id","reason","detail"}, one per issue. */
EVC_API evc_status evc_sessions_issues_jsonl(const evc_sessions* sessions,
                                             char* buf, size_t cap,
                                             size_t* needed);
EVC_API evc_status evc_sessions_write_csv(const evc_sessions* sessions,
                                          const char* path);
EVC_API void evc_sessions_free(evc_sessions* sessions);

/* ---- instance ---------------------------------------------------------- */

typedef struct evc_instance_params {
  const char* horizon_start; /* ISO-8601; NULL = midnight of earliest arrival */
  int slot_minutes;          /* divides 1440 */
  int num_slots;             /* 0 = one day */
  double alpha;
  double rho;
  double capacity_kw;              /* used when capacity_profile is NULL */
  const double* capacity_profile;  /* optional, capacity_len entries */
  size_t capacity_len;
  double max_rate_kw;
  evc_demand_policy policy;
} evc_instance_params;

/* slot 60 min, one day, alpha 1, rho 5, capacity 300 kW, rate cap 7 kW,
 * clamp policy. */
EVC_API void evc_instance_params_default(evc_instance_params* params);

EVC_API evc_status evc_instance_build(const evc_instance_params* params,
                                      const evc_tariff* tariff,
                                      const evc_sessions* sessions,
                                      evc_instance** out);
/* Instance JSON: {num_slots, slot_minutes, horizon_start, alpha, rho,
 * capacity_kw, max_rate_kw, tariff_file, sessions_file}. */
EVC_API evc_status evc_instance_load(const char* path, evc_instance** out);
EVC_API size_t evc_instance_num_evs(const evc_instance* instance);
EVC_API size_t evc_instance_num_slots(const evc_instance* instance);
EVC_API double evc_instance_slot_hours(const evc_instance* instance);
/* Sessions dropped or clamped while discretizing. */
EVC_API size_t evc_instance_rejection_count(const evc_instance* instance);
/* JSON lines {"session_id","reason","detail"}. */
EVC_API evc_status evc_instance_rejections_jsonl(const evc_instance* instance,
                                                 char* buf, size_t cap,
                                                 size_t* needed);
EVC_API evc_status evc_instance_fingerprint(const evc_instance* instance,
                                            char* buf, size_t cap,
                                            size_t* needed);
/* Nominal slot prices (num_slots entries). */
EVC_API evc_status evc_instance_prices(const evc_instance* instance,
                                       double* out, size_t len);
/* Looks for a slot range whose capacity cannot cover the EVs confined to it.
 * *found receives 1 with a description in buf when one exists. */
EVC_API evc_status evc_instance_infeasibility(const evc_instance* instance,
                                              int* found, char* buf, size_t cap,
                                              size_t* needed);
EVC_API void evc_instance_free(evc_instance* instance);

/* ---- solver ------------------------------------------------------------ */

typedef struct evc_solver_config {
  double step_size;
  int max_iters;
  double tol_primal;
  double tol_dual;
  double over_relaxation;
  int adaptive_step; /* nonzero enables residual balancing */
} evc_solver_config;

EVC_API void evc_solver_config_default(evc_solver_config* config);
/* Reads any subset of the fields above from a JSON object. */
EVC_API evc_status evc_solver_config_parse(const char* json_text,
                                           evc_solver_config* config);

typedef struct evc_solve_report {
  evc_solve_status status;
  int iterations;
  double objective;
  double nominal_cost;
  double fast_term;
  double penalty_term;
  double primal_residual;
  double dual_residual;
} evc_solve_report;

/* Runs the ADMM solver. A non-converged solve still returns EVC_OK and a
 * solution whose report carries the status. config may be NULL. */
EVC_API evc_status evc_solve(const evc_instance* instance,
                             const evc_solver_config* config,
                             evc_solution** out);
EVC_API evc_status evc_solution_report(const evc_solution* solution,
                                       evc_solve_report* report);
/* Dense row-major n x tau rates in kW; len must be at least n * tau. */
EVC_API evc_status evc_solution_rates(const evc_solution* solution, double* out,
                                      size_t len);
/* Writes schedule.csv, schedule.json, report.json and metrics.csv into dir
 * (created if missing). */
EVC_API evc_status evc_solution_write(const evc_instance* instance,
                                      const evc_solution* solution,
                                      const char* dir);
/* Checks box, window, energy and capacity at eps; *ok receives 1 or 0. */
EVC_API evc_status evc_solution_check(const evc_instance* instance,
                                      const evc_solution* solution, double eps,
                                      int* ok);
EVC_API void evc_solution_free(evc_solution* solution);

/* Exhaustive-grid reference solve for n <= 3, tau <= 4 (EVC_ERR_TOO_LARGE
 * otherwise). rates may be NULL. */
EVC_API evc_status evc_oracle_solve(const evc_instance* instance,
                                    int grid_points, double* objective,
                                    double* rates, size_t len);

/* ---- metrics ----------------------------------------------------------- */

typedef struct evc_metrics {
  double total_cost;
  double total_charging_time_hours;
  double active_threshold_kw;
} evc_metrics;

/* profile may be NULL; otherwise receives num_slots column sums. */
EVC_API evc_status evc_solution_metrics(const evc_instance* instance,
                                        const evc_solution* solution,
                                        double eps_active, evc_metrics* out,
                                        double* profile, size_t len);

/* ---- experiments ------------------------------------------------------- */

EVC_API evc_status evc_sweep_alpha(const evc_instance* instance,
                                   const double* alphas, size_t count,
                                   const evc_solver_config* config,
                                   evc_sweep** out);
EVC_API size_t evc_sweep_size(const evc_sweep* sweep);

typedef struct evc_sweep_row {
  double alpha;
  double cost;
  double charging_time_hours;
  double objective;
  double fast_term;
  double penalty_term;
  evc_solve_status status;
} evc_sweep_row;

EVC_API evc_status evc_sweep_row_at(const evc_sweep* sweep, size_t index,
                                    evc_sweep_row* row);
/* sweep.csv, tradeoff.csv, profile_<alpha>.csv and an SVG per CSV. */
EVC_API evc_status evc_sweep_write(const evc_sweep* sweep, const char* dir);
EVC_API void evc_sweep_free(evc_sweep* sweep);

typedef struct evc_montecarlo_report {
  size_t samples;
  size_t violations;
  double max_gap;
  double tightness;
} evc_montecarlo_report;

/* path may be NULL; otherwise the report is also written there as JSON. */
EVC_API evc_status evc_monte_carlo(const evc_instance* instance,
                                   const evc_solution* solution, size_t samples,
                                   uint64_t seed, int directed,
                                   evc_montecarlo_report* report,
                                   const char* path);

/* ---- utilities --------------------------------------------------------- */

/* Lowercase hex SHA-256 of a file's bytes (65 bytes with NUL). */
EVC_API evc_status evc_digest_file(const char* path, char* buf, size_t cap,
                                   size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* EVCHARGE_EVCHARGE_H_ */

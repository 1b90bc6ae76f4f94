/*
 * C interface to the ISAC CRB solver.
 *
 * Handles are opaque and owned by the caller; every *_create / solve call
 * that returns ISAC_OK (or ISAC_ERR_INFEASIBLE for isac_solve) hands back an
 * object that must be released with the matching *_destroy. Failing calls
 * leave a message retrievable with isac_last_error() on the same thread.
 *
 * Complex arrays are interleaved (re, im) pairs; matrices are column-major.
 */
#ifndef ISAC_H
#define ISAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ISAC_API __declspec(dllexport)
#else
#define ISAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isac_status {
  ISAC_OK = 0,
  ISAC_ERR_INVALID_ARGUMENT = 1,
  ISAC_ERR_DIMENSION_MISMATCH = 2,
  ISAC_ERR_RANK_DEFICIENT_CHANNEL = 3,
  ISAC_ERR_NUMERICAL_FAILURE = 4,
  ISAC_ERR_INVALID_BRACKET = 5,
  ISAC_ERR_SINGULAR_COVARIANCE = 6,
  ISAC_ERR_FIXED_POINT_DIVERGED = 7,
  ISAC_ERR_ILL_CONDITIONED_DUAL = 8,
  ISAC_ERR_NUMERICAL_DIVERGENCE = 9,
  ISAC_ERR_EXTRACTION_DEGENERATE = 10,
  ISAC_ERR_NOT_PSD = 11,
  ISAC_ERR_INTERNAL_CONSISTENCY = 12,
  ISAC_ERR_INFEASIBLE = 13,
  ISAC_ERR_UNAVAILABLE = 14, /* requested data was not computed */
  ISAC_ERR_UNKNOWN = 99
} isac_status;

typedef struct isac_scenario isac_scenario;
typedef struct isac_result isac_result;
typedef struct isac_verify_report isac_verify_report;

ISAC_API const char* isac_version(void);
ISAC_API const char* isac_status_string(isac_status status);
/* Message of the last failing call on this thread ("" if none). */
ISAC_API const char* isac_last_error(void);

/* Linear units: powers in mW, thresholds as ratios (one per user). */
ISAC_API isac_status isac_scenario_create(int n_tx, int n_users, double power_budget,
                                          const double* sinr_thresholds, double noise_power,
                                          isac_scenario** out);
ISAC_API void isac_scenario_destroy(isac_scenario* scenario);
/* i.i.d. CN(0, 1) channel from a seed; bit-identical across platforms. */
ISAC_API isac_status isac_scenario_generate_channel(isac_scenario* scenario, uint64_t seed);
/* `h` holds 2 * n_tx * n_users doubles. */
ISAC_API isac_status isac_scenario_set_channel(isac_scenario* scenario, const double* h);
ISAC_API isac_status isac_scenario_get_channel(const isac_scenario* scenario, double* h);

ISAC_API isac_status isac_feasibility(const isac_scenario* scenario, double* p_low,
                                      int* feasible);

typedef struct isac_solver_options {
  double tau;             /* <= 0 picks the default stepsize */
  double delta;
  double tol_violation;
  long max_iterations;
  int full_check;         /* dense diagnostics after recovery */
  int flip_z_sign;        /* debug only */
} isac_solver_options;

ISAC_API void isac_solver_options_default(isac_solver_options* options);

/*
 * Runs the whole pipeline. An infeasible scenario returns ISAC_ERR_INFEASIBLE
 * together with a result handle that carries p_low; any other non-OK status
 * leaves *out NULL.
 */
ISAC_API isac_status isac_solve(const isac_scenario* scenario, const isac_solver_options* options,
                                isac_result** out);
ISAC_API void isac_result_destroy(isac_result* result);

ISAC_API int isac_result_feasible(const isac_result* result);
ISAC_API double isac_result_p_low(const isac_result* result);
ISAC_API int isac_result_degenerate(const isac_result* result);
ISAC_API int isac_result_converged(const isac_result* result); /* 1 on the closed-form path */
ISAC_API long isac_result_iterations(const isac_result* result);
ISAC_API double isac_result_final_violation(const isac_result* result);
ISAC_API double isac_result_objective(const isac_result* result);         /* NaN if infeasible */
ISAC_API double isac_result_reduced_objective(const isac_result* result); /* NaN if infeasible */
ISAC_API double isac_result_setup_seconds(const isac_result* result);
ISAC_API double isac_result_iter_seconds(const isac_result* result);
ISAC_API double isac_result_min_sinr_margin(const isac_result* result);   /* NaN if infeasible */
/* "extracted", "realigned", "degenerate_witness" or "none". */
ISAC_API const char* isac_result_origin(const isac_result* result);
/* n_users doubles. */
ISAC_API isac_status isac_result_sinr(const isac_result* result, double* sinr);
/* 2 * n_tx * n_users doubles, column k is w_k. */
ISAC_API isac_status isac_result_beamformers(const isac_result* result, double* w);

typedef struct isac_diagnostics {
  double min_sinr_margin;
  double power_residual;
  double sensing_min_eig;
  double decomposition_gap;
  double null_leakage;
  double structure_gap;
  double objective_full;
  double objective_gap;
  double rank_one_gap;
} isac_diagnostics;

/* ISAC_ERR_UNAVAILABLE unless the solve ran with full_check. */
ISAC_API isac_status isac_result_diagnostics(const isac_result* result, isac_diagnostics* out);

/* Solution document; release with isac_string_free. */
ISAC_API isac_status isac_result_json(const isac_result* result, char** out);
ISAC_API void isac_string_free(char* s);

ISAC_API isac_status isac_verify(int full, int flip_z_sign, isac_verify_report** out);
ISAC_API void isac_verify_destroy(isac_verify_report* report);
ISAC_API int isac_verify_count(const isac_verify_report* report);
/* `name` stays valid until the report is destroyed. */
ISAC_API isac_status isac_verify_item(const isac_verify_report* report, int index,
                                      const char** name, double* measured, double* threshold,
                                      int* passed);

#ifdef __cplusplus
}
#endif

#endif /* ISAC_H */

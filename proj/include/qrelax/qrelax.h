/*
 * Copyright 2026 The qrelax Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
 */

#ifndef QRELAX_QRELAX_H
#define QRELAX_QRELAX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QRELAX_BUILDING_LIBRARY)
#define QRELAX_API __declspec(dllexport)
#else
#define QRELAX_API __declspec(dllimport)
#endif
#else
#define QRELAX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. Nonzero values match the library's internal error kinds. */
typedef enum {
  QRELAX_OK = 0,
  QRELAX_ERR_INVALID_ARGUMENT = 1,
  QRELAX_ERR_INVALID_MATRIX,
  QRELAX_ERR_NOT_PSD,
  QRELAX_ERR_PARSE,
  QRELAX_ERR_DIM,
  QRELAX_ERR_INVALID_CONSTRAINT,
  QRELAX_ERR_RANGE_CONDITION,
  QRELAX_ERR_EMPTY_INTERIOR,
  QRELAX_ERR_SETTING_VIOLATED,
  QRELAX_ERR_ALPHA_INVALID,
  QRELAX_ERR_SIZE_CAP,
  QRELAX_ERR_NO_FEASIBLE_POINT,
  QRELAX_ERR_FIXTURE_NOT_FOUND,
  QRELAX_ERR_UNKNOWN_RELAXATION,
  QRELAX_ERR_SOLVER_FAILED,
  QRELAX_ERR_IO,
  QRELAX_ERR_INTERNAL = 99
} qrelax_status;

/* Solver outcome of one relaxation. */
typedef enum {
  QRELAX_SOLVE_OPTIMAL = 0,
  QRELAX_SOLVE_INFEASIBLE,
  QRELAX_SOLVE_UNBOUNDED,
  QRELAX_SOLVE_INACCURATE,
  QRELAX_SOLVE_FAILED,
  QRELAX_SOLVE_TIMED_OUT
} qrelax_solve_status;

typedef struct qrelax_instance qrelax_instance;
typedef struct qrelax_result qrelax_result;

typedef struct {
  double featol;
  double gaptol;
  double time_limit; /* seconds, 0 = none */
  int max_iter;
  int verbosity;
  int jobs; /* worker threads, 0 = all cores */
} qrelax_options;

typedef struct {
  int n, l, k, m;
  uint64_t seed;
  int phi;          /* negative eigenvalues per nonconvex constraint, 0 = n/2 */
  int figures_mode; /* objective Q0 = I - sum Q_i */
  int nonneg;       /* append x >= 0 rows */
} qrelax_gen_spec;

typedef struct {
  int n, l, k;
  const int* phis;
  int num_phis;
  int m_min, m_max;
  int reps;
  uint64_t base_seed;
} qrelax_sweep_spec;

QRELAX_API const char* qrelax_version(void);
QRELAX_API const char* qrelax_status_name(int status);
/* Message of the last failed call on this thread. */
QRELAX_API const char* qrelax_last_error(void);
/* Strings returned through char** out parameters. */
QRELAX_API void qrelax_string_free(char* s);

QRELAX_API void qrelax_options_init(qrelax_options* opts);
/* Applies QRELAX_FEATOL, QRELAX_GAPTOL, QRELAX_TIME_LIMIT, QRELAX_JOBS. */
QRELAX_API qrelax_status qrelax_options_from_env(qrelax_options* opts);

QRELAX_API qrelax_status qrelax_instance_load(const char* path, qrelax_instance** out);
QRELAX_API qrelax_status qrelax_instance_parse(const char* text, qrelax_instance** out);
QRELAX_API qrelax_status qrelax_instance_generate(const qrelax_gen_spec* spec, qrelax_instance** out);
QRELAX_API qrelax_status qrelax_instance_serialize(const qrelax_instance* inst, char** out);
QRELAX_API qrelax_status qrelax_instance_save(const qrelax_instance* inst, const char* path);
QRELAX_API qrelax_status qrelax_instance_info(const qrelax_instance* inst, int* n, int* l, int* k, int* m);
QRELAX_API const char* qrelax_instance_name(const qrelax_instance* inst);
QRELAX_API void qrelax_instance_free(qrelax_instance* inst);

/* Comma separated ladder names. */
QRELAX_API qrelax_status qrelax_relaxation_names(char** out);

/* alpha_spec may be NULL; format is "table", "csv" or "structured". command
   is echoed in the report header and may be NULL. */
QRELAX_API qrelax_status qrelax_solve(const qrelax_instance* inst, const char* relaxation,
                                      const char* alpha_spec, const qrelax_options* opts,
                                      qrelax_result** out);
QRELAX_API int qrelax_result_status(const qrelax_result* r);
QRELAX_API double qrelax_result_bound(const qrelax_result* r);
/* Copies up to cap entries of the recovered x; returns n. */
QRELAX_API int qrelax_result_x(const qrelax_result* r, double* buf, int cap);
QRELAX_API qrelax_status qrelax_result_report(const qrelax_result* r, const char* format,
                                              const char* command, char** out);
QRELAX_API void qrelax_result_free(qrelax_result* r);

/* Batch results. Computed once, rendered in any format. */
typedef struct qrelax_report qrelax_report;

/* relaxations is a comma separated list. */
QRELAX_API qrelax_status qrelax_compare(const qrelax_instance* inst, const char* relaxations,
                                        const char* alpha_spec, int with_oracle,
                                        const qrelax_options* opts, qrelax_report** out);

/* check is a comma separated list of check ids or "all". */
QRELAX_API qrelax_status qrelax_verify(const qrelax_instance* inst, const char* check,
                                       const char* alpha_spec, const qrelax_options* opts,
                                       qrelax_report** out);

QRELAX_API qrelax_status qrelax_oracle(const qrelax_instance* inst, const qrelax_options* opts,
                                       qrelax_report** out);

QRELAX_API void qrelax_sweep_spec_init(qrelax_sweep_spec* spec);
QRELAX_API qrelax_status qrelax_sweep(const qrelax_sweep_spec* spec, const qrelax_options* opts,
                                      qrelax_report** out);

/* Runs the bundled reference cases from fixture_dir. */
QRELAX_API qrelax_status qrelax_reference_examples(const char* fixture_dir, const qrelax_options* opts,
                                                   qrelax_report** out);

QRELAX_API qrelax_status qrelax_report_render(const qrelax_report* r, const char* format,
                                              const char* command, char** out);
/* Relaxations that produced no usable bound. */
QRELAX_API int qrelax_report_failures(const qrelax_report* r);
/* Ordering violations, bounds above the oracle, failed checks or reference
   mismatches, depending on the report kind. */
QRELAX_API int qrelax_report_violations(const qrelax_report* r);
/* Oracle value, or the smallest improvement ratio of a sweep; NaN otherwise. */
QRELAX_API double qrelax_report_value(const qrelax_report* r);
QRELAX_API void qrelax_report_free(qrelax_report* r);

/* Conic program of one relaxation in CBF text. */
QRELAX_API qrelax_status qrelax_export_cbf(const qrelax_instance* inst, const char* relaxation,
                                           const char* alpha_spec, const qrelax_options* opts,
                                           char** out);

#ifdef __cplusplus
}
#endif

#endif

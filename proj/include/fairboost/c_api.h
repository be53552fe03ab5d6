/*
 * Copyright 2026 The fairboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef FAIRBOOST_C_API_H_
#define FAIRBOOST_C_API_H_

/*
 * C interface of the fairboost shared library. All entry points return a
 * status code (FAIRBOOST_OK on success); fairboost_last_error() describes
 * the most recent failure on the calling thread. Objects are opaque handles
 * released with the matching _free function.
 *
 * Options strings use the same flat key=value format as the CLI config
 * files, one pair per line. Unknown keys are rejected.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define FAIRBOOST_OK 0
#define FAIRBOOST_ERR_RUNTIME 1
#define FAIRBOOST_ERR_CONFIG 2
#define FAIRBOOST_ERR_DATA 3
#define FAIRBOOST_ERR_SOLVER 4

typedef struct FairboostDataset* FairboostDatasetHandle;
typedef struct FairboostMetric* FairboostMetricHandle;
typedef struct FairboostModel* FairboostModelHandle;

const char* fairboost_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* fairboost_last_error(void);

/* ---- datasets ---- */

int fairboost_dataset_from_csv(const char* csv_path, const char* schema_path,
                               FairboostDatasetHandle* out);

int fairboost_dataset_synthetic(size_t n_total, size_t n_majority, double shift,
                                uint64_t seed, FairboostDatasetHandle* out);

int fairboost_dataset_split(FairboostDatasetHandle data, double test_fraction,
                            uint64_t seed, FairboostDatasetHandle* out_train,
                            FairboostDatasetHandle* out_test);

int fairboost_dataset_save(FairboostDatasetHandle data, const char* path);
int fairboost_dataset_load(const char* path, FairboostDatasetHandle* out);
int fairboost_dataset_dims(FairboostDatasetHandle data, size_t* n, size_t* d);
void fairboost_dataset_free(FairboostDatasetHandle data);

/* ---- fair metric ---- */

/* Options: logistic_l2 (default 0.1), ridge_grid (comma list, default
 * 0.1,1,10), fit_directions (0/1, default 1). */
int fairboost_metric_fit(FairboostDatasetHandle data, const char* options,
                         FairboostMetricHandle* out);

int fairboost_metric_save(FairboostMetricHandle metric, const char* path);
int fairboost_metric_load(const char* path, FairboostMetricHandle* out);
int fairboost_metric_dim(FairboostMetricHandle metric, size_t* d);
void fairboost_metric_free(FairboostMetricHandle metric);

/* ---- training ---- */

/* Options: method (budro|baseline|project|reweigh), epsilon, steps, solver
 * (dual-bisection|dual-sgd|entropic|entropic-sgd), gamma, batch_size,
 * alpha0, momentum, solver_iters, tol, eta0, max_depth, eta, lambda,
 * min_child_weight, scale_pos_weight, seed, group (reweigh), tau, threads.
 * `steps` counts trees for every method; budro spends the first tree on the
 * plain warm-up step, so it requires steps >= 2. The metric handle may be
 * null for methods that do not use one (baseline, reweigh). trace_path may
 * be null. */
int fairboost_train(FairboostDatasetHandle data, FairboostMetricHandle metric,
                    const char* options, FairboostModelHandle* out,
                    const char* trace_path);

int fairboost_model_save(FairboostModelHandle model, const char* path);
int fairboost_model_load(const char* path, FairboostModelHandle* out);
void fairboost_model_free(FairboostModelHandle model);

/* Margins for n rows of d features (row-major). */
int fairboost_model_predict(FairboostModelHandle model, const double* features,
                            size_t n, size_t d, double* out_margins);

/* ---- auditing ---- */

/* Options: epsilon (repeatable or comma list), gap (repeatable specs),
 * consistency (repeatable specs), delta, solver, gamma, batch_size, alpha0,
 * momentum, solver_iters, tol, eta0, seed. Writes a report file; out_text
 * (optional) receives a malloc'd copy of the report, caller frees with
 * fairboost_free_string. */
int fairboost_audit(FairboostModelHandle model, FairboostDatasetHandle data,
                    FairboostMetricHandle metric, const char* options,
                    const char* report_path, char** out_text);

/* ---- standalone inner solves ---- */

/* Options: solver, epsilon (overrides the instance value when set), gamma,
 * root_tol, batch_size, alpha0, momentum, solver_iters, tol, eta0, seed.
 * Any of the out pointers may be null. */
int fairboost_solve_instance(const char* instance_path, const char* options,
                             const char* plan_path, double* out_dual,
                             double* out_primal, double* out_eta);

void fairboost_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FAIRBOOST_C_API_H_ */

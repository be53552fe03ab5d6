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
#include "fairboost/c_api.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>

#include "fairboost/baselines.hpp"
#include "fairboost/dataset.hpp"
#include "fairboost/evaluate.hpp"
#include "fairboost/fair_metric.hpp"
#include "fairboost/io.hpp"
#include "fairboost/train.hpp"

using namespace fairboost;

struct FairboostDataset {
  Dataset value;
};
struct FairboostMetric {
  ProjectionMetric value;
};
struct FairboostModel {
  Ensemble value;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FAIRBOOST_OK;
  } catch (const ConfigError& e) {
    return fail(FAIRBOOST_ERR_CONFIG, e.what());
  } catch (const DataError& e) {
    return fail(FAIRBOOST_ERR_DATA, e.what());
  } catch (const SolverError& e) {
    return fail(FAIRBOOST_ERR_SOLVER, e.what());
  } catch (const std::exception& e) {
    return fail(FAIRBOOST_ERR_RUNTIME, e.what());
  }
}

KvConfig parse_options(const char* options, const std::set<std::string>& known) {
  KvConfig cfg = KvConfig::parse(options ? options : "");
  for (const auto& key : cfg.keys("")) {
    if (!known.count(key)) throw ConfigError("unknown option '" + key + "'");
  }
  return cfg;
}

double opt_double(const KvConfig& cfg, const std::string& key, double fallback) {
  const std::string v = cfg.get("", key);
  return v.empty() ? fallback : parse_double(v);
}

std::uint64_t opt_u64(const KvConfig& cfg, const std::string& key,
                      std::uint64_t fallback) {
  const std::string v = cfg.get("", key);
  if (v.empty()) return fallback;
  return static_cast<std::uint64_t>(std::stoull(v));
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(parse_double(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  return out;
}

SolverConfig solver_config_from(const KvConfig& cfg, bool with_epsilon = true) {
  SolverConfig sc;
  if (with_epsilon) sc.epsilon = opt_double(cfg, "epsilon", sc.epsilon);
  sc.gamma = opt_double(cfg, "gamma", sc.gamma);
  sc.batch_size = static_cast<std::size_t>(opt_u64(cfg, "batch_size", sc.batch_size));
  sc.alpha0 = opt_double(cfg, "alpha0", sc.alpha0);
  sc.momentum = opt_double(cfg, "momentum", sc.momentum);
  sc.max_iters = static_cast<std::size_t>(opt_u64(cfg, "solver_iters", sc.max_iters));
  sc.tol = opt_double(cfg, "tol", sc.tol);
  sc.eta0 = opt_double(cfg, "eta0", sc.eta0);
  sc.seed = opt_u64(cfg, "seed", sc.seed);
  return sc;
}

const std::set<std::string> kSolverKeys = {
    "epsilon", "gamma",  "batch_size", "alpha0", "momentum",
    "solver_iters", "tol", "eta0", "seed", "solver"};

}  // namespace

extern "C" {

const char* fairboost_version(void) { return "0.1.0"; }

const char* fairboost_last_error(void) { return g_last_error.c_str(); }

int fairboost_dataset_from_csv(const char* csv_path, const char* schema_path,
                               FairboostDatasetHandle* out) {
  return guarded([&] {
    if (!csv_path || !schema_path || !out)
      throw ConfigError("dataset_from_csv: null argument");
    const DataSchema schema = DataSchema::from_file(schema_path);
    *out = new FairboostDataset{load_csv(csv_path, schema)};
  });
}

int fairboost_dataset_synthetic(size_t n_total, size_t n_majority, double shift,
                                uint64_t seed, FairboostDatasetHandle* out) {
  return guarded([&] {
    if (!out) throw ConfigError("dataset_synthetic: null output");
    SyntheticConfig cfg;
    cfg.n_total = n_total;
    cfg.n_majority = n_majority;
    cfg.shift = shift;
    cfg.seed = seed;
    *out = new FairboostDataset{generate_synthetic(cfg)};
  });
}

int fairboost_dataset_split(FairboostDatasetHandle data, double test_fraction,
                            uint64_t seed, FairboostDatasetHandle* out_train,
                            FairboostDatasetHandle* out_test) {
  return guarded([&] {
    if (!data || !out_train || !out_test)
      throw ConfigError("dataset_split: null argument");
    auto [train, test] = split(data->value, test_fraction, seed);
    *out_train = new FairboostDataset{std::move(train)};
    *out_test = new FairboostDataset{std::move(test)};
  });
}

int fairboost_dataset_save(FairboostDatasetHandle data, const char* path) {
  return guarded([&] {
    if (!data || !path) throw ConfigError("dataset_save: null argument");
    atomic_write_file(path, dataset_to_text(data->value));
  });
}

int fairboost_dataset_load(const char* path, FairboostDatasetHandle* out) {
  return guarded([&] {
    if (!path || !out) throw ConfigError("dataset_load: null argument");
    *out = new FairboostDataset{dataset_from_text(read_file(path))};
  });
}

int fairboost_dataset_dims(FairboostDatasetHandle data, size_t* n, size_t* d) {
  return guarded([&] {
    if (!data) throw ConfigError("dataset_dims: null handle");
    if (n) *n = data->value.n();
    if (d) *d = data->value.dim();
  });
}

void fairboost_dataset_free(FairboostDatasetHandle data) { delete data; }

int fairboost_metric_fit(FairboostDatasetHandle data, const char* options,
                         FairboostMetricHandle* out) {
  return guarded([&] {
    if (!data || !out) throw ConfigError("metric_fit: null argument");
    const KvConfig cfg =
        parse_options(options, {"logistic_l2", "ridge_grid", "fit_directions"});
    MetricFitOptions opts;
    opts.logistic_l2 = opt_double(cfg, "logistic_l2", opts.logistic_l2);
    const std::string grid = cfg.get("", "ridge_grid");
    if (!grid.empty()) opts.ridge_grid = parse_double_list(grid);
    opts.fit_linear_directions = cfg.get("", "fit_directions", "1") != "0";
    const SensitiveDirections dirs = sensitive_directions_for(data->value, opts);
    *out = new FairboostMetric{build_projection(dirs)};
  });
}

int fairboost_metric_save(FairboostMetricHandle metric, const char* path) {
  return guarded([&] {
    if (!metric || !path) throw ConfigError("metric_save: null argument");
    atomic_write_file(path, metric_to_text(metric->value));
  });
}

int fairboost_metric_load(const char* path, FairboostMetricHandle* out) {
  return guarded([&] {
    if (!path || !out) throw ConfigError("metric_load: null argument");
    *out = new FairboostMetric{metric_from_text(read_file(path))};
  });
}

int fairboost_metric_dim(FairboostMetricHandle metric, size_t* d) {
  return guarded([&] {
    if (!metric) throw ConfigError("metric_dim: null handle");
    if (d) *d = metric->value.dim();
  });
}

void fairboost_metric_free(FairboostMetricHandle metric) { delete metric; }

int fairboost_train(FairboostDatasetHandle data, FairboostMetricHandle metric,
                    const char* options, FairboostModelHandle* out,
                    const char* trace_path) {
  return guarded([&] {
    if (!data || !out) throw ConfigError("train: null argument");
    std::set<std::string> keys = kSolverKeys;
    for (const char* k : {"method", "steps", "max_depth", "eta", "lambda",
                          "min_child_weight", "scale_pos_weight", "group", "tau",
                          "threads"}) {
      keys.insert(k);
    }
    const KvConfig cfg = parse_options(options, keys);
    const std::string method = cfg.get("", "method", "budro");

    BoostConfig boost;
    boost.max_depth = static_cast<int>(opt_u64(cfg, "max_depth", 6));
    boost.eta = opt_double(cfg, "eta", 0.3);
    boost.lambda = opt_double(cfg, "lambda", 1.0);
    boost.min_child_weight = opt_double(cfg, "min_child_weight", 0.0);
    boost.scale_pos_weight = opt_double(cfg, "scale_pos_weight", 1.0);
    const int steps = static_cast<int>(opt_u64(cfg, "steps", 10));

    Ensemble model;
    TrainingTrace trace;
    if (method == "budro") {
      if (!metric) throw ConfigError("train: method=budro requires a metric");
      // `steps` counts trees for every method; the first budro tree is the
      // plain step, so the adversarial loop runs steps - 1 times.
      if (steps < 2) throw ConfigError("train: method=budro requires steps >= 2");
      BuDROConfig bc;
      bc.epsilon = opt_double(cfg, "epsilon", 0.1);
      bc.steps = steps - 1;
      bc.solver = inner_solver_from_name(cfg.get("", "solver", "dual-bisection"));
      bc.solver_cfg = solver_config_from(cfg);
      bc.boost_cfg = boost;
      bc.seed = opt_u64(cfg, "seed", 0);
      bc.threads = static_cast<int>(opt_u64(cfg, "threads", 1));
      const double tau = opt_double(cfg, "tau", 0.0);
      if (tau > 0.0) {
        bc.neighbor_sparse = true;
        bc.tau = tau;
      }
      std::tie(model, trace) = train_budro(data->value, metric->value, bc);
    } else if (method == "baseline") {
      std::tie(model, trace) = train_plain_weighted(data->value, boost, steps);
    } else if (method == "project") {
      if (!metric) throw ConfigError("train: method=project requires a metric");
      const Dataset projected = project_preprocess(data->value, metric->value);
      std::tie(model, trace) = train_plain_weighted(projected, boost, steps);
    } else if (method == "reweigh") {
      const std::string group_spec = cfg.get("", "group");
      if (group_spec.empty())
        throw ConfigError("train: method=reweigh requires group=<spec>");
      const std::vector<int> group = group_from_spec(data->value, group_spec);
      const std::vector<double> weights = reweigh_weights(data->value, group);
      std::tie(model, trace) =
          train_plain_weighted(data->value, boost, steps, &weights);
    } else {
      throw ConfigError("train: unknown method '" + method + "'");
    }
    if (trace_path) atomic_write_file(trace_path, trace_to_text(trace));
    *out = new FairboostModel{std::move(model)};
  });
}

int fairboost_model_save(FairboostModelHandle model, const char* path) {
  return guarded([&] {
    if (!model || !path) throw ConfigError("model_save: null argument");
    atomic_write_file(path, model_to_text(model->value));
  });
}

int fairboost_model_load(const char* path, FairboostModelHandle* out) {
  return guarded([&] {
    if (!path || !out) throw ConfigError("model_load: null argument");
    *out = new FairboostModel{model_from_text(read_file(path))};
  });
}

void fairboost_model_free(FairboostModelHandle model) { delete model; }

int fairboost_model_predict(FairboostModelHandle model, const double* features,
                            size_t n, size_t d, double* out_margins) {
  return guarded([&] {
    if (!model || !features || !out_margins)
      throw ConfigError("model_predict: null argument");
    for (size_t i = 0; i < n; ++i) {
      out_margins[i] = model->value.predict_margin({features + i * d, d});
    }
  });
}

int fairboost_audit(FairboostModelHandle model, FairboostDatasetHandle data,
                    FairboostMetricHandle metric, const char* options,
                    const char* report_path, char** out_text) {
  return guarded([&] {
    if (!model || !data || !metric) throw ConfigError("audit: null argument");
    std::set<std::string> keys = kSolverKeys;
    for (const char* k : {"gap", "consistency", "delta"}) keys.insert(k);
    const KvConfig cfg = parse_options(options, keys);

    AuditOptions opts;
    for (const auto& v : cfg.get_all("", "epsilon")) {
      for (double e : parse_double_list(v)) opts.epsilons.push_back(e);
    }
    opts.gap_specs = cfg.get_all("", "gap");
    opts.consistency_specs = cfg.get_all("", "consistency");
    const std::string delta = cfg.get("", "delta");
    if (!delta.empty()) opts.delta = parse_double(delta);
    opts.solver = inner_solver_from_name(cfg.get("", "solver", "dual-bisection"));
    opts.solver_cfg = solver_config_from(cfg, /*with_epsilon=*/false);

    const AuditReport report = run_audit(model->value, data->value, metric->value, opts);
    const std::string text = report_to_text(report);
    if (report_path) atomic_write_file(report_path, text);
    if (out_text) {
      *out_text = static_cast<char*>(std::malloc(text.size() + 1));
      if (!*out_text) throw std::bad_alloc();
      std::memcpy(*out_text, text.c_str(), text.size() + 1);
    }
  });
}

int fairboost_solve_instance(const char* instance_path, const char* options,
                             const char* plan_path, double* out_dual,
                             double* out_primal, double* out_eta) {
  return guarded([&] {
    if (!instance_path) throw ConfigError("solve_instance: null path");
    std::set<std::string> keys = kSolverKeys;
    keys.insert("root_tol");
    const KvConfig cfg = parse_options(options, keys);

    SolverInstance inst = instance_from_text(read_file(instance_path));
    const CostMatrix cost = dense_cost_from_matrix(std::move(inst.cost));
    SolverConfig sc = solver_config_from(cfg);
    if (!cfg.has("", "epsilon")) sc.epsilon = inst.epsilon;
    const double root_tol = opt_double(cfg, "root_tol", sc.tol > 0 ? sc.tol : 1e-9);
    sc.tol = root_tol;
    const InnerSolver solver =
        inner_solver_from_name(cfg.get("", "solver", "dual-bisection"));
    const InnerSolveResult res = solve_inner(inst.losses, cost, solver, sc);
    const double dual = dual_objective(inst.losses, cost, sc.epsilon, res.eta);
    if (out_dual) *out_dual = dual;
    if (out_primal) *out_primal = res.robust;
    if (out_eta) *out_eta = res.eta;
    if (plan_path) {
      atomic_write_file(plan_path,
                        plan_to_text(res.plan, res.eta, dual, res.robust, res.cost));
    }
  });
}

void fairboost_free_string(char* s) { std::free(s); }

}  // extern "C"

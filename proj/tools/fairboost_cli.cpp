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

// Command-line front end. Talks to the library exclusively through the C
// API; every run writes a manifest (resolved options, seed, version, wall
// time, status) next to its outputs, success or not.

#include "fairboost/c_api.h"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CliError {
  int code;
  std::string message;
};

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw CliError{3, "cannot write " + tmp.string()};
  }
  fs::rename(tmp, target);
}

int check(int status) {
  if (status != FAIRBOOST_OK) throw CliError{status, fairboost_last_error()};
  return status;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Resolved options for one command: config-file section values overridden by
// command-line flags, echoed verbatim into the manifest.
class Options {
 public:
  void load_config(const std::string& path, const std::string& section) {
    std::ifstream in(path);
    if (!in) throw CliError{2, "cannot open config file " + path};
    std::string line, cur;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        cur = line.substr(1, line.size() - 2);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw CliError{2, path + ":" + std::to_string(line_no) + ": expected key=value"};
      if (cur == section) {
        items_.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
      }
    }
  }

  void override_single(const std::string& key, const std::string& value) {
    for (auto& [k, v] : items_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    items_.push_back({key, value});
  }

  void append(const std::string& key, const std::string& value) {
    items_.push_back({key, value});
  }

  std::string get(const std::string& key, const std::string& fallback = "") const {
    const std::string* found = nullptr;
    for (const auto& [k, v] : items_) {
      if (k == key) found = &v;
    }
    return found ? *found : fallback;
  }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : items_) {
      if (k == key) return true;
    }
    return false;
  }

  void require_known(std::vector<std::string> known) const {
    // globals accepted by every command
    known.insert(known.end(), {"seed", "threads", "out"});
    for (const auto& [k, v] : items_) {
      bool ok = false;
      for (const auto& kk : known) ok = ok || kk == k;
      if (!ok) throw CliError{2, "unknown option '" + k + "'"};
    }
  }

  // The subset forwarded to the library, as a key=value option string.
  std::string library_options(const std::vector<std::string>& keys) const {
    std::ostringstream out;
    for (const auto& [k, v] : items_) {
      for (const auto& kk : keys) {
        if (kk == k) out << k << "=" << v << "\n";
      }
    }
    return out.str();
  }

  std::string echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : items_) out << k << " = " << v << "\n";
    return out.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct RunContext {
  std::string command;
  std::string out_dir = ".";
  Options opts;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string path(const std::string& name) const {
    return (fs::path(out_dir) / name).string();
  }

  void write_manifest(int status, const std::string& error) const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream out;
    out << "fairboost.manifest 1\n";
    out << "command " << command << "\n";
    out << "version " << fairboost_version() << "\n";
    out << "status " << (status == 0 ? "ok" : "error") << "\n";
    out << "exit_code " << status << "\n";
    if (!error.empty()) out << "error " << error << "\n";
    out << "wall_seconds " << wall << "\n";
    out << "options\n" << opts.echo();
    try {
      atomic_write(path("manifest.txt"), out.str());
    } catch (...) {
      // manifest failure must not mask the primary status
    }
  }
};

// RAII handles over the C API.
template <typename T, void (*Free)(T)>
struct Handle {
  T h = nullptr;
  ~Handle() {
    if (h) Free(h);
  }
  T* out() { return &h; }
  T get() const { return h; }
};
using DatasetH = Handle<FairboostDatasetHandle, fairboost_dataset_free>;
using MetricH = Handle<FairboostMetricHandle, fairboost_metric_free>;
using ModelH = Handle<FairboostModelHandle, fairboost_model_free>;

const std::vector<std::string> kSolverOptionKeys = {
    "epsilon", "gamma",  "batch_size", "alpha0",  "momentum",
    "solver_iters", "tol", "eta0", "seed", "solver"};

void cmd_synth(RunContext& ctx) {
  ctx.opts.require_known({"n", "majority", "shift", "test_fraction"});
  DatasetH data;
  check(fairboost_dataset_synthetic(
      std::stoull(ctx.opts.get("n", "150")),
      std::stoull(ctx.opts.get("majority", "125")),
      std::stod(ctx.opts.get("shift", "2.0")),
      std::stoull(ctx.opts.get("seed", "0")), data.out()));
  const double frac = std::stod(ctx.opts.get("test_fraction", "0"));
  if (frac > 0.0) {
    DatasetH train, test;
    check(fairboost_dataset_split(data.get(), frac,
                                  std::stoull(ctx.opts.get("seed", "0")),
                                  train.out(), test.out()));
    check(fairboost_dataset_save(train.get(), ctx.path("train.txt").c_str()));
    check(fairboost_dataset_save(test.get(), ctx.path("test.txt").c_str()));
  }
  check(fairboost_dataset_save(data.get(), ctx.path("dataset.txt").c_str()));
  std::cout << "wrote " << ctx.path("dataset.txt") << "\n";
}

void cmd_prep(RunContext& ctx) {
  ctx.opts.require_known({"csv", "schema", "test_fraction"});
  const std::string csv = ctx.opts.get("csv");
  const std::string schema = ctx.opts.get("schema");
  if (csv.empty() || schema.empty())
    throw CliError{2, "prep: csv and schema are required"};
  DatasetH data;
  check(fairboost_dataset_from_csv(csv.c_str(), schema.c_str(), data.out()));
  const double frac = std::stod(ctx.opts.get("test_fraction", "0"));
  if (frac > 0.0) {
    DatasetH train, test;
    check(fairboost_dataset_split(data.get(), frac,
                                  std::stoull(ctx.opts.get("seed", "0")),
                                  train.out(), test.out()));
    check(fairboost_dataset_save(train.get(), ctx.path("train.txt").c_str()));
    check(fairboost_dataset_save(test.get(), ctx.path("test.txt").c_str()));
  }
  check(fairboost_dataset_save(data.get(), ctx.path("dataset.txt").c_str()));
  size_t n = 0, d = 0;
  check(fairboost_dataset_dims(data.get(), &n, &d));
  std::cout << "wrote " << ctx.path("dataset.txt") << " (" << n << " rows, " << d
            << " encoded features)\n";
}

void cmd_metric(RunContext& ctx) {
  ctx.opts.require_known({"dataset", "logistic_l2", "ridge_grid", "fit_directions"});
  const std::string ds_path = ctx.opts.get("dataset");
  if (ds_path.empty()) throw CliError{2, "metric: dataset is required"};
  DatasetH data;
  check(fairboost_dataset_load(ds_path.c_str(), data.out()));
  MetricH metric;
  const std::string opts =
      ctx.opts.library_options({"logistic_l2", "ridge_grid", "fit_directions"});
  check(fairboost_metric_fit(data.get(), opts.c_str(), metric.out()));
  check(fairboost_metric_save(metric.get(), ctx.path("metric.txt").c_str()));
  std::cout << "wrote " << ctx.path("metric.txt") << "\n";
}

void cmd_train(RunContext& ctx) {
  std::vector<std::string> known = kSolverOptionKeys;
  for (const char* k : {"dataset", "metric", "method", "steps", "max_depth", "eta",
                        "lambda", "min_child_weight", "scale_pos_weight", "group",
                        "tau", "threads", "out"}) {
    known.push_back(k);
  }
  ctx.opts.require_known(known);
  const std::string ds_path = ctx.opts.get("dataset");
  if (ds_path.empty()) throw CliError{2, "train: dataset is required"};
  DatasetH data;
  check(fairboost_dataset_load(ds_path.c_str(), data.out()));
  MetricH metric;
  const std::string metric_path = ctx.opts.get("metric");
  if (!metric_path.empty())
    check(fairboost_metric_load(metric_path.c_str(), metric.out()));

  std::vector<std::string> lib_keys = kSolverOptionKeys;
  for (const char* k : {"method", "steps", "max_depth", "eta", "lambda",
                        "min_child_weight", "scale_pos_weight", "group", "tau",
                        "threads"}) {
    lib_keys.push_back(k);
  }
  ModelH model;
  check(fairboost_train(data.get(), metric.get(),
                        ctx.opts.library_options(lib_keys).c_str(), model.out(),
                        ctx.path("trace.txt").c_str()));
  check(fairboost_model_save(model.get(), ctx.path("model.txt").c_str()));
  std::cout << "wrote " << ctx.path("model.txt") << "\n";
}

void cmd_audit(RunContext& ctx) {
  std::vector<std::string> known = kSolverOptionKeys;
  for (const char* k : {"model", "dataset", "metric", "gap", "consistency", "delta",
                        "out"}) {
    known.push_back(k);
  }
  ctx.opts.require_known(known);
  for (const char* req : {"model", "dataset", "metric"}) {
    if (!ctx.opts.has(req))
      throw CliError{2, std::string("audit: ") + req + " is required"};
  }
  ModelH model;
  check(fairboost_model_load(ctx.opts.get("model").c_str(), model.out()));
  DatasetH data;
  check(fairboost_dataset_load(ctx.opts.get("dataset").c_str(), data.out()));
  MetricH metric;
  check(fairboost_metric_load(ctx.opts.get("metric").c_str(), metric.out()));

  std::vector<std::string> lib_keys = kSolverOptionKeys;
  for (const char* k : {"gap", "consistency", "delta"}) lib_keys.push_back(k);
  char* text = nullptr;
  check(fairboost_audit(model.get(), data.get(), metric.get(),
                        ctx.opts.library_options(lib_keys).c_str(),
                        ctx.path("report.txt").c_str(), &text));
  if (text) {
    std::cout << text;
    fairboost_free_string(text);
  }
}

void cmd_solve(RunContext& ctx) {
  std::vector<std::string> known = kSolverOptionKeys;
  for (const char* k : {"instance", "root_tol", "out"}) known.push_back(k);
  ctx.opts.require_known(known);
  const std::string instance = ctx.opts.get("instance");
  if (instance.empty()) throw CliError{2, "solve: instance is required"};
  std::vector<std::string> lib_keys = kSolverOptionKeys;
  lib_keys.push_back("root_tol");
  double dual = 0.0, primal = 0.0, eta = 0.0;
  check(fairboost_solve_instance(instance.c_str(),
                                 ctx.opts.library_options(lib_keys).c_str(),
                                 ctx.path("plan.txt").c_str(), &dual, &primal, &eta));
  std::cout << "eta " << eta << "\ndual " << dual << "\nprimal " << primal << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"individually fair gradient boosting"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand too

  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  // flag name -> option key, collected per subcommand
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> repeated;

  auto add_value_flag = [&](CLI::App* cmd, const std::string& flag,
                            const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag,
        [&flag_values, cmd, key](const std::string& v) {
          flag_values[cmd->get_name()][key] = v;
        },
        help);
  };
  auto add_repeat_flag = [&](CLI::App* cmd, const std::string& flag,
                             const std::string& key, const std::string& help) {
    cmd->add_option_function<std::vector<std::string>>(
        flag,
        [&repeated, cmd, key](const std::vector<std::string>& vs) {
          for (const auto& v : vs) repeated[cmd->get_name()].push_back({key, v});
        },
        help);
  };

  app.add_option("--config", config_path, "config file ([command] sections)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads,
                 "module-internal parallelism (determinism guaranteed at 1)");

  CLI::App* synth = app.add_subcommand("synth", "generate the synthetic dataset");
  add_value_flag(synth, "--n", "n", "total points");
  add_value_flag(synth, "--majority", "majority", "majority cluster size");
  add_value_flag(synth, "--shift", "shift", "cluster shift");
  add_value_flag(synth, "--test-fraction", "test_fraction", "also write a split");

  CLI::App* prep = app.add_subcommand("prep", "encode a CSV dataset");
  add_value_flag(prep, "--csv", "csv", "input CSV path");
  add_value_flag(prep, "--schema", "schema", "schema config path");
  add_value_flag(prep, "--test-fraction", "test_fraction", "also write a split");

  CLI::App* metric = app.add_subcommand("metric", "fit the fair metric");
  add_value_flag(metric, "--dataset", "dataset", "dataset snapshot path");
  add_value_flag(metric, "--logistic-l2", "logistic_l2", "logistic penalty");
  add_value_flag(metric, "--ridge-grid", "ridge_grid", "ridge CV grid (comma list)");
  add_value_flag(metric, "--fit-directions", "fit_directions",
                 "fit linear directions (0/1)");

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_value_flag(train, "--dataset", "dataset", "dataset snapshot path");
  add_value_flag(train, "--metric", "metric", "metric file path");
  add_value_flag(train, "--method", "method", "budro|baseline|project|reweigh");
  add_value_flag(train, "--epsilon", "epsilon", "perturbation budget");
  add_value_flag(train, "--gamma", "gamma", "entropic regularization");
  add_value_flag(train, "--solver", "solver",
                 "dual-bisection|dual-sgd|entropic|entropic-sgd");
  add_value_flag(train, "--steps", "steps", "boosting steps");
  add_value_flag(train, "--max-depth", "max_depth", "tree depth");
  add_value_flag(train, "--eta", "eta", "shrinkage");
  add_value_flag(train, "--lambda", "lambda", "leaf l2 regularization");
  add_value_flag(train, "--min-child-weight", "min_child_weight",
                 "minimum child hessian");
  add_value_flag(train, "--scale-pos-weight", "scale_pos_weight",
                 "positive class weight");
  add_value_flag(train, "--batch-size", "batch_size", "SGD batch size");
  add_value_flag(train, "--alpha0", "alpha0", "SGD step size");
  add_value_flag(train, "--momentum", "momentum", "SGD momentum");
  add_value_flag(train, "--solver-iters", "solver_iters", "SGD iterations");
  add_value_flag(train, "--tol", "tol", "solver tolerance");
  add_value_flag(train, "--eta0", "eta0", "SGD initial dual variable");
  add_value_flag(train, "--tau", "tau", "neighbor cutoff (sparse mode)");
  add_value_flag(train, "--group", "group", "group spec for reweigh");

  CLI::App* audit = app.add_subcommand("audit", "audit a model");
  add_value_flag(audit, "--model", "model", "model file path");
  add_value_flag(audit, "--dataset", "dataset", "dataset snapshot path");
  add_value_flag(audit, "--metric", "metric", "metric file path");
  add_repeat_flag(audit, "--epsilon", "epsilon", "certificate budgets");
  add_repeat_flag(audit, "--gap", "gap", "gap specs (attr, attr:level, attr@thr)");
  add_repeat_flag(audit, "--consistency", "consistency",
                  "consistency specs (attr or attr:v1,v2)");
  add_value_flag(audit, "--delta", "delta", "DRF verdict threshold");
  add_value_flag(audit, "--solver", "solver", "certificate solver");
  add_value_flag(audit, "--gamma", "gamma", "entropic regularization");

  CLI::App* solve = app.add_subcommand("solve", "solve one instance file");
  add_value_flag(solve, "--instance", "instance", "instance file path");
  add_value_flag(solve, "--solver", "solver", "solver name");
  add_value_flag(solve, "--epsilon", "epsilon", "budget override");
  add_value_flag(solve, "--gamma", "gamma", "entropic regularization");
  add_value_flag(solve, "--root-tol", "root_tol", "entropic root tolerance");
  add_value_flag(solve, "--batch-size", "batch_size", "SGD batch size");
  add_value_flag(solve, "--alpha0", "alpha0", "SGD step size");
  add_value_flag(solve, "--momentum", "momentum", "SGD momentum");
  add_value_flag(solve, "--solver-iters", "solver_iters", "SGD iterations");
  add_value_flag(solve, "--eta0", "eta0", "SGD initial dual variable");

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  RunContext ctx;
  ctx.command = active->get_name();
  ctx.out_dir = out_dir;

  int status = 0;
  std::string error;
  try {
    if (!config_path.empty()) ctx.opts.load_config(config_path, ctx.command);
    for (const auto& [key, value] : flag_values[ctx.command]) {
      ctx.opts.override_single(key, value);
    }
    for (const auto& [key, value] : repeated[ctx.command]) {
      ctx.opts.append(key, value);
    }
    if (seed) ctx.opts.override_single("seed", std::to_string(*seed));
    if (threads) ctx.opts.override_single("threads", std::to_string(*threads));
    ctx.opts.override_single("out", out_dir);

    if (ctx.command == "synth") cmd_synth(ctx);
    else if (ctx.command == "prep") cmd_prep(ctx);
    else if (ctx.command == "metric") cmd_metric(ctx);
    else if (ctx.command == "train") cmd_train(ctx);
    else if (ctx.command == "audit") cmd_audit(ctx);
    else if (ctx.command == "solve") cmd_solve(ctx);
  } catch (const CliError& e) {
    status = e.code;
    error = e.message;
  } catch (const std::exception& e) {
    status = 1;
    error = e.what();
  }
  ctx.write_manifest(status, error);
  if (status != 0) {
    std::cerr << "fairboost " << ctx.command << ": " << error << "\n";
  }
  return status;
}

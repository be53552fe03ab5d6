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
#include "fairboost/io.hpp"

#include <filesystem>

#include "doctest.h"
#include "test_support.hpp"

using namespace fairboost;
using namespace fairboost::testing;

TEST_CASE("dataset snapshots round-trip bit-exact") {
  SyntheticConfig cfg;
  cfg.seed = 42;
  Dataset ds = generate_synthetic(cfg);
  ds.standardization[1] = {0.25, 1.75};  // exercise the stats block
  const std::string text = dataset_to_text(ds);
  const Dataset back = dataset_from_text(text);
  CHECK(back.features.data == ds.features.data);
  CHECK(back.labels == ds.labels);
  CHECK(back.feature_names == ds.feature_names);
  CHECK(back.protected_columns == ds.protected_columns);
  CHECK(back.standardization.at(1).mean == 0.25);
  CHECK(back.standardization.at(1).stddev == 1.75);
  CHECK(dataset_to_text(back) == text);  // stable re-serialization
}

TEST_CASE("metric files round-trip bit-exact") {
  Rng rng(7);
  SensitiveDirections dirs;
  std::vector<double> v(5);
  for (auto& x : v) x = rng.normal();
  dirs.directions = {v};
  const ProjectionMetric m = build_projection(dirs);
  const ProjectionMetric back = metric_from_text(metric_to_text(m));
  CHECK(back.q.data == m.q.data);
}

TEST_CASE("model files round-trip bit-exact including margins") {
  Rng rng(9);
  auto inst = random_instance(rng, 30, 3, 1);
  BoostConfig bc;
  bc.max_depth = 3;
  bc.eta = 0.17;
  const auto [model, trace] = train_plain_weighted(inst.data, bc, 12);
  const Ensemble back = model_from_text(model_to_text(model));
  REQUIRE(back.trees.size() == model.trees.size());
  for (std::size_t i = 0; i < inst.data.n(); ++i) {
    CHECK(back.predict_margin(inst.data.features.row(i)) ==
          model.predict_margin(inst.data.features.row(i)));  // bit-exact
  }
  CHECK(model_to_text(back) == model_to_text(model));
}

TEST_CASE("trace files round-trip") {
  TrainingTrace trace;
  trace.steps.push_back({0, 0.5, 0.25, 0.1, 1.25, 0.001, false});
  trace.steps.push_back({1, 0.45, 0.2, 0.1, 1.5, 0.002, false});
  const TrainingTrace back = trace_from_text(trace_to_text(trace));
  REQUIRE(back.steps.size() == 2);
  CHECK(back.steps[1].robust_loss == 0.45);
  CHECK(back.steps[1].eta_dual == 1.5);
}

TEST_CASE("instance files round-trip and reject foreign tags") {
  const T2 t2 = make_t2();
  SolverInstance inst;
  inst.losses = t2.losses;
  inst.cost = t2.cost.dense;
  inst.epsilon = 0.25;
  const SolverInstance back = instance_from_text(instance_to_text(inst));
  CHECK(back.epsilon == 0.25);
  CHECK(back.losses.r0 == t2.losses.r0);
  CHECK(back.cost.data == t2.cost.dense.data);

  CHECK_THROWS_AS(instance_from_text("fairboost.model 1\n"), DataError);
  CHECK_THROWS_AS(metric_from_text("fairboost.metric 2\nd 1\nq\n1\n"), DataError);
  CHECK_THROWS_AS(dataset_from_text("garbage"), DataError);
}

TEST_CASE("report text carries the fixed keys") {
  AuditReport rep;
  rep.balanced_accuracy = 0.75;
  GapReport gap;
  gap.attribute = "age@25";
  gap.gap_max = 0.2;
  gap.gap_rms = 0.15;
  gap.gap0 = 0.1;
  gap.gap0_defined = true;
  gap.gap1 = -0.2;
  gap.gap1_defined = true;
  rep.gaps.push_back(gap);
  ConsistencyReport cons;
  cons.attribute = "status";
  cons.consistency = 0.97;
  rep.consistencies.push_back(cons);
  Certificate cert;
  cert.epsilon = 0.4;
  cert.worst_case = 0.8;
  cert.empirical = 0.5;
  cert.gap = 0.3;
  cert.solver = "dual-bisection";
  cert.delta = 1.0;
  cert.drf = true;
  rep.certificates.push_back(cert);

  const std::string text = report_to_text(rep);
  CHECK(text.find("fairboost.report 1") == 0);
  CHECK(text.find("bacc 0.75") != std::string::npos);
  CHECK(text.find("gap age@25 gap_max 0.2 gap_rms 0.15") != std::string::npos);
  CHECK(text.find("consistency status 0.97") != std::string::npos);
  CHECK(text.find("certificate epsilon 0.4 L 0.8 empirical 0.5 gap 0.3 solver "
                  "dual-bisection verdict drf") != std::string::npos);
}

TEST_CASE("plan text lists every entry") {
  const T2 t2 = make_t2();
  const DualSolution sol = corner_enumeration_oracle(t2.losses, t2.cost, 0.25);
  const std::string text =
      plan_to_text(sol.plan, sol.eta, sol.dual_value, sol.primal_value, sol.plan_cost);
  CHECK(text.find("fairboost.plan 1") == 0);
  CHECK(text.find("entries 3") != std::string::npos);
}

TEST_CASE("config parsing: sections, comments, duplicates, overrides") {
  const KvConfig cfg = KvConfig::parse(
      "# comment\n"
      "[train]\n"
      "epsilon = 1.0\n"
      "solver=dual-bisection  # trailing comment\n"
      "[audit]\n"
      "epsilon = 0.1\n"
      "gap = age@25\n"
      "gap = status:married\n");
  CHECK(cfg.get("train", "epsilon") == "1.0");
  CHECK(cfg.get("train", "solver") == "dual-bisection");
  CHECK(cfg.get("audit", "epsilon") == "0.1");
  CHECK(cfg.get_all("audit", "gap").size() == 2);
  CHECK_FALSE(cfg.has("train", "gap"));
  CHECK(cfg.get("train", "missing", "fallback") == "fallback");

  CHECK_THROWS_AS(KvConfig::parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KvConfig::parse("[broken\n"), ConfigError);
  CHECK_THROWS_AS(KvConfig::parse("=v\n"), ConfigError);
}

TEST_CASE("atomic writes leave no temp file behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fairboost_io_test";
  fs::remove_all(dir);
  const std::string target = (dir / "out.txt").string();
  atomic_write_file(target, "payload");
  CHECK(read_file(target) == "payload");
  CHECK_FALSE(fs::exists(target + ".tmp"));
  atomic_write_file(target, "payload2");
  CHECK(read_file(target) == "payload2");
  fs::remove_all(dir);
}

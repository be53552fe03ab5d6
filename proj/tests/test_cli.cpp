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

// Drives the installed CLI binary (path via FAIRBOOST_CLI, set by ctest):
// config files with per-command sections, flag overrides, exit codes, and
// the manifest-on-failure contract.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "fairboost/common.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* env = std::getenv("FAIRBOOST_CLI");
  return env ? env : "";
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "fairboost_cli_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("config file sections drive commands and flags override them") {
  REQUIRE_FALSE(cli_path().empty());
  TempDir tmp;
  {
    std::ofstream cfg(tmp.file("run.cfg"));
    cfg << "[synth]\n"
        << "n = 60\n"
        << "majority = 45\n"
        << "test_fraction = 0.25\n"
        << "[metric]\n"
        << "dataset = " << tmp.file("out/train.txt") << "\n"
        << "fit_directions = 0\n";
  }
  CHECK(run("--config " + tmp.file("run.cfg") + " --out " + tmp.file("out") +
            " --seed 11 synth") == 0);
  CHECK(fs::exists(tmp.file("out/dataset.txt")));
  CHECK(fs::exists(tmp.file("out/train.txt")));
  CHECK(fs::exists(tmp.file("out/test.txt")));
  CHECK(fs::exists(tmp.file("out/manifest.txt")));

  // the dataset has 60 rows per the config; a flag overrides to 80
  const std::string snapshot = fairboost::read_file(tmp.file("out/dataset.txt"));
  CHECK(snapshot.find("n 60") != std::string::npos);
  CHECK(run("--config " + tmp.file("run.cfg") + " --out " + tmp.file("out2") +
            " --seed 11 synth --n 80 --majority 61") == 0);
  CHECK(fairboost::read_file(tmp.file("out2/dataset.txt")).find("n 80") !=
        std::string::npos);

  CHECK(run("--config " + tmp.file("run.cfg") + " --out " + tmp.file("out") +
            " metric") == 0);
  CHECK(fs::exists(tmp.file("out/metric.txt")));
}

TEST_CASE("exit codes: config 2, data 3, and the manifest survives failures") {
  REQUIRE_FALSE(cli_path().empty());
  TempDir tmp;
  // unknown option in the config section
  {
    std::ofstream cfg(tmp.file("bad.cfg"));
    cfg << "[synth]\nbogus = 1\n";
  }
  CHECK(run("--config " + tmp.file("bad.cfg") + " --out " + tmp.file("o1") +
            " synth") == 2);
  CHECK(fs::exists(tmp.file("o1/manifest.txt")));
  CHECK(fairboost::read_file(tmp.file("o1/manifest.txt")).find("status error") !=
        std::string::npos);

  // missing dataset file -> data error
  CHECK(run("--out " + tmp.file("o2") + " metric --dataset " +
            tmp.file("absent.txt")) == 3);
  CHECK(fs::exists(tmp.file("o2/manifest.txt")));

  // unknown method -> config error
  CHECK(run("--out " + tmp.file("o3") + " synth") == 0);
  CHECK(run("--out " + tmp.file("o4") + " train --dataset " +
            tmp.file("o3/dataset.txt") + " --method nosuch") == 2);
}

TEST_CASE("epsilon zero budro and baseline write identical model files") {
  REQUIRE_FALSE(cli_path().empty());
  TempDir tmp;
  CHECK(run("--out " + tmp.file("d") + " --seed 4 synth --n 60 --majority 45") == 0);
  CHECK(run("--out " + tmp.file("d") + " metric --dataset " +
            tmp.file("d/dataset.txt") + " --fit-directions 0") == 0);
  const std::string shared =
      " --dataset " + tmp.file("d/dataset.txt") + " --metric " +
      tmp.file("d/metric.txt") + " --steps 10 --max-depth 3 --eta 0.2 --seed 4";
  CHECK(run("--out " + tmp.file("budro") + " train --method budro --epsilon 0" +
            shared) == 0);
  CHECK(run("--out " + tmp.file("plain") + " train --method baseline" + shared) ==
        0);
  const std::string a = fairboost::read_file(tmp.file("budro/model.txt"));
  const std::string b = fairboost::read_file(tmp.file("plain/model.txt"));
  CHECK(!a.empty());
  CHECK(a == b);
}

TEST_CASE("solve command prints values and writes the plan") {
  REQUIRE_FALSE(cli_path().empty());
  TempDir tmp;
  {
    std::ofstream inst(tmp.file("instance.txt"));
    inst << "fairboost.instance 1\n"
         << "n 2\n"
         << "epsilon 0.25\n"
         << "labels 1 0\n"
         << "r0 2.1269280110429727 0.31326168751822286\n"
         << "r1 0.12692801104297263 1.3132616875182228\n"
         << "C\n0 1\n1 0\n";
  }
  CHECK(run("--out " + tmp.file("s") + " solve --instance " +
            tmp.file("instance.txt") + " --solver entropic --gamma 0.001") == 0);
  CHECK(fairboost::read_file(tmp.file("s/plan.txt")).rfind("fairboost.plan 1", 0) ==
        0);
}

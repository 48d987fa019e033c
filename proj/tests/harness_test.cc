// Copyright 2026 The Cooplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cooplab/harness.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cooplab/errors.h"
#include "doctest.h"
#include "test_util.h"

namespace cooplab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cooplab_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig Config(const std::string& text) {
  return ParseExperimentConfig(json::parse(text), testing::DataPath("experiments"));
}

TEST_CASE("mw regret stays under the hedge bound") {
  const ExperimentConfig cfg = Config(
      R"({"kind": "mw-regret", "name": "mw", "T": 1000, "num_actions": [2],
          "episodes": 1000, "seed": 5})");
  const auto results = RunExperiment(cfg, {ScratchDir("mw").string(), 1});
  REQUIRE(results.size() == 1);
  CHECK(results[0].bound == doctest::Approx(std::sqrt(500.0 * std::log(2.0))));
  CHECK(results[0].bound == doctest::Approx(18.6150).epsilon(1e-4));
  CHECK(results[0].statistic <= results[0].bound);
  CHECK(results[0].pass);
  CHECK(results[0].samples == 1000);
}

TEST_CASE("authentication failure frequency without coverage") {
  const ExperimentConfig cfg = Config(
      R"({"kind": "auth-failure", "name": "af", "num_actions": 2,
          "handshake_lengths": [3], "observed_fractions": [0], "episodes": 100000,
          "seed": 8})");
  const fs::path dir = ScratchDir("af");
  const auto results = RunExperiment(cfg, {dir.string(), 1});
  REQUIRE(!results.empty());
  for (const auto& r : results) CHECK(r.pass);
  std::ifstream in(dir / "af.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() == 8);
  CHECK(std::abs(std::stod(cells[5]) - 0.875) <= 0.01);
  CHECK(std::stod(cells[6]) == doctest::Approx(0.875));
}

TEST_CASE("zero episodes is an error") {
  ExperimentConfig cfg = Config(R"({"kind": "mw-regret", "name": "z", "T": 10, "episodes": 0})");
  CHECK_THROWS_AS(RunExperiment(cfg, {ScratchDir("zero").string(), 1}), DataError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(Config(R"({"kind": "tournament", "name": "x", "T": 5})"), FormatError);
  CHECK_THROWS(Config(R"({"kind": "ic-eval", "name": "x", "T": 5,
                          "population": "../populations/missing.json"})"));
  CHECK_THROWS(Config(R"({"kind": "mw-regret", "T": "long"})"));
  const ExperimentConfig ok = Config(R"({"kind": "flatten-check", "name": "f",
      "population": "../populations/mixed_types2.json", "T": 2, "seat": "col",
      "episodes": 1})");
  CHECK(ok.seat == Player::kCol);
  CHECK(fs::exists(ok.population_path));
  const ExperimentConfig loaded =
      LoadExperimentConfig(testing::DataPath("experiments/ic_eval.json"));
  CHECK(loaded.kind == ExperimentKind::kIcEval);
  CHECK(loaded.dataset_sizes.size() == 3);
  CHECK(ExperimentKindName(ParseExperimentKind("si-consistency")) == "si-consistency");
}

TEST_CASE("curves from regret files") {
  const fs::path empty = ScratchDir("curves_empty");
  CHECK(CollectCurves(empty.string()).empty());
  CHECK(EmitCurves(empty.string()).empty());
  CHECK_THROWS_AS(CollectCurves((empty / "nope").string()), FormatError);

  const fs::path single = ScratchDir("curves_single");
  {
    std::ofstream out(single / "run_K50.csv");
    out << "episode_id,seed,theta1,theta2,R_ext_row,R_ext_col,Rbar_row,Rbar_col,R_alt,T\n"
        << "0,1,a,a,0,0,0,0,2,10\n1,2,a,b,0,0,0,0,4,10\n";
  }
  const auto s = CollectCurves(single.string());
  REQUIRE(s.size() == 1);
  CHECK(s[0].prefix == "run");
  REQUIRE(s[0].points.size() == 1);
  CHECK(s[0].points[0].x == 50.0);
  CHECK(s[0].points[0].y == doctest::Approx(0.3));
  CHECK(s[0].points[0].n == 2);

  const fs::path dir = ScratchDir("curves_ic");
  const ExperimentConfig cfg = Config(
      R"({"kind": "ic-eval", "name": "ic", "population": "../populations/protocol_types2.json",
          "mu": "../mu/types2_rare_b.json", "T": 20, "tilde_T": 6,
          "dataset_sizes": [100, 1000, 10000], "episodes": 200, "seed": 3})");
  for (const auto& r : RunExperiment(cfg, {dir.string(), 1})) CHECK(r.pass);
  const auto written = EmitCurves(dir.string());
  REQUIRE(written.size() == 1);
  const std::string tsv = Slurp(written[0]);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 4);
  const auto curves = CollectCurves(dir.string());
  REQUIRE(curves[0].points.size() == 3);
  CHECK(curves[0].points[0].x < curves[0].points[2].x);
}

TEST_CASE("reruns reproduce the csv bytes for any job count") {
  const ExperimentConfig cfg = Config(
      R"({"kind": "si-selfplay", "name": "si", "population": "../populations/protocol_types2.json",
          "T": 60, "episodes": 300, "seed": 21})");
  const fs::path a = ScratchDir("det_a");
  const fs::path b = ScratchDir("det_b");
  RunExperiment(cfg, {a.string(), 1});
  RunExperiment(cfg, {b.string(), 3});
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    REQUIRE(fs::exists(b / entry.path().filename()));
    CHECK(Slurp(entry.path()) == Slurp(b / entry.path().filename()));
  }
}

TEST_CASE("result formatting and intervals") {
  VerificationResult r{"mw-regret", "x", 1.5, 2.0, true, 10, 0.0};
  CHECK(FormatResult(r).rfind("PASS mw-regret/x", 0) == 0);
  r.pass = false;
  CHECK(FormatResult(r).rfind("FAIL", 0) == 0);
  const json j = json::parse(ResultsJson({r}));
  CHECK(j.is_array());
  CHECK(MeanCiRadius(4.0, 100) == doctest::Approx(kZ99 * 0.2));
  CHECK(FrequencyCiRadius(0.5, 10000) == doctest::Approx(kZ99 * 0.005));
}

TEST_CASE("equilibrium report") {
  const TypeSpace types = testing::Table1a();
  const json j = json::parse(EquilibriumReportJson(types.Game({0, 0}), types.action_names()));
  CHECK(j["num_actions"] == 2);
  CHECK(j["equilibria"].size() == 3);
  REQUIRE(j["pone"].size() == 1);
  CHECK(j["pone"][0]["value_row"].get<double>() == doctest::Approx(2.0));
  const json col = json::parse(
      EquilibriumReportJson(types.Game({0, 0}), types.action_names(), Player::kCol));
  CHECK(col.contains("worst_pone"));
}

}  // namespace
}  // namespace cooplab

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

// End-to-end acceptance gate. Usage: acceptance_test <out_dir>
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cooplab/equilibria.h"
#include "cooplab/game.h"
#include "cooplab/harness.h"

namespace cooplab {
namespace {

namespace fs = std::filesystem;

// Strategy agreement with closed-form equilibria.
constexpr double kStrategyTolerance = 1e-9;
// Second run of the determinism check uses a different job count.
constexpr int kRerunJobs = 3;

std::string DataPath(const std::string& rel) {
  return std::string(COOPLAB_DATA_DIR) + "/" + rel;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool Near(const MixedStrategy& s, const std::vector<double>& expected) {
  if (s.size() != static_cast<int>(expected.size())) return false;
  for (int i = 0; i < s.size(); ++i) {
    if (std::abs(s(i) - expected[i]) > kStrategyTolerance) return false;
  }
  return true;
}

// True when `profiles` equals `expected` as a set of (row, col) pairs.
bool SameSet(const std::vector<EquilibriumProfile>& profiles,
             const std::vector<std::pair<std::vector<double>, std::vector<double>>>& expected) {
  if (profiles.size() != expected.size()) return false;
  for (const auto& [row, col] : expected) {
    bool found = false;
    for (const auto& p : profiles) found = found || (Near(p.sigma_row, row) && Near(p.sigma_col, col));
    if (!found) return false;
  }
  return true;
}

bool EquilibriumOracle() {
  const TypeSpace coord = LoadTypeSpace(DataPath("games/table1a.json"));
  const TypeSpace pd = LoadTypeSpace(DataPath("games/table1b.json"));
  const BimatrixGame a = coord.Game({0, 0});
  const BimatrixGame b = pd.Game({0, 0});
  const double third = 1.0 / 3.0;
  const bool ne_a = SameSet(EnumerateNash(a).profiles,
                            {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}},
                             {{third, 2 * third}, {third, 2 * third}}});
  const bool pone_a = SameSet(ParetoOptimalNash(a).profiles, {{{1, 0}, {1, 0}}});
  const bool ne_b = SameSet(EnumerateNash(b).profiles, {{{0, 1}, {0, 1}}});
  const bool pone_b = SameSet(ParetoOptimalNash(b).profiles, {{{0, 1}, {0, 1}}});
  std::cout << "  table1a NE " << (ne_a ? "ok" : "mismatch") << ", PONE "
            << (pone_a ? "ok" : "mismatch") << "; table1b NE " << (ne_b ? "ok" : "mismatch")
            << ", PONE " << (pone_b ? "ok" : "mismatch") << "\n";
  return ne_a && pone_a && ne_b && pone_b;
}

bool RunConfig(const std::string& file, const fs::path& out, int jobs, bool verbose) {
  const ExperimentConfig cfg = LoadExperimentConfig(DataPath("experiments/" + file));
  const auto start = std::chrono::steady_clock::now();
  const std::vector<VerificationResult> results = RunExperiment(cfg, {out.string(), jobs});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = !results.empty();
  for (const auto& r : results) {
    if (verbose) std::cout << "  " << FormatResult(r) << "\n";
    ok = ok && r.pass;
  }
  if (verbose) std::cout << "  (" << file << " " << secs << " s)\n";
  return ok;
}

// Compares every file in `a` with its namesake in `b`.
bool SameFiles(const fs::path& a, const fs::path& b) {
  int compared = 0;
  bool ok = true;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    const bool same = fs::exists(other) && Slurp(entry.path()) == Slurp(other);
    if (!same) std::cout << "  differs: " << entry.path().filename().string() << "\n";
    ok = ok && same;
    ++compared;
  }
  for (const auto& entry : fs::directory_iterator(b)) {
    ok = ok && fs::exists(a / entry.path().filename());
  }
  std::cout << "  compared " << compared << " files\n";
  return ok && compared > 0;
}

int Main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const fs::path first = out / "run1";
  const fs::path second = out / "run2";
  fs::remove_all(out);
  fs::create_directories(first);
  fs::create_directories(second);

  struct Criterion {
    int id;
    std::string label;
    std::string config;  // empty: handled inline
  };
  const std::vector<Criterion> criteria = {
      {1, "equilibrium oracle on the coordination and prisoner's dilemma games", ""},
      {2, "multiplicative-weights regret never exceeds sqrt((T/2) ln N)", "mw_regret.json"},
      {3, "mixed-equilibrium self-play regret exceedance frequency", "nash_selfplay.json"},
      {4, "protocol self-play handshake and convention payoffs", "si_selfplay.json"},
      {5, "protocol regret against the adversary zoo", "si_consistency.json"},
      {6, "authentication failure frequency", "auth_failure.json"},
      {7, "commitment mixture identity and best-response inequality", "mixture_check.json"},
      {8, "flattened population matches per-episode sampling", "flatten_check.json"},
      {9, "imitate-then-commit altruistic regret over dataset size", "ic_eval.json"},
      {10, "byte-identical reruns", ""},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    bool pass = false;
    try {
      if (c.id == 1) {
        pass = EquilibriumOracle();
      } else if (c.id == 10) {
        bool reruns_ok = true;
        for (const Criterion& e : criteria) {
          if (!e.config.empty()) reruns_ok = RunConfig(e.config, second, kRerunJobs, false) && reruns_ok;
        }
        pass = SameFiles(first, second) && reruns_ok;
      } else {
        pass = RunConfig(c.config, first, 1, true);
      }
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << "\n";
      pass = false;
    }
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.label
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : "some criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace cooplab

int main(int argc, char** argv) { return cooplab::Main(argc, argv); }

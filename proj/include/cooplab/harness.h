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

#ifndef COOPLAB_HARNESS_H_
#define COOPLAB_HARNESS_H_

// Experiment configuration, Monte-Carlo drivers and bound verification.
//
// Each experiment kind writes CSV artifacts named after the config's `name`
// into the output directory and returns one or more verification results.
// CSV bytes depend only on the config and seed, never on the job count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cooplab/game.h"
#include "json.hpp"

namespace cooplab {

// One-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.3263478740408408;

enum class ExperimentKind {
  kMwRegret,
  kNashSelfplay,
  kSiSelfplay,
  kSiConsistency,
  kAuthFailure,
  kIcEval,
  kFlattenCheck,
  kMixtureCheck,
};

std::string ExperimentKindName(ExperimentKind kind);
ExperimentKind ParseExperimentKind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kMwRegret;
  std::string name;  // output file prefix
  // Resolved paths; empty when unused.
  std::string game_path;
  std::string population_path;
  std::string mu_path;
  std::string dataset_path;
  bool normalize = true;
  int horizon = 0;
  int tilde_horizon = -1;  // ic-eval; -1 picks k + ceil((T - k) / 4)
  double delta = 0.1;
  std::optional<double> eps;
  std::int64_t episodes = 0;  // per cell; trials for auth-failure/mixture-check
  std::uint64_t seed = 0;
  int replicates = 1;
  std::vector<int> num_actions;               // mw-regret, auth-failure, mixture-check
  std::vector<int> handshake_lengths;         // auth-failure
  std::vector<double> observed_fractions;     // auth-failure, fractions of N^(2k)
  std::vector<std::int64_t> dataset_sizes;    // ic-eval
  std::string equilibrium = "mixed";          // nash-selfplay: "mixed" or an index
  nlohmann::json agents = nlohmann::json::array();  // probe / adversary specs
  Player seat = Player::kRow;  // ic-eval learner seat; flatten-check probe seat
};

// Relative paths in `j` are resolved against `base_dir`.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& j,
                                       const std::string& base_dir);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct VerificationResult {
  std::string kind;
  std::string name;
  double statistic = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::int64_t samples = 0;
  double ci_radius = 0.0;
};

struct RunOptions {
  std::string out_dir = ".";
  int jobs = 1;
};

// Throws DataError when the config asks for zero episodes.
std::vector<VerificationResult> RunExperiment(const ExperimentConfig& cfg,
                                              const RunOptions& options);

std::string FormatResult(const VerificationResult& r);
std::string ResultsJson(const std::vector<VerificationResult>& results);

// Half-width of the one-sided 99% normal interval for a mean.
double MeanCiRadius(double variance, std::int64_t n);
// Same for a Bernoulli frequency, using the hypothesized rate p.
double FrequencyCiRadius(double p, std::int64_t n);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double ci = 0.0;
  std::int64_t n = 0;
};

struct CurveSeries {
  std::string prefix;
  std::vector<CurvePoint> points;  // sorted by x
};

// Collects every `<prefix>_K<K>.csv` regret file in `dir` into a mean
// average-altruistic-regret series per prefix.
std::vector<CurveSeries> CollectCurves(const std::string& dir);
// Writes `<prefix>_curve.tsv` (columns x, y, ci, n) for each series and
// returns the written paths.
std::vector<std::string> EmitCurves(const std::string& dir);

// Nash equilibria, PONE set and worst-PONE values of a game as JSON.
std::string EquilibriumReportJson(const BimatrixGame& game,
                                  const std::vector<std::string>& action_names,
                                  std::optional<Player> player = std::nullopt);

}  // namespace cooplab

#endif  // COOPLAB_HARNESS_H_

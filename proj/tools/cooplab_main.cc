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

// Command-line front end: dataset generation, experiments, bound reports,
// equilibrium enumeration and curve emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cooplab/config.h"
#include "cooplab/errors.h"
#include "cooplab/harness.h"
#include "cooplab/imitation.h"
#include "cooplab/population.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using cooplab::ExperimentConfig;
using cooplab::VerificationResult;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir = ".";
};

bool Report(const std::vector<VerificationResult>& results, const ExperimentConfig& cfg,
            const GlobalFlags& g) {
  bool ok = true;
  for (const auto& r : results) {
    std::cout << cooplab::FormatResult(r) << "\n";
    ok = ok && r.pass;
  }
  fs::create_directories(g.out_dir);
  std::ofstream(fs::path(g.out_dir) / (cfg.name + "_summary.json"))
      << cooplab::ResultsJson(results);
  return ok;
}

bool RunConfig(ExperimentConfig cfg, const GlobalFlags& g) {
  if (g.seed) cfg.seed = *g.seed;
  const auto results = cooplab::RunExperiment(cfg, {g.out_dir, g.jobs});
  return Report(results, cfg, g);
}

int Main(int argc, char** argv) {
  CLI::App app{"Repeated private-type bimatrix game laboratory"};
  app.require_subcommand(1);
  GlobalFlags g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed override");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for artifacts");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a self-play dataset");
  std::string gen_pop, gen_mu, gen_out;
  int gen_k = 0, gen_t = 0;
  gen->add_option("--population,--pop", gen_pop, "Population file")->required();
  gen->add_option("--mu", gen_mu, "Type distribution file (default uniform)");
  gen->add_option("--episodes,-K", gen_k, "Number of episodes")->required();
  gen->add_option("--T,--horizon", gen_t, "Horizon")->required();
  gen->add_option("--out,--output,-o", gen_out, "Dataset path")->required();

  // run-experiment
  auto* run = app.add_subcommand("run-experiment", "Run experiments and verify bounds");
  std::vector<std::string> configs;
  std::string kind, learner, data, population, mu, game;
  int run_t = -1, tilde_t = -1;
  std::int64_t episodes = -1;
  run->add_option("--config", configs, "Experiment config file(s)");
  run->add_option("--kind", kind, "Experiment kind when no config is given");
  run->add_option("--learner", learner, "Learner to evaluate (ic)")->check(CLI::IsMember({"ic"}));
  run->add_option("--data", data, "Dataset file for the learner");
  run->add_option("--tilde-t", tilde_t, "Imitation prefix length");
  run->add_option("--population", population, "Population file");
  run->add_option("--mu", mu, "Type distribution file");
  run->add_option("--game", game, "Game file");
  run->add_option("--T", run_t, "Horizon");
  run->add_option("--episodes", episodes, "Episode count");

  // verify-bounds
  auto* verify = app.add_subcommand("verify-bounds",
                                    "Report bound values and optionally run a suite");
  std::vector<std::string> suite;
  cooplab::BoundInputs in;
  verify->add_option("--suite", suite, "Experiment configs to run");
  verify->add_option("--N", in.num_actions, "Actions per player");
  verify->add_option("--types", in.num_types, "Number of types");
  verify->add_option("--T", in.horizon, "Horizon");
  verify->add_option("--tilde-t", in.tilde_horizon, "Imitation prefix length");
  verify->add_option("--k", in.handshake_length, "Handshake length");
  verify->add_option("--K", in.dataset_size, "Dataset size");
  verify->add_option("--delta", in.delta, "Confidence level");
  verify->add_option("--eps", in.eps, "Average-regret tolerance (default derived)");
  verify->add_option("--M", in.unique_histories, "Distinct handshake histories observed");

  // enumerate-eq
  auto* eq = app.add_subcommand("enumerate-eq", "Enumerate Nash and Pareto-optimal equilibria");
  std::string eq_game, eq_player, theta1, theta2;
  bool normalize = false;
  eq->add_option("game", eq_game, "Game file")->required();
  eq->add_option("--player", eq_player, "Restrict worst-PONE values to one player")
      ->check(CLI::IsMember({"row", "col"}));
  eq->add_flag("--normalize", normalize, "Rescale payoffs to [0, 1] first");
  eq->add_option("--theta1", theta1, "Row type (default: every joint type)");
  eq->add_option("--theta2", theta2, "Column type");

  // emit-curves
  auto* curves = app.add_subcommand("emit-curves", "Aggregate ic-eval CSVs into curves");
  std::string curve_dir;
  curves->add_option("--dir", curve_dir, "Results directory (default --out-dir)");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  if (*gen) {
    const auto pf = cooplab::LoadPopulationFile(gen_pop, gen_t);
    const auto dist = gen_mu.empty() ? cooplab::TypeDistribution::Uniform(pf.types)
                                     : cooplab::LoadTypeDistribution(gen_mu, pf.types);
    const auto dataset = cooplab::GenerateDataset(pf.population, dist, pf.types, gen_k,
                                                  gen_t, g.seed.value_or(0), g.jobs);
    cooplab::WriteDataset(dataset, pf.types, gen_out);
    std::cout << "wrote " << dataset.size() << " episodes to " << gen_out << "\n";
    return 0;
  }

  if (*run) {
    bool ok = true;
    for (const std::string& path : configs) {
      ok = RunConfig(cooplab::LoadExperimentConfig(path), g) && ok;
    }
    if (configs.empty()) {
      nlohmann::json j;
      if (!learner.empty()) kind = "ic-eval";
      if (kind.empty()) throw cooplab::FormatError("run-experiment needs --config or --kind");
      j["kind"] = kind;
      if (!data.empty()) j["dataset"] = data;
      if (!population.empty()) j["population"] = population;
      if (!mu.empty()) j["mu"] = mu;
      if (!game.empty()) j["game"] = game;
      if (run_t >= 0) j["T"] = run_t;
      if (tilde_t >= 0) j["tilde_T"] = tilde_t;
      if (episodes >= 0) j["episodes"] = episodes;
      ok = RunConfig(cooplab::ParseExperimentConfig(j, "."), g);
    }
    return ok ? 0 : 1;
  }

  if (*verify) {
    std::cout << cooplab::BoundReportJson(cooplab::MakeBoundReport(in)) << "\n";
    bool ok = true;
    for (const std::string& path : suite) {
      ok = RunConfig(cooplab::LoadExperimentConfig(path), g) && ok;
    }
    return ok ? 0 : 1;
  }

  if (*eq) {
    cooplab::TypeSpace types = cooplab::LoadTypeSpace(eq_game);
    if (normalize) types = types.Normalized();
    std::optional<cooplab::Player> player;
    if (!eq_player.empty()) player = cooplab::ParsePlayer(eq_player);
    std::vector<cooplab::JointType> joints;
    if (!theta1.empty() || types.size() == 1) {
      const int a = theta1.empty() ? 0 : types.Index(theta1);
      const int b = theta2.empty() ? a : types.Index(theta2);
      const auto game = types.Game({a, b});
      std::cout << cooplab::EquilibriumReportJson(game, types.action_names(), player);
      return 0;
    }
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& joint : types.JointTypes()) {
      nlohmann::ordered_json entry;
      entry["theta1"] = types.name(joint.row);
      entry["theta2"] = types.name(joint.col);
      entry["report"] = nlohmann::ordered_json::parse(cooplab::EquilibriumReportJson(
          types.Game(joint), types.action_names(), player));
      out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (*curves) {
    const std::string dir = curve_dir.empty() ? g.out_dir : curve_dir;
    const auto written = cooplab::EmitCurves(dir);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    if (written.empty()) std::cout << "no ic-eval results in " << dir << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const cooplab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

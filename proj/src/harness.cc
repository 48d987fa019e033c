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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "cooplab/agents.h"
#include "cooplab/config.h"
#include "cooplab/equilibria.h"
#include "cooplab/exact.h"
#include "cooplab/imitation.h"
#include "cooplab/parallel.h"
#include "cooplab/population.h"
#include "cooplab/regret.h"

namespace cooplab {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kExactTolerance = 1e-9;

struct KindEntry {
  ExperimentKind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {ExperimentKind::kMwRegret, "mw-regret"},
    {ExperimentKind::kNashSelfplay, "nash-selfplay"},
    {ExperimentKind::kSiSelfplay, "si-selfplay"},
    {ExperimentKind::kSiConsistency, "si-consistency"},
    {ExperimentKind::kAuthFailure, "auth-failure"},
    {ExperimentKind::kIcEval, "ic-eval"},
    {ExperimentKind::kFlattenCheck, "flatten-check"},
    {ExperimentKind::kMixtureCheck, "mixture-check"},
};

std::string Resolve(const json& j, const char* key, const std::string& base) {
  if (!j.contains(key)) return "";
  const fs::path p = j.at(key).get<std::string>();
  const fs::path full = p.is_absolute() ? p : fs::path(base) / p;
  if (!fs::exists(full)) {
    throw FormatError(std::string(key) + " file '" + full.string() + "' not found");
  }
  return full.lexically_normal().string();
}

template <typename T>
std::vector<T> ScalarOrList(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (j.at(key).is_array()) return j.at(key).get<std::vector<T>>();
  return {j.at(key).get<T>()};
}

// Writes the buffer in one go so partial files never appear.
void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << contents;
}

fs::path OutFile(const RunOptions& opts, const std::string& file) {
  fs::create_directories(opts.out_dir);
  return fs::path(opts.out_dir) / file;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments MeanVariance(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size() - 1);
  }
  return m;
}

VerificationResult Result(const ExperimentConfig& cfg, const std::string& name,
                          double statistic, double bound, double ci,
                          std::int64_t samples) {
  VerificationResult r;
  r.kind = ExperimentKindName(cfg.kind);
  r.name = name;
  r.statistic = statistic;
  r.bound = bound;
  r.ci_radius = ci;
  r.samples = samples;
  r.pass = statistic <= bound + ci;
  return r;
}

// Hard checks allow only floating-point slack.
VerificationResult HardResult(const ExperimentConfig& cfg, const std::string& name,
                              double statistic, double bound,
                              std::int64_t samples) {
  VerificationResult r = Result(cfg, name, statistic, bound, 0.0, samples);
  r.pass = statistic <= bound + kExactTolerance;
  return r;
}

TypeDistribution LoadMu(const ExperimentConfig& cfg, const TypeSpace& types) {
  return cfg.mu_path.empty() ? TypeDistribution::Uniform(types)
                             : LoadTypeDistribution(cfg.mu_path, types);
}

PopulationFile LoadPopulation(const ExperimentConfig& cfg) {
  if (cfg.population_path.empty()) {
    throw FormatError(ExperimentKindName(cfg.kind) + " needs a population file");
  }
  return LoadPopulationFile(cfg.population_path, cfg.horizon);
}

TypeSpace LoadGame(const ExperimentConfig& cfg) {
  if (cfg.game_path.empty()) {
    throw FormatError(ExperimentKindName(cfg.kind) + " needs a game file");
  }
  TypeSpace types = LoadTypeSpace(cfg.game_path);
  return cfg.normalize ? types.Normalized() : types;
}

const ProtocolParams& ProtocolMember(const Population& pop) {
  const auto* p = std::get_if<ProtocolParams>(&pop.members.front().params);
  if (!p) throw FormatError("the first population member must be a protocol agent");
  return *p;
}

JointType DrawJoint(const TypeDistribution& mu, std::mt19937_64& rng) {
  const Eigen::Map<const Eigen::VectorXd> w(
      mu.weights.data(), static_cast<Eigen::Index>(mu.weights.size()));
  return mu.support[SampleIndex(w, rng)];
}

double EpisodePayoff(const History& h, const BimatrixGame& game, Player p) {
  double total = 0.0;
  for (const Stage& s : h) total += Payoff(game, s.row, s.col, p);
  return total;
}

std::string Csv(std::initializer_list<std::string> cells) {
  std::string line;
  for (const std::string& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

std::string Num(double v) { return FormatDouble(v); }
std::string Int(std::int64_t v) { return std::to_string(v); }

// ---------------------------------------------------------------- mw-regret

enum Adversary { kIid, kMinimizer, kRegretGreedy, kPeriodic, kSwitching, kNumAdversaries };

const char* AdversaryName(int a) {
  static const char* kNames[] = {"iid", "minimizer", "regret-greedy", "periodic",
                                 "switching"};
  return kNames[a];
}

struct MwRun {
  int adversary = 0;
  double regret = 0.0;
};

MwRun RunMwAgainstAdversary(int n, int horizon, int adversary, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = UniformUnit(rng);
  }
  const TypeSpace types(n, {"g"}, {g});
  const BimatrixGame game = types.Game({0, 0});
  MwRun run;
  run.adversary = adversary;

  // Adversary parameters.
  Eigen::VectorXd iid(n);
  for (int j = 0; j < n; ++j) iid(j) = UniformUnit(rng) + 1e-3;
  iid /= iid.sum();
  const int period = 1 + static_cast<int>(UniformUnit(rng) * 5);
  std::vector<int> pattern(period);
  for (int& b : pattern) b = SampleIndex(UniformStrategy(n), rng);
  const int first = SampleIndex(UniformStrategy(n), rng);
  const int second = (first + 1 + SampleIndex(UniformStrategy(n - 1), rng)) % n;

  AgentSpec mw{"mw", MwParams{}, 0};
  AgentState state = InitialState(mw, types, Player::kRow, horizon, DeriveSeed(seed, 1));
  EpisodeTrace trace;
  RegretAccumulator acc(n);
  for (int t = 0; t < horizon; ++t) {
    const MixedStrategy sigma = Act(mw, state, trace.history);
    const Eigen::RowVectorXd expected = sigma.transpose() * g;
    int b = 0;
    switch (run.adversary) {
      case kIid: b = SampleIndex(iid, rng); break;
      case kMinimizer: expected.minCoeff(&b); break;
      case kRegretGreedy: {
        double best = -1e300;
        for (int j = 0; j < n; ++j) {
          const double v = (acc.action_totals() + g.col(j)).maxCoeff() -
                           (acc.realized_total() + expected(j));
          if (v > best) best = v, b = j;
        }
        break;
      }
      case kPeriodic: b = pattern[t % period]; break;
      case kSwitching: b = t < horizon / 2 ? first : second; break;
    }
    const int a = SampleIndex(sigma, rng);
    acc.Add(g.col(b), expected(b));
    trace.history.push_back({a, b});
    trace.row_strategies.push_back(sigma);
    trace.col_strategies.push_back(PureStrategy(n, b));
    state = Observe(mw, std::move(state), a, b);
  }
  run.regret = ExpectedExternalRegret(trace, game, Player::kRow);
  return run;
}

std::vector<VerificationResult> RunMwRegret(const ExperimentConfig& cfg,
                                            const RunOptions& opts) {
  const std::vector<int> sizes = cfg.num_actions.empty() ? std::vector<int>{2}
                                                         : cfg.num_actions;
  std::vector<VerificationResult> results;
  std::string csv = "N,run,adversary,seed,Rbar,bound\n";
  for (int n : sizes) {
    if (n < 2) throw DomainError("mw-regret needs at least two actions");
    const double bound = std::sqrt(0.5 * cfg.horizon * std::log(n));
    std::vector<MwRun> runs(cfg.episodes);
    std::vector<std::uint64_t> seeds(cfg.episodes);
    const std::uint64_t base = DeriveSeed(cfg.seed, static_cast<std::uint64_t>(n));
    ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int r) {
      // Consecutive runs cycle through the adversaries.
      seeds[r] = DeriveSeed(base, r);
      runs[r] = RunMwAgainstAdversary(n, cfg.horizon, r % kNumAdversaries, seeds[r]);
    });
    double worst = -1e300;
    for (std::int64_t r = 0; r < cfg.episodes; ++r) {
      worst = std::max(worst, runs[r].regret);
      csv += Csv({Int(n), Int(r), AdversaryName(runs[r].adversary),
                  std::to_string(seeds[r]), Num(runs[r].regret), Num(bound)});
    }
    results.push_back(HardResult(cfg, "max-expected-regret-N" + std::to_string(n),
                                 worst, bound, cfg.episodes));
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  return results;
}

// ------------------------------------------------------------ nash-selfplay

std::vector<VerificationResult> RunNashSelfplay(const ExperimentConfig& cfg,
                                                const RunOptions& opts) {
  const TypeSpace types = LoadGame(cfg);
  const JointType joint{0, 0};
  const BimatrixGame game = types.Game(joint);
  const NashEnumeration ne = EnumerateNash(game);
  const EquilibriumProfile* profile = nullptr;
  if (cfg.equilibrium == "mixed") {
    for (const auto& p : ne.profiles) {
      if (p.sigma_row.maxCoeff() < 1.0 || p.sigma_col.maxCoeff() < 1.0) {
        profile = &p;
        break;
      }
    }
    if (!profile) throw DataError("game has no mixed equilibrium");
  } else {
    const int idx = std::stoi(cfg.equilibrium);
    if (idx < 0 || idx >= static_cast<int>(ne.profiles.size())) {
      throw RangeError("equilibrium index " + cfg.equilibrium + " out of range");
    }
    profile = &ne.profiles[idx];
  }
  const AgentSpec row{"convention-row", FixedMixedParams{profile->sigma_row}, 0};
  const AgentSpec col{"convention-col", FixedMixedParams{profile->sigma_col}, 0};
  const AzumaBounds azuma = AzumaThresholds(cfg.horizon, cfg.delta);

  std::vector<RegretReport> reports(cfg.episodes);
  ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int e) {
    const EpisodeTrace trace =
        RunEpisode(row, col, types, joint, cfg.horizon, DeriveSeed(cfg.seed, e));
    reports[e] = MakeRegretReport(trace, game, types.name(0), types.name(0), e,
                                  Player::kCol, std::nan(""));
  });
  std::string csv = RegretCsvHeader() + "\n";
  std::int64_t realized_hits = 0;
  std::int64_t expected_hits = 0;
  for (const auto& r : reports) {
    csv += RegretCsvRow(r) + "\n";
    if (std::max(r.external_row, r.external_col) > azuma.realized_bound) ++realized_hits;
    if (std::max(r.expected_external_row, r.expected_external_col) > azuma.expected_bound) {
      ++expected_hits;
    }
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  const double n = static_cast<double>(cfg.episodes);
  const double ci = FrequencyCiRadius(cfg.delta, cfg.episodes);
  return {Result(cfg, "realized-regret-exceedance", realized_hits / n, cfg.delta, ci,
                 cfg.episodes),
          Result(cfg, "expected-regret-exceedance", expected_hits / n, cfg.delta, ci,
                 cfg.episodes)};
}

// -------------------------------------------------------------- si-selfplay

std::vector<VerificationResult> RunSiSelfplay(const ExperimentConfig& cfg,
                                              const RunOptions& opts) {
  const PopulationFile pf = LoadPopulation(cfg);
  const TypeSpace& types = pf.types;
  const AgentSpec& agent = pf.population.members.front();
  const ProtocolParams& params = ProtocolMember(pf.population);
  const TypeDistribution mu = LoadMu(cfg, types);
  const int k = std::get<ProtocolState>(
                    InitialState(agent, types, Player::kRow, cfg.horizon, 0).detail)
                    .handshake_length;
  const ProtocolTolerances tol =
      ComputeProtocolTolerances(cfg.delta, cfg.horizon, k, types.num_actions());

  struct Row {
    std::uint64_t seed;
    JointType joint;
    bool converged;
    double avg_row, avg_col, pone_row, pone_col, deviation;
  };
  std::vector<Row> rows(cfg.episodes);
  ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int e) {
    const std::uint64_t s = DeriveSeed(cfg.seed, e);
    std::mt19937_64 rng(s);
    const JointType joint = DrawJoint(mu, rng);
    const EpisodeTrace trace =
        RunEpisode(agent, agent, types, joint, cfg.horizon, DeriveSeed(s, 1));
    bool converged = true;
    for (int t = k; t < cfg.horizon; ++t) {
      if (trace.row_phases[t] != static_cast<int>(ProtocolPhase::kConvention) ||
          trace.col_phases[t] != static_cast<int>(ProtocolPhase::kConvention)) {
        converged = false;
      }
    }
    const BimatrixGame game = types.Game(joint);
    const EquilibriumProfile& conv = params.conventions->at(joint);
    Row r{s, joint, converged,
          EpisodePayoff(trace.history, game, Player::kRow) / cfg.horizon,
          EpisodePayoff(trace.history, game, Player::kCol) / cfg.horizon,
          conv.value_row, conv.value_col, 0.0};
    r.deviation = std::max(std::abs(r.avg_row - r.pone_row), std::abs(r.avg_col - r.pone_col));
    rows[e] = r;
  });
  std::string csv =
      "episode_id,seed,theta1,theta2,converged,avg_row,avg_col,pone_row,pone_col,deviation\n";
  std::int64_t failures = 0;
  std::vector<double> devs;
  for (std::int64_t e = 0; e < cfg.episodes; ++e) {
    const Row& r = rows[e];
    if (!r.converged) ++failures;
    devs.push_back(r.deviation);
    csv += Csv({Int(e), std::to_string(r.seed), types.name(r.joint.row),
                types.name(r.joint.col), r.converged ? "1" : "0", Num(r.avg_row),
                Num(r.avg_col), Num(r.pone_row), Num(r.pone_col), Num(r.deviation)});
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  const Moments m = MeanVariance(devs);
  const double n = static_cast<double>(cfg.episodes);
  return {Result(cfg, "fallback-frequency", failures / n, cfg.delta,
                 FrequencyCiRadius(cfg.delta, cfg.episodes), cfg.episodes),
          Result(cfg, "pone-payoff-deviation", m.mean, tol.eps0,
                 MeanCiRadius(m.variance, cfg.episodes), cfg.episodes)};
}

// ----------------------------------------------------------- si-consistency

std::vector<VerificationResult> RunSiConsistency(const ExperimentConfig& cfg,
                                                 const RunOptions& opts) {
  const PopulationFile pf = LoadPopulation(cfg);
  const TypeSpace& types = pf.types;
  const AgentSpec& agent = pf.population.members.front();
  const ProtocolParams& params = ProtocolMember(pf.population);
  const TypeDistribution mu = LoadMu(cfg, types);
  const int n_actions = types.num_actions();
  const int k = std::get<ProtocolState>(
                    InitialState(agent, types, Player::kRow, cfg.horizon, 0).detail)
                    .handshake_length;
  const double bound = k + params.eps1 * (cfg.horizon - k) +
                       std::sqrt(0.5 * (cfg.horizon - k) * std::log(n_actions));
  if (cfg.agents.empty()) throw FormatError("si-consistency needs adversary agents");

  std::vector<VerificationResult> results;
  for (std::size_t a = 0; a < cfg.agents.size(); ++a) {
    const AgentSpec adversary = ParseAgentSpec(cfg.agents[a], types, cfg.horizon);
    const std::uint64_t base = DeriveSeed(cfg.seed, a);
    std::vector<RegretReport> reports(cfg.episodes);
    ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int e) {
      const std::uint64_t s = DeriveSeed(base, e);
      std::mt19937_64 rng(s);
      const JointType joint = DrawJoint(mu, rng);
      const EpisodeTrace trace =
          RunEpisode(agent, adversary, types, joint, cfg.horizon, DeriveSeed(s, 1));
      reports[e] = MakeRegretReport(trace, types.Game(joint), types.name(joint.row),
                                    types.name(joint.col), e, Player::kCol, std::nan(""));
    });
    std::string csv = RegretCsvHeader() + "\n";
    double worst = -1e300;
    for (const auto& r : reports) {
      csv += RegretCsvRow(r) + "\n";
      worst = std::max(worst, r.expected_external_row);
    }
    WriteFile(OutFile(opts, cfg.name + "_" + adversary.id + ".csv"), csv);
    results.push_back(HardResult(cfg, "max-expected-regret-vs-" + adversary.id, worst,
                                 bound, cfg.episodes));
  }
  return results;
}

// ------------------------------------------------------------- auth-failure

std::vector<VerificationResult> RunAuthFailure(const ExperimentConfig& cfg,
                                               const RunOptions& opts) {
  const int n = cfg.num_actions.empty() ? 2 : cfg.num_actions.front();
  const std::vector<int> lengths =
      cfg.handshake_lengths.empty() ? std::vector<int>{2, 3} : cfg.handshake_lengths;
  const std::vector<double> fractions =
      cfg.observed_fractions.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                                     : cfg.observed_fractions;
  constexpr double kFrequencyTolerance = 0.02;
  std::vector<VerificationResult> results;
  std::string csv = "N,k,M,trials,failures,frequency,corrected,as_printed\n";
  for (int k : lengths) {
    const double codes_d = std::pow(static_cast<double>(n), k);
    if (codes_d * codes_d > 1e8) throw CapacityError("handshake space too large to tabulate");
    const int codes = static_cast<int>(std::lround(codes_d));
    const int total = codes * codes;
    // Fixed seeded order in which joint handshake histories enter the data,
    // so larger M always extends the smaller observed sets.
    std::vector<int> rank(total);
    {
      std::vector<int> order(total);
      for (int i = 0; i < total; ++i) order[i] = i;
      std::mt19937_64 rng(DeriveSeed(cfg.seed, 1000 + k));
      for (int i = total - 1; i > 0; --i) {
        const int j = static_cast<int>(UniformUnit(rng) * (i + 1));
        std::swap(order[i], order[j]);
      }
      for (int i = 0; i < total; ++i) rank[order[i]] = i;
    }
    for (double f : fractions) {
      const std::int64_t m = std::llround(f * total);
      if (m < 0 || m > total) throw DomainError("observed fraction must lie in [0, 1]");
      const std::uint64_t cell = DeriveSeed(DeriveSeed(cfg.seed, k), m);
      std::vector<char> failed(cfg.episodes, 0);
      ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int i) {
        std::mt19937_64 rng(DeriveSeed(cell, i));
        const int joint = SampleIndex(UniformStrategy(total), rng);
        if (rank[joint] < m) return;  // history seen in the data: replayed
        const int own_code = joint % codes;
        std::vector<int> guess(k);
        for (int& d : guess) d = SampleIndex(UniformStrategy(n), rng);
        const std::optional<int> decoded = HandshakeDecode(guess, n, codes);
        failed[i] = decoded != own_code;
      });
      std::int64_t failures = 0;
      for (char c : failed) failures += c;
      const double freq = static_cast<double>(failures) / cfg.episodes;
      const AuthFailure p = AuthFailureProbability(n, k, m);
      csv += Csv({Int(n), Int(k), Int(m), Int(cfg.episodes), Int(failures), Num(freq),
                  Num(p.corrected), Num(p.as_printed)});
      const std::string name = "k" + std::to_string(k) + "-M" + std::to_string(m);
      if (m == total) {
        VerificationResult r = Result(cfg, name + "-exact-zero", freq, 0.0, 0.0, cfg.episodes);
        r.pass = failures == 0;
        results.push_back(r);
      } else {
        results.push_back(Result(cfg, name, std::abs(freq - p.corrected),
                                 kFrequencyTolerance, 0.0, cfg.episodes));
      }
    }
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  return results;
}

// ------------------------------------------------------------------ ic-eval

int DefaultTildeHorizon(int k, int horizon) {
  return k + (horizon - k + 3) / 4;
}

Dataset Prefix(const Dataset& data, std::int64_t size) {
  Dataset out;
  out.meta = data.meta;
  out.episodes.assign(data.episodes.begin(), data.episodes.begin() + size);
  return out;
}

std::vector<VerificationResult> RunIcEval(const ExperimentConfig& cfg,
                                          const RunOptions& opts) {
  const PopulationFile pf = LoadPopulation(cfg);
  const TypeSpace& types = pf.types;
  const Population& pop = pf.population;
  const TypeDistribution mu = LoadMu(cfg, types);
  const int n = types.num_actions();
  const int T = cfg.horizon;
  int k = DefaultHandshakeLength(types.size(), n);
  if (std::holds_alternative<ProtocolParams>(pop.members.front().params)) {
    k = std::get<ProtocolState>(
            InitialState(pop.members.front(), types, Player::kRow, T, 0).detail)
            .handshake_length;
  }
  const int tilde = cfg.tilde_horizon >= 0 ? cfg.tilde_horizon : DefaultTildeHorizon(k, T);
  const Player learner = cfg.seat;
  const Player partner = Opponent(learner);

  std::map<JointType, double> tau;
  for (const JointType& j : types.JointTypes()) {
    tau[j] = WorstPonePayoff(types.Game(j), partner);
  }

  // Replicate datasets; a smaller K uses a prefix of the same draws.
  std::vector<std::int64_t> sizes = cfg.dataset_sizes;
  std::vector<Dataset> full;
  int replicates = cfg.replicates;
  if (!cfg.dataset_path.empty()) {
    full.push_back(ReadDataset(cfg.dataset_path, types));
    if (full.front().meta.horizon != T) {
      throw DataError("dataset horizon " + std::to_string(full.front().meta.horizon) +
                      " does not match T = " + std::to_string(T));
    }
    sizes = {static_cast<std::int64_t>(full.front().size())};
    replicates = 1;
  } else {
    if (sizes.empty()) throw FormatError("ic-eval needs dataset_sizes or a dataset");
    const std::int64_t max_k = *std::max_element(sizes.begin(), sizes.end());
    for (int r = 0; r < replicates; ++r) {
      full.push_back(GenerateDataset(pop, mu, types, static_cast<int>(max_k), T,
                                     DeriveSeed(cfg.seed, 1000 + r), opts.jobs));
    }
  }
  const Eigen::Map<const Eigen::VectorXd> rho(
      pop.weights.data(), static_cast<Eigen::Index>(pop.weights.size()));

  std::vector<VerificationResult> results;
  std::vector<Moments> stats;
  const std::int64_t per_k = cfg.episodes * replicates;
  for (std::int64_t size : sizes) {
    std::vector<RegretReport> reports(per_k);
    for (int r = 0; r < replicates; ++r) {
      const Dataset data = Prefix(full[r], size);
      const AgentSpec ic = MakeImitateCommitAgent(data, tilde, T, 0, learner);
      // Evaluation draws are shared across K.
      const std::uint64_t base = DeriveSeed(cfg.seed, 2000 + r);
      ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int e) {
        const std::uint64_t s = DeriveSeed(base, e);
        std::mt19937_64 rng(s);
        const AgentSpec& other = pop.members[SampleIndex(rho, rng)];
        const JointType joint = DrawJoint(mu, rng);
        const std::uint64_t run_seed = DeriveSeed(s, 1);
        const EpisodeTrace trace =
            learner == Player::kRow ? RunEpisode(ic, other, types, joint, T, run_seed)
                                    : RunEpisode(other, ic, types, joint, T, run_seed);
        const std::int64_t id = static_cast<std::int64_t>(r) * cfg.episodes + e;
        reports[id] = MakeRegretReport(trace, types.Game(joint), types.name(joint.row),
                                       types.name(joint.col), id, partner, tau.at(joint));
      });
    }
    std::string csv = RegretCsvHeader() + "\n";
    std::vector<double> avg;
    for (const auto& rep : reports) {
      csv += RegretCsvRow(rep) + "\n";
      avg.push_back(rep.altruistic_average());
    }
    WriteFile(OutFile(opts, cfg.name + "_K" + std::to_string(size) + ".csv"), csv);
    stats.push_back(MeanVariance(avg));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const double ci = kZ99 * std::sqrt(stats[i - 1].variance / per_k +
                                       stats[i].variance / per_k);
    results.push_back(Result(cfg,
                             "nonincreasing-K" + std::to_string(sizes[i - 1]) + "-to-K" +
                                 std::to_string(sizes[i]),
                             stats[i].mean - stats[i - 1].mean, 0.0, ci, 2 * per_k));
  }
  BoundInputs in;
  in.num_actions = n;
  in.num_types = types.size();
  in.horizon = T;
  in.tilde_horizon = tilde;
  in.handshake_length = k;
  in.dataset_size = sizes.back();
  in.delta = cfg.delta;
  in.eps = cfg.eps.value_or(-1.0);
  const BoundReport bound = MakeBoundReport(in);
  results.push_back(Result(cfg, "final-K" + std::to_string(sizes.back()) + "-bound",
                           stats.back().mean, bound.regret_bound,
                           MeanCiRadius(stats.back().variance, per_k), per_k));
  return results;
}

// ------------------------------------------------------------ flatten-check

std::vector<VerificationResult> RunFlattenCheck(const ExperimentConfig& cfg,
                                                const RunOptions& opts) {
  const PopulationFile pf = LoadPopulation(cfg);
  const TypeSpace& types = pf.types;
  const Population& pop = pf.population;
  if (cfg.agents.empty()) throw FormatError("flatten-check needs a probe agent");
  const AgentSpec probe = ParseAgentSpec(cfg.agents.front(), types, cfg.horizon);
  const Player probe_seat = cfg.seat;
  const AgentSpec flat = FlattenPopulation(pop, types, cfg.horizon, Opponent(probe_seat));

  auto enumerate = [&](const AgentSpec& other, JointType joint) {
    return probe_seat == Player::kRow
               ? EnumerateHistories(probe, other, types, joint, cfg.horizon)
               : EnumerateHistories(other, probe, types, joint, cfg.horizon);
  };
  auto key = [](const History& h) {
    std::vector<int> v;
    for (const Stage& s : h) v.push_back(s.row), v.push_back(s.col);
    return v;
  };

  std::string csv = "theta1,theta2,tv,histories\n";
  double worst = 0.0;
  const std::vector<JointType> joints = types.JointTypes();
  for (const JointType& joint : joints) {
    std::map<std::vector<int>, double> diff;
    for (std::size_t m = 0; m < pop.members.size(); ++m) {
      for (const auto& leaf : enumerate(pop.members[m], joint)) {
        diff[key(leaf.history)] += pop.weights[m] * leaf.probability;
      }
    }
    for (const auto& leaf : enumerate(flat, joint)) {
      diff[key(leaf.history)] -= leaf.probability;
    }
    double tv = 0.0;
    for (const auto& [h, d] : diff) tv += std::abs(d);
    tv *= 0.5;
    worst = std::max(worst, tv);
    csv += Csv({types.name(joint.row), types.name(joint.col), Num(tv), Int(diff.size())});
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  return {HardResult(cfg, "max-total-variation", worst, 0.0,
                     static_cast<std::int64_t>(joints.size()))};
}

// ------------------------------------------------------------ mixture-check

std::vector<VerificationResult> RunMixtureCheck(const ExperimentConfig& cfg,
                                                const RunOptions& opts) {
  const std::vector<int> sizes =
      cfg.num_actions.empty() ? std::vector<int>{2, 3, 4} : cfg.num_actions;
  struct Row {
    int n;
    int components;
    double gz, identity, best_response;
  };
  std::vector<Row> rows(cfg.episodes);
  ParallelFor(static_cast<int>(cfg.episodes), opts.jobs, [&](int i) {
    std::mt19937_64 rng(DeriveSeed(cfg.seed, i));
    const int n = sizes[i % sizes.size()];
    JointStrategy z(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double u = UniformUnit(rng);
        z(a, b) = u * u;
      }
    }
    // Exercise dropped columns and columns sharing a conditional.
    if (UniformUnit(rng) < 0.3) z.col(SampleIndex(UniformStrategy(n), rng)).setZero();
    if (UniformUnit(rng) < 0.3) {
      const int src = SampleIndex(UniformStrategy(n), rng);
      const int dst = SampleIndex(UniformStrategy(n), rng);
      if (src != dst) z.col(dst) = (0.5 + UniformUnit(rng)) * z.col(src);
    }
    if (z.sum() <= 0.0) z(0, 0) = 1.0;
    z /= z.sum();
    Eigen::MatrixXd g(n, n);  // partner payoff, (row action, col action)
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) g(a, b) = UniformUnit(rng);
    }
    const CommitmentMixture mix = MixtureFromJoint(z);
    Row r{n, static_cast<int>(mix.components.size()), z.cwiseProduct(g).sum(), 0.0, 0.0};
    for (int c = 0; c < r.components; ++c) {
      const CommitmentComponent& comp = mix.components[c];
      const Eigen::RowVectorXd values = comp.strategy.transpose() * g;
      r.identity += comp.probability * values.dot(ResponseFunction(mix, c));
      r.best_response += comp.probability * values.maxCoeff();
    }
    rows[i] = r;
  });
  std::string csv = "trial,N,components,G_z,identity,best_response\n";
  double worst_identity = 0.0;
  double worst_gap = -1e300;
  for (std::int64_t i = 0; i < cfg.episodes; ++i) {
    const Row& r = rows[i];
    worst_identity = std::max(worst_identity, std::abs(r.identity - r.gz));
    worst_gap = std::max(worst_gap, r.gz - r.best_response);
    csv += Csv({Int(i), Int(r.n), Int(r.components), Num(r.gz), Num(r.identity),
                Num(r.best_response)});
  }
  WriteFile(OutFile(opts, cfg.name + ".csv"), csv);
  return {HardResult(cfg, "response-identity-error", worst_identity, 0.0, cfg.episodes),
          HardResult(cfg, "best-response-shortfall", worst_gap, 0.0, cfg.episodes)};
}

ordered_json ProfileJson(const EquilibriumProfile& p) {
  ordered_json j;
  j["sigma_row"] = std::vector<double>(p.sigma_row.data(),
                                       p.sigma_row.data() + p.sigma_row.size());
  j["sigma_col"] = std::vector<double>(p.sigma_col.data(),
                                       p.sigma_col.data() + p.sigma_col.size());
  j["value_row"] = p.value_row;
  j["value_col"] = p.value_col;
  return j;
}

}  // namespace

std::string ExperimentKindName(ExperimentKind kind) {
  for (const auto& e : kKinds) {
    if (e.kind == kind) return e.name;
  }
  throw RangeError("unknown experiment kind");
}

ExperimentKind ParseExperimentKind(const std::string& name) {
  for (const auto& e : kKinds) {
    if (name == e.name) return e.kind;
  }
  throw FormatError("unknown experiment kind '" + name + "'");
}

ExperimentConfig ParseExperimentConfig(const json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  try {
    cfg.kind = ParseExperimentKind(j.at("kind").get<std::string>());
    cfg.name = j.value("name", ExperimentKindName(cfg.kind));
    cfg.game_path = Resolve(j, "game", base_dir);
    cfg.population_path = Resolve(j, "population", base_dir);
    cfg.mu_path = Resolve(j, "mu", base_dir);
    cfg.dataset_path = Resolve(j, "dataset", base_dir);
    cfg.normalize = j.value("normalize", true);
    cfg.horizon = j.value("T", 0);
    cfg.tilde_horizon = j.value("tilde_T", -1);
    cfg.delta = j.value("delta", 0.1);
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    cfg.episodes = j.value("episodes", std::int64_t{0});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.replicates = j.value("replicates", 1);
    cfg.num_actions = ScalarOrList<int>(j, "num_actions");
    cfg.handshake_lengths = ScalarOrList<int>(j, "handshake_lengths");
    cfg.observed_fractions = ScalarOrList<double>(j, "observed_fractions");
    cfg.dataset_sizes = ScalarOrList<std::int64_t>(j, "dataset_sizes");
    if (j.contains("equilibrium")) {
      const json& e = j.at("equilibrium");
      cfg.equilibrium = e.is_string() ? e.get<std::string>() : std::to_string(e.get<int>());
    }
    if (j.contains("agents")) cfg.agents = j.at("agents");
    if (j.contains("seat")) cfg.seat = ParsePlayer(j.at("seat").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad experiment config: ") + e.what());
  }
  if (cfg.horizon < 0) throw DomainError("T must be non-negative");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (cfg.replicates < 1) throw DomainError("replicates must be at least 1");
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  try {
    return ParseExperimentConfig(ReadJsonFile(path), fs::path(path).parent_path().string());
  } catch (const Error&) {
    RethrowWithContext(path + ": ");
  }
}

std::vector<VerificationResult> RunExperiment(const ExperimentConfig& cfg,
                                              const RunOptions& options) {
  if (cfg.episodes <= 0) {
    throw DataError("experiment '" + cfg.name + "' has no episodes; results would be empty");
  }
  switch (cfg.kind) {
    case ExperimentKind::kMwRegret: return RunMwRegret(cfg, options);
    case ExperimentKind::kNashSelfplay: return RunNashSelfplay(cfg, options);
    case ExperimentKind::kSiSelfplay: return RunSiSelfplay(cfg, options);
    case ExperimentKind::kSiConsistency: return RunSiConsistency(cfg, options);
    case ExperimentKind::kAuthFailure: return RunAuthFailure(cfg, options);
    case ExperimentKind::kIcEval: return RunIcEval(cfg, options);
    case ExperimentKind::kFlattenCheck: return RunFlattenCheck(cfg, options);
    case ExperimentKind::kMixtureCheck: return RunMixtureCheck(cfg, options);
  }
  throw RangeError("unknown experiment kind");
}

std::string FormatResult(const VerificationResult& r) {
  std::ostringstream out;
  out << (r.pass ? "PASS " : "FAIL ") << r.kind << '/' << r.name
      << " statistic=" << FormatDouble(r.statistic) << " bound=" << FormatDouble(r.bound)
      << " ci=" << FormatDouble(r.ci_radius) << " n=" << r.samples;
  return out.str();
}

std::string ResultsJson(const std::vector<VerificationResult>& results) {
  ordered_json out = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["kind"] = r.kind;
    j["name"] = r.name;
    j["statistic"] = r.statistic;
    j["bound"] = r.bound;
    j["ci_radius"] = r.ci_radius;
    j["samples"] = r.samples;
    j["pass"] = r.pass;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

double MeanCiRadius(double variance, std::int64_t n) {
  if (n <= 0) return 0.0;
  return kZ99 * std::sqrt(std::max(variance, 0.0) / static_cast<double>(n));
}

double FrequencyCiRadius(double p, std::int64_t n) {
  return MeanCiRadius(p * (1.0 - p), n);
}

std::vector<CurveSeries> CollectCurves(const std::string& dir) {
  if (!fs::is_directory(dir)) throw FormatError("results directory '" + dir + "' not found");
  static const std::regex kPattern(R"((.+)_K([0-9]+)\.csv)");
  std::map<std::string, std::vector<CurvePoint>> series;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& path : files) {
    std::smatch m;
    const std::string file = path.filename().string();
    if (!std::regex_match(file, m, kPattern)) continue;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    const auto col = [&](const std::string& name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw FormatError(file + ": missing column " + name);
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t alt = col("R_alt");
    const std::size_t horizon = col("T");
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != header.size()) {
        throw FormatError(file + ": wrong number of columns", line_no);
      }
      const double t = std::stod(cells[horizon]);
      values.push_back(t > 0 ? std::stod(cells[alt]) / t : 0.0);
    }
    const Moments mv = MeanVariance(values);
    const auto n = static_cast<std::int64_t>(values.size());
    series[m[1].str()].push_back({std::stod(m[2].str()), mv.mean, MeanCiRadius(mv.variance, n), n});
  }
  std::vector<CurveSeries> out;
  for (auto& [prefix, points] : series) {
    std::sort(points.begin(), points.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
    out.push_back({prefix, std::move(points)});
  }
  return out;
}

std::vector<std::string> EmitCurves(const std::string& dir) {
  std::vector<std::string> written;
  for (const CurveSeries& s : CollectCurves(dir)) {
    std::string tsv = "x\ty\tci\tn\n";
    for (const CurvePoint& p : s.points) {
      tsv += FormatDouble(p.x) + "\t" + FormatDouble(p.y) + "\t" + FormatDouble(p.ci) +
             "\t" + std::to_string(p.n) + "\n";
    }
    const fs::path path = fs::path(dir) / (s.prefix + "_curve.tsv");
    WriteFile(path, tsv);
    written.push_back(path.string());
  }
  return written;
}

std::string EquilibriumReportJson(const BimatrixGame& game,
                                  const std::vector<std::string>& action_names,
                                  std::optional<Player> player) {
  const NashEnumeration ne = EnumerateNash(game);
  const PoneSet pone = ParetoFilter(ne.profiles);
  ordered_json j;
  j["num_actions"] = game.num_actions();
  j["actions"] = action_names;
  j["degenerate"] = ne.degenerate;
  j["equilibria"] = ordered_json::array();
  for (const auto& p : ne.profiles) j["equilibria"].push_back(ProfileJson(p));
  j["pone"] = ordered_json::array();
  for (const auto& p : pone.profiles) j["pone"].push_back(ProfileJson(p));
  ordered_json tau;
  for (Player p : {Player::kRow, Player::kCol}) {
    if (!player || *player == p) tau[PlayerName(p)] = WorstPonePayoff(pone, p);
  }
  j["worst_pone"] = tau;
  return j.dump(2) + "\n";
}

}  // namespace cooplab

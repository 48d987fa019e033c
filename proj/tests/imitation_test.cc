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

#include "cooplab/imitation.h"

#include <cmath>
#include <map>

#include "cooplab/errors.h"
#include "cooplab/exact.h"
#include "doctest.h"
#include "json.hpp"
#include "test_util.h"

namespace cooplab {
namespace {

TypeSpace Types2() { return LoadTypeSpace(testing::DataPath("games/types2.json")); }

AgentSpec Sequence(const std::string& id, std::vector<int> actions) {
  return AgentSpec{id, FixedSequenceParams{std::move(actions)}, 0};
}

Dataset MakeDataset(int num_actions, int horizon, std::vector<DatasetRecord> records) {
  Dataset d;
  d.meta.num_actions = num_actions;
  d.meta.horizon = horizon;
  d.episodes = std::move(records);
  return d;
}

// All length-`len` histories over n actions, in lexicographic order.
std::vector<History> AllHistories(int n, int len) {
  std::vector<History> out{{}};
  for (int t = 0; t < len; ++t) {
    std::vector<History> next;
    for (const History& h : out) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          History g = h;
          g.push_back({a, b});
          next.push_back(std::move(g));
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

TEST_CASE("fit examples") {
  const Dataset one = MakeDataset(2, 2, {{{0, 1}, {{0, 1}, {1, 1}}}});
  const ImitationPolicy p = FitImitation(one, 2);
  CHECK(p.Lookup(0, {}) == PureStrategy(2, 0));
  CHECK(p.Lookup(0, {{0, 1}}) == PureStrategy(2, 1));
  CHECK(p.Lookup(1, {}) == UniformStrategy(2));
  CHECK(p.Lookup(0, {{1, 1}}) == UniformStrategy(2));

  const Dataset three = MakeDataset(
      2, 1, {{{0, 0}, {{0, 0}}}, {{0, 1}, {{0, 1}}}, {{0, 0}, {{1, 0}}}});
  const MixedStrategy s = FitImitation(three, 1).Lookup(0, {});
  CHECK(s(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const ImitationPolicy col = FitImitation(three, 1, Player::kCol);
  CHECK(col.Lookup(0, {}) == PureStrategy(2, 0));
  CHECK(col.Lookup(1, {}) == PureStrategy(2, 1));
}

TEST_CASE("fit edge cases") {
  const Dataset empty = MakeDataset(3, 4, {});
  const ImitationPolicy p = FitImitation(empty, 2);
  CHECK(p.empty());
  CHECK(p.Lookup(0, {{2, 1}}) == UniformStrategy(3));
  CHECK_THROWS_AS(FitImitation(empty, 5), DomainError);
  CHECK(FitImitation(MakeDataset(2, 3, {{{0, 0}, {{0, 0}, {0, 0}, {0, 0}}}}), 0).empty());
}

TEST_CASE("fitted frequencies equal a recount of the dataset") {
  const TypeSpace types = Types2();
  const Population pop{{AgentSpec{"mw", MwParams{}, 0}, AgentSpec{"u", UniformRandomParams{}, 0},
                        AgentSpec{"fm", FixedMixedParams{MixedStrategy{{0.3, 0.7}}}, 0}},
                       {0.5, 0.3, 0.2}};
  const Dataset data =
      GenerateDataset(pop, TypeDistribution::Uniform(types), types, 3000, 6, 77);
  const int tilde = 4;
  const ImitationPolicy policy = FitImitation(data, tilde);
  std::map<ImitationPolicy::Key, std::vector<int>> recount;
  for (const auto& rec : data.episodes) {
    for (int t = 0; t < tilde; ++t) {
      auto& c = recount[ImitationPolicy::MakeKey(rec.types.row, rec.history, t)];
      c.resize(2, 0);
      ++c[rec.history[t].row];
    }
  }
  REQUIRE(recount.size() == policy.counts().size());
  for (const auto& [key, c] : recount) {
    History prefix;
    for (std::size_t i = 0; i < key.second.size(); i += 2) {
      prefix.push_back({key.second[i], key.second[i + 1]});
    }
    const double total = c[0] + c[1];
    const MixedStrategy s = policy.Lookup(key.first, prefix);
    REQUIRE(s(0) == c[0] / total);
    REQUIRE(s(1) == c[1] / total);
    REQUIRE(policy.Visits(key.first, prefix) == c[0] + c[1]);
  }
}

TEST_CASE("empirical joint examples") {
  History h;
  for (int t = 0; t < 5; ++t) h.push_back({0, 0});
  for (int t = 0; t < 5; ++t) h.push_back({1, 1});
  const JointStrategy z = EmpiricalJoint(h, 10, 2);
  CHECK(z(0, 0) == 0.5);
  CHECK(z(1, 1) == 0.5);
  CHECK(z(0, 1) == 0.0);
  CHECK(z(1, 0) == 0.0);

  const JointStrategy first = EmpiricalJoint(h, 1, 2);
  CHECK(first(0, 0) == 1.0);
  CHECK(first.sum() == 1.0);

  const History constant(7, Stage{1, 0});
  CHECK(EmpiricalJoint(constant, 7, 2)(1, 0) == 1.0);

  CHECK_THROWS_AS(EmpiricalJoint(h, 0, 2), DomainError);
  CHECK_THROWS_AS(EmpiricalJoint(h, 11, 2), DomainError);
}

TEST_CASE("mixture examples") {
  JointStrategy pd = JointStrategy::Zero(2, 2);
  pd(0, 0) = 0.5;
  pd(1, 1) = 0.5;
  const CommitmentMixture m = MixtureFromJoint(pd);
  REQUIRE(m.components.size() == 2);
  CHECK(m.components[0].strategy == PureStrategy(2, 0));
  CHECK(m.components[1].strategy == PureStrategy(2, 1));
  CHECK(m.components[0].probability == 0.5);
  CHECK(ResponseFunction(m, 0) == PureStrategy(2, 0));
  CHECK(ResponseFunction(m, 1) == PureStrategy(2, 1));

  const MixedStrategy x{{0.2, 0.5, 0.3}};
  const MixedStrategy y{{0.6, 0.1, 0.3}};
  const JointStrategy product = x * y.transpose();
  const CommitmentMixture pm = MixtureFromJoint(product);
  REQUIRE(pm.components.size() == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK((pm.components[c].strategy - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ResponseFunction(pm, c) - y).cwiseAbs().maxCoeff() < 1e-12);
  }

  JointStrategy single = JointStrategy::Zero(3, 3);
  single(0, 2) = 0.25;
  single(2, 2) = 0.75;
  const CommitmentMixture sm = MixtureFromJoint(single);
  REQUIRE(sm.components.size() == 1);
  CHECK(sm.components[0].column == 2);
  CHECK(sm.components[0].probability == 1.0);
  CHECK(sm.components[0].strategy(2) == doctest::Approx(0.75));
}

TEST_CASE("columns with equal conditionals share a reply") {
  // Both columns have conditional (0.5, 0.5); masses 0.3 and 0.7.
  JointStrategy z(2, 2);
  z << 0.15, 0.35, 0.15, 0.35;
  CHECK((ResponseFunction(z, 0) - MixedStrategy{{0.3, 0.7}}).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ResponseFunction(z, 1) - MixedStrategy{{0.3, 0.7}}).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS(ResponseFunction(z, 5));
}

TEST_CASE("mixture payoff identity and best-response inequality") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    JointStrategy z = testing::RandomMatrix(n, rng);
    if (trial % 4 == 0) z.col(trial % n).setZero();
    if (trial % 5 == 0) z.col((trial + 1) % n) = 2.0 * z.col(trial % n);
    if (z.sum() <= 0.0) z(0, 0) = 1.0;
    z /= z.sum();
    const Eigen::MatrixXd g = testing::RandomMatrix(n, rng);
    const double gz = z.cwiseProduct(g).sum();
    const CommitmentMixture m = MixtureFromJoint(z);
    double total = 0.0;
    double identity = 0.0;
    double best = 0.0;
    for (int c = 0; c < static_cast<int>(m.components.size()); ++c) {
      const auto& comp = m.components[c];
      REQUIRE(IsDistribution(comp.strategy));
      const Eigen::RowVectorXd values = comp.strategy.transpose() * g;
      identity += comp.probability * values.dot(ResponseFunction(m, c));
      best += comp.probability * values.maxCoeff();
      total += comp.probability;
    }
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(std::abs(identity - gz) <= 1e-9);
    REQUIRE(best >= gz - 1e-9);
  }
}

TEST_CASE("imitate-then-commit replays deterministic data") {
  const TypeSpace types = Types2();
  const AgentSpec row_seq = Sequence("r", {0, 1, 1, 0});
  const Dataset data = GenerateDataset(Population{{row_seq}, {1.0}},
                                       TypeDistribution::PointMass({0, 1}), types, 5, 8, 3);
  // The population is the row sequence in both seats; script the partner
  // so it reproduces the recorded column actions.
  std::vector<int> recorded;
  for (const Stage& s : data.episodes.front().history) recorded.push_back(s.col);
  const AgentSpec ic = MakeImitateCommitAgent(data, 4, 8, 0);
  const EpisodeTrace t = RunEpisode(ic, Sequence("p", recorded), types, {0, 1}, 8, 11);
  for (int s = 0; s < 4; ++s) {
    REQUIRE(t.history[s] == data.episodes.front().history[s]);
  }
  CHECK_THROWS_AS(MakeImitateCommitAgent(data, 8, 8, 0), DomainError);
  CHECK_THROWS_AS(MakeImitateCommitAgent(data, 0, 8, 0), DomainError);
}

TEST_CASE("a point-mass prefix commits to the pure row action") {
  const TypeSpace types = Types2();
  const Dataset data = GenerateDataset(Population{{Sequence("one", {1})}, {1.0}},
                                       TypeDistribution::PointMass({0, 0}), types, 3, 6, 5);
  const AgentSpec ic = MakeImitateCommitAgent(data, 3, 10, 0);
  const EpisodeTrace t = RunEpisode(ic, Sequence("one", {1}), types, {0, 0}, 10, 9);
  for (int s = 3; s < 10; ++s) {
    REQUIRE(t.row_strategies[s] == PureStrategy(2, 1));
    REQUIRE(t.history[s].row == 1);
  }
}

TEST_CASE("commitment draws are reproducible") {
  const TypeSpace types = Types2();
  const Population pop{{AgentSpec{"u", UniformRandomParams{}, 0}}, {1.0}};
  const Dataset data =
      GenerateDataset(pop, TypeDistribution::Uniform(types), types, 200, 8, 21);
  const AgentSpec ic = MakeImitateCommitAgent(data, 4, 12, 0);
  const AgentSpec partner = Sequence("p", {0, 1, 1, 0});
  bool differs = false;
  const EpisodeTrace base = RunEpisode(ic, partner, types, {1, 0}, 12, 100);
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const EpisodeTrace a = RunEpisode(ic, partner, types, {1, 0}, 12, seed);
    const EpisodeTrace b = RunEpisode(ic, partner, types, {1, 0}, 12, seed);
    REQUIRE(a.history == b.history);
    for (int s = 0; s < 12; ++s) REQUIRE(a.row_strategies[s] == b.row_strategies[s]);
    differs = differs || a.history != base.history;
  }
  CHECK(differs);

  std::mt19937_64 r1(5), r2(5);
  History h = {{0, 1}, {1, 0}, {1, 1}, {0, 0}};
  const CommitmentComponent c1 = SampleCommitment(h, 4, Player::kRow, 2, r1);
  const CommitmentComponent c2 = SampleCommitment(h, 4, Player::kRow, 2, r2);
  CHECK(c1.column == c2.column);
  CHECK(c1.strategy == c2.strategy);
}

TEST_CASE("imitation error bound examples") {
  const double expected = 64.0 * 2.0 * 4.0 * std::log(1e6) / 1e6;
  CHECK(ImitationErrorBound(2, 2, 2, 1000000) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ImitationErrorBound(2, 2, 2, 1000000) == doctest::Approx(0.00707).epsilon(1e-3));
  CHECK(ImitationErrorBound(2, 2, 2, 0) == 2.0);
  CHECK(ImitationErrorBound(2, 3, 2, 10) == 3.0);
  CHECK(ImitationErrorBound(2, 2, 2, 1000000000000LL) < 1e-7);
  CHECK(ImitationErrorBoundLogN(2, 2, 2, 1000000) ==
        doctest::Approx(16.0 * 2.0 * 4.0 * std::log(2.0) / 1e6));
  CHECK_THROWS_AS(ImitationErrorBound(0, 2, 2, 10), DomainError);
  double prev = 3.0;
  for (std::int64_t k = 100; k <= 100000000; k *= 10) {
    const double v = ImitationErrorBound(2, 3, 2, k);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
}

TEST_CASE("imitate-then-commit regret bound") {
  CHECK(ImitateCommitRegretBound(0.0, 0.1, 0.0, 1000, 1000) == doctest::Approx(0.1));
  CHECK(ImitateCommitRegretBound(0.05, 0.1, 0.00707, 1000, 100) ==
        doctest::Approx(0.38707).epsilon(1e-12));
  double prev = 1e300;
  for (int tilde = 0; tilde <= 50; ++tilde) {
    const double v = ImitateCommitRegretBound(0.1, 0.2, 0.01, 50, tilde);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("authentication failure examples") {
  CHECK(AuthFailureProbability(2, 3, 64).corrected == 0.0);
  CHECK(AuthFailureProbability(2, 3, 0).corrected == doctest::Approx(0.875));
  CHECK(AuthFailureProbability(2, 3, 32).corrected == doctest::Approx(0.4375));
  const AuthFailure printed = AuthFailureProbability(2, 3, 32);
  CHECK(printed.as_printed == doctest::Approx(1.0 - 0.5 - 0.5 + 32.0 / 512.0));
  CHECK_THROWS_AS(AuthFailureProbability(2, 3, 65), DomainError);
  CHECK_THROWS_AS(AuthFailureProbability(2, 3, -1), DomainError);
}

TEST_CASE("bound report") {
  BoundInputs in;
  in.num_actions = 2;
  in.num_types = 2;
  in.horizon = 1000;
  in.tilde_horizon = 2;
  in.handshake_length = 3;
  in.dataset_size = 1000000;
  in.delta = 0.05;
  in.eps = 0.1;
  in.unique_histories = 32;
  const BoundReport r = MakeBoundReport(in);
  CHECK(r.delta_k == doctest::Approx(ImitationErrorBound(2, 2, 2, 1000000)));
  CHECK(r.delta_k >= 0.0);
  CHECK(r.delta_k <= 2.0);
  CHECK(r.failure_prob_corrected == doctest::Approx(0.4375));
  CHECK(r.regret_bound == doctest::Approx(ImitateCommitRegretBound(0.05, 0.1, r.delta_k, 1000, 2)));
  const nlohmann::json j = nlohmann::json::parse(BoundReportJson(r));
  CHECK(j.contains("delta_K"));
  CHECK(j.contains("ic_regret_bound"));
  for (const auto& [key, value] : j.items()) {
    if (value.is_number()) CHECK(std::isfinite(value.get<double>()));
  }

  BoundInputs derived = in;
  derived.eps = -1.0;
  const BoundReport d = MakeBoundReport(derived);
  CHECK(d.eps_used == doctest::Approx(d.tolerances.eps));
  CHECK(d.eps_used > d.tolerances.eps1);
}

// Exact distribution over (joint type, length-T~ prefix) when the row seat
// is filled by `row` (or by a fresh member of `pop` if row is null) and the
// column seat by a fresh member of `pop`.
std::map<std::vector<int>, double> PrefixDistribution(
    const AgentSpec* row, const Population& pop, const TypeSpace& types,
    const TypeDistribution& mu, int tilde) {
  std::map<std::vector<int>, double> out;
  for (std::size_t j = 0; j < mu.support.size(); ++j) {
    for (std::size_t c = 0; c < pop.members.size(); ++c) {
      const int rows = row ? 1 : static_cast<int>(pop.members.size());
      for (int r = 0; r < rows; ++r) {
        const AgentSpec& rs = row ? *row : pop.members[r];
        const double w = mu.weights[j] * pop.weights[c] * (row ? 1.0 : pop.weights[r]);
        for (const auto& wh :
             EnumerateHistories(rs, pop.members[c], types, mu.support[j], tilde)) {
          std::vector<int> key = {mu.support[j].row, mu.support[j].col};
          for (const Stage& s : wh.history) {
            key.push_back(s.row);
            key.push_back(s.col);
          }
          out[key] += w * wh.probability;
        }
      }
    }
  }
  return out;
}

TEST_CASE("imitation prefix distribution approaches the population's") {
  const TypeSpace types = Types2();
  const Population pop{{AgentSpec{"mw", MwParams{0.5, EtaRule::kStandard}, 0},
                        AgentSpec{"fm", FixedMixedParams{MixedStrategy{{0.3, 0.7}}}, 0},
                        AgentSpec{"u", UniformRandomParams{}, 0}},
                       {0.4, 0.4, 0.2}};
  const TypeDistribution mu = TypeDistribution::Uniform(types);
  constexpr int kTilde = 3;
  const auto target = PrefixDistribution(nullptr, pop, types, mu, kTilde);
  const Dataset full = GenerateDataset(pop, mu, types, 10000, kTilde + 1, 4242);
  double prev_tv = 2.0;
  for (int k : {100, 1000, 10000}) {
    Dataset data = full;
    data.episodes.resize(k);
    const ImitationPolicy policy = FitImitation(data, kTilde);
    // The fitted table as a behavioral agent, so the walk is exact.
    auto table = std::make_shared<FlattenedTable>(2, types.size(), kTilde, Player::kRow);
    for (int type = 0; type < types.size(); ++type) {
      for (int len = 0; len < kTilde; ++len) {
        for (const History& h : AllHistories(2, len)) table->Set(type, h, policy.Lookup(type, h));
      }
    }
    const AgentSpec imitator{"imitation", FlattenedParams{table}, 0};
    const auto rollout = PrefixDistribution(&imitator, pop, types, mu, kTilde);
    double tv = 0.0;
    for (const auto& [key, p] : target) {
      const auto it = rollout.find(key);
      tv += std::abs(p - (it == rollout.end() ? 0.0 : it->second));
    }
    for (const auto& [key, q] : rollout) {
      if (!target.count(key)) tv += q;
    }
    tv *= 0.5;
    MESSAGE("K=" << k << " TV=" << tv);
    CHECK(tv <= ImitationErrorBound(2, kTilde, types.size(), k) + 1e-12);
    CHECK(tv <= prev_tv + 1e-12);
    prev_tv = tv;
  }
  CHECK(prev_tv < 0.05);
}

}  // namespace
}  // namespace cooplab

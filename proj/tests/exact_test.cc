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

#include "cooplab/exact.h"

#include <cmath>

#include "cooplab/errors.h"
#include "cooplab/imitation.h"
#include "doctest.h"
#include "test_util.h"

namespace cooplab {
namespace {

AgentSpec Sequence(std::vector<int> actions) {
  return AgentSpec{"seq", FixedSequenceParams{std::move(actions)}, 0};
}

TEST_CASE("exact values of simple pairs") {
  const TypeSpace pd = testing::Table1b();
  const auto [r, c] = ExactEpisodeValue(Sequence({1}), Sequence({1}), pd, {0, 0}, 3);
  CHECK(r == doctest::Approx(3.0));
  CHECK(c == doctest::Approx(3.0));

  const auto zero = ExactEpisodeValue(Sequence({1}), Sequence({1}), pd, {0, 0}, 0);
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);

  const AgentSpec u{"u", UniformRandomParams{}, 0};
  const auto [ur, uc] = ExactEpisodeValue(u, u, testing::Table1a(), {0, 0}, 1);
  CHECK(ur == doctest::Approx(0.75));
  CHECK(uc == doctest::Approx(0.75));
}

TEST_CASE("enumerated histories form a distribution") {
  const TypeSpace types = LoadTypeSpace(testing::DataPath("games/types2.json"));
  const AgentSpec mw{"mw", MwParams{}, 0};
  const AgentSpec fm{"fm", FixedMixedParams{MixedStrategy{{0.2, 0.8}}}, 0};
  const auto hs = EnumerateHistories(mw, fm, types, {0, 1}, 3);
  CHECK(hs.size() == 64);
  double total = 0.0;
  for (const auto& h : hs) {
    REQUIRE(h.history.size() == 3);
    REQUIRE(h.probability >= 0.0);
    total += h.probability;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // A deterministic pair has a single history.
  CHECK(EnumerateHistories(Sequence({0, 1}), Sequence({1}), types, {0, 0}, 4).size() == 1);
}

TEST_CASE("exact walk limits") {
  const TypeSpace types = testing::Table1a();
  const AgentSpec u{"u", UniformRandomParams{}, 0};
  CHECK_THROWS_AS(ExactEpisodeValue(u, u, types, {0, 0}, 12), CapacityError);

  Dataset data;
  data.meta.num_actions = 2;
  data.meta.horizon = 4;
  const AgentSpec ic = MakeImitateCommitAgent(data, 2, 4, 0);
  CHECK_THROWS_AS(ExactEpisodeValue(ic, u, types, {0, 0}, 4), DomainError);
}

TEST_CASE("exact values agree with Monte Carlo") {
  const TypeSpace types = LoadTypeSpace(testing::DataPath("games/types2.json"));
  std::mt19937_64 rng(808);
  constexpr int kEpisodes = 100000;
  for (int trial = 0; trial < 4; ++trial) {
    const int horizon = 1 + trial;
    auto pick = [&](int which) -> AgentSpec {
      switch (which % 4) {
        case 0: return AgentSpec{"mw", MwParams{0.7, EtaRule::kStandard}, 0};
        case 1: return AgentSpec{"fm", FixedMixedParams{testing::RandomStrategy(2, rng)}, 0};
        case 2: return AgentSpec{"u", UniformRandomParams{}, 0};
        default: return AgentSpec{"g", GrimTriggerParams{0, 1, {0}}, 0};
      }
    };
    const AgentSpec row = pick(trial);
    const AgentSpec col = pick(trial + 1 + static_cast<int>(rng() % 3));
    const JointType joint{trial % 2, (trial / 2) % 2};
    const auto [exact_row, exact_col] = ExactEpisodeValue(row, col, types, joint, horizon);
    const BimatrixGame game = types.Game(joint);
    double sum = 0.0;
    double sum_sq = 0.0;
    double col_sum = 0.0;
    for (int e = 0; e < kEpisodes; ++e) {
      const EpisodeTrace t = RunEpisode(row, col, types, joint, horizon, DeriveSeed(99, e));
      double v = 0.0;
      for (const Stage& s : t.history) {
        v += Payoff(game, s.row, s.col, Player::kRow);
        col_sum += Payoff(game, s.row, s.col, Player::kCol);
      }
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / kEpisodes;
    const double se = std::sqrt(std::max(0.0, sum_sq / kEpisodes - mean * mean) / kEpisodes);
    CAPTURE(row.id);
    CAPTURE(col.id);
    CHECK(std::abs(mean - exact_row) <= 3.0 * se + 1e-12);
    CHECK(std::abs(col_sum / kEpisodes - exact_col) <= 0.02 * horizon);
  }
}

}  // namespace
}  // namespace cooplab

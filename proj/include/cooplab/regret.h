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

#ifndef COOPLAB_REGRET_H_
#define COOPLAB_REGRET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cooplab/game.h"

namespace cooplab {

// Running external regret max_a sum_t [G(a, opp_t) - realized_t], fed one
// stage at a time. `realized` is either the sampled own payoff or, for the
// expected variant, the announced strategy's expected payoff.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(int num_actions)
      : action_totals_(Eigen::VectorXd::Zero(num_actions)) {}

  void Add(const Eigen::VectorXd& action_values, double realized) {
    action_totals_ += action_values;
    realized_total_ += realized;
  }
  double Value() const { return action_totals_.maxCoeff() - realized_total_; }
  const Eigen::VectorXd& action_totals() const { return action_totals_; }
  double realized_total() const { return realized_total_; }

 private:
  Eigen::VectorXd action_totals_;
  double realized_total_ = 0.0;
};

// R^ext over the full history; 0 for the empty history.
double ExternalRegret(const History& history, const BimatrixGame& game,
                      Player player);

// Expected external regret over stages [0, up_to): the player's own sampled
// action is replaced by its announced strategy, the opponent's stays
// sampled. Throws DataError when strategy records are missing.
double ExpectedExternalRegret(const EpisodeTrace& trace, const BimatrixGame& game,
                              Player player, int up_to);
double ExpectedExternalRegret(const EpisodeTrace& trace, const BimatrixGame& game,
                              Player player);

// Running expected regret after each stage (entry t covers stages 0..t).
std::vector<double> ExpectedRegretPath(const EpisodeTrace& trace,
                                       const BimatrixGame& game, Player player);

// Total altruistic regret: T * tau_partner - sum_t partner payoff, with tau
// the partner's worst PONE value in `joint_game`. May be negative.
double AltruisticRegret(const History& history, const BimatrixGame& joint_game,
                        Player partner);
double AltruisticRegret(const History& history, const BimatrixGame& joint_game,
                        Player partner, double tau);

struct AzumaBounds {
  double expected_bound = 0.0;  // sqrt(2 T ln(2 / delta))
  double realized_bound = 0.0;  // 2 sqrt(2 T ln(4 / delta))
  double relation_slack = 0.0;  // sqrt((T / 2) ln(1 / delta))
};

AzumaBounds AzumaThresholds(int horizon, double delta);

struct RegretReport {
  std::int64_t episode_id = 0;
  std::uint64_t seed = 0;
  std::string theta1;
  std::string theta2;
  int horizon = 0;
  double external_row = 0.0;
  double external_col = 0.0;
  double expected_external_row = 0.0;
  double expected_external_col = 0.0;
  double altruistic = 0.0;  // total, with the column player as partner
  std::vector<double> running_expected_row;
  std::vector<double> running_expected_col;

  double altruistic_average() const {
    return horizon > 0 ? altruistic / horizon : 0.0;
  }
};

// Regret bundle for one episode. `partner` selects whose altruistic regret
// is reported; `tau` may be supplied to skip the PONE solve.
RegretReport MakeRegretReport(const EpisodeTrace& trace, const TypeSpace& types,
                              std::int64_t episode_id, Player partner = Player::kCol);
RegretReport MakeRegretReport(const EpisodeTrace& trace, const BimatrixGame& game,
                              const std::string& theta1, const std::string& theta2,
                              std::int64_t episode_id, Player partner,
                              double tau);

std::string RegretCsvHeader();
std::string RegretCsvRow(const RegretReport& report);

}  // namespace cooplab

#endif  // COOPLAB_REGRET_H_

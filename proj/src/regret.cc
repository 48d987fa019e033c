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

#include "cooplab/regret.h"

#include <cmath>
#include <sstream>

#include "cooplab/equilibria.h"

namespace cooplab {
namespace {

// Column of the player's own-view matrix for the opponent's action: the
// payoff of every own action against it.
Eigen::VectorXd ValuesAgainst(const BimatrixGame& game, Player player,
                              int opp_action) {
  return player == Player::kRow
             ? Eigen::VectorXd(game.row_payoffs().col(opp_action))
             : Eigen::VectorXd(game.col_payoffs().row(opp_action).transpose());
}

}  // namespace

double ExternalRegret(const History& history, const BimatrixGame& game,
                      Player player) {
  CheckHistory(history, game.num_actions());
  if (history.empty()) return 0.0;
  RegretAccumulator acc(game.num_actions());
  for (const Stage& s : history) {
    const Eigen::VectorXd v = ValuesAgainst(game, player, s.of(Opponent(player)));
    acc.Add(v, v(s.of(player)));
  }
  return acc.Value();
}

std::vector<double> ExpectedRegretPath(const EpisodeTrace& trace,
                                       const BimatrixGame& game, Player player) {
  const auto& strategies = trace.strategies(player);
  if (strategies.size() < trace.history.size()) {
    throw DataError("trace is missing announced strategies");
  }
  RegretAccumulator acc(game.num_actions());
  std::vector<double> path;
  path.reserve(trace.history.size());
  for (size_t t = 0; t < trace.history.size(); ++t) {
    const Eigen::VectorXd v =
        ValuesAgainst(game, player, trace.history[t].of(Opponent(player)));
    if (strategies[t].size() != v.size()) {
      throw DataError("announced strategy has wrong length");
    }
    acc.Add(v, strategies[t].dot(v));
    path.push_back(acc.Value());
  }
  return path;
}

double ExpectedExternalRegret(const EpisodeTrace& trace, const BimatrixGame& game,
                              Player player, int up_to) {
  if (up_to < 0 || up_to > trace.length()) {
    throw DataError("up_to exceeds the recorded stages");
  }
  const auto& strategies = trace.strategies(player);
  if (static_cast<int>(strategies.size()) < up_to) {
    throw DataError("trace is missing announced strategies");
  }
  if (up_to == 0) return 0.0;
  RegretAccumulator acc(game.num_actions());
  for (int t = 0; t < up_to; ++t) {
    const Eigen::VectorXd v =
        ValuesAgainst(game, player, trace.history[t].of(Opponent(player)));
    acc.Add(v, strategies[t].dot(v));
  }
  return acc.Value();
}

double ExpectedExternalRegret(const EpisodeTrace& trace, const BimatrixGame& game,
                              Player player) {
  return ExpectedExternalRegret(trace, game, player, trace.length());
}

double AltruisticRegret(const History& history, const BimatrixGame& joint_game,
                        Player partner, double tau) {
  CheckHistory(history, joint_game.num_actions());
  double realized = 0.0;
  for (const Stage& s : history) realized += Payoff(joint_game, s.row, s.col, partner);
  return static_cast<double>(history.size()) * tau - realized;
}

double AltruisticRegret(const History& history, const BimatrixGame& joint_game,
                        Player partner) {
  return AltruisticRegret(history, joint_game, partner,
                          WorstPonePayoff(joint_game, partner));
}

AzumaBounds AzumaThresholds(int horizon, double delta) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
  const double t = horizon;
  return {std::sqrt(2.0 * t * std::log(2.0 / delta)),
          2.0 * std::sqrt(2.0 * t * std::log(4.0 / delta)),
          std::sqrt(t / 2.0 * std::log(1.0 / delta))};
}

RegretReport MakeRegretReport(const EpisodeTrace& trace, const BimatrixGame& game,
                              const std::string& theta1, const std::string& theta2,
                              std::int64_t episode_id, Player partner,
                              double tau) {
  RegretReport r;
  r.episode_id = episode_id;
  r.seed = trace.seed;
  r.theta1 = theta1;
  r.theta2 = theta2;
  r.horizon = trace.length();
  r.external_row = ExternalRegret(trace.history, game, Player::kRow);
  r.external_col = ExternalRegret(trace.history, game, Player::kCol);
  r.running_expected_row = ExpectedRegretPath(trace, game, Player::kRow);
  r.running_expected_col = ExpectedRegretPath(trace, game, Player::kCol);
  r.expected_external_row =
      r.running_expected_row.empty() ? 0.0 : r.running_expected_row.back();
  r.expected_external_col =
      r.running_expected_col.empty() ? 0.0 : r.running_expected_col.back();
  r.altruistic = std::isnan(tau) ? tau
                                 : AltruisticRegret(trace.history, game, partner, tau);
  return r;
}

RegretReport MakeRegretReport(const EpisodeTrace& trace, const TypeSpace& types,
                              std::int64_t episode_id, Player partner) {
  const BimatrixGame game = types.Game(trace.joint_type);
  return MakeRegretReport(trace, game, types.name(trace.joint_type.row),
                          types.name(trace.joint_type.col), episode_id, partner,
                          WorstPonePayoff(game, partner));
}

std::string RegretCsvHeader() {
  return "episode_id,seed,theta1,theta2,R_ext_row,R_ext_col,Rbar_row,Rbar_col,"
         "R_alt,T";
}

std::string RegretCsvRow(const RegretReport& r) {
  std::ostringstream out;
  out << r.episode_id << ',' << r.seed << ',' << r.theta1 << ',' << r.theta2
      << ',' << FormatDouble(r.external_row) << ','
      << FormatDouble(r.external_col) << ','
      << FormatDouble(r.expected_external_row) << ','
      << FormatDouble(r.expected_external_col) << ','
      << FormatDouble(r.altruistic) << ',' << r.horizon;
  return out.str();
}

}  // namespace cooplab

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
#include <string>

namespace cooplab {

namespace {

struct Walker {
  AgentSpec row;
  AgentSpec col;
  const TypeSpace* types;
  BimatrixGame game;
  int horizon;
  std::vector<WeightedHistory>* leaves = nullptr;
  double value_row = 0.0;
  double value_col = 0.0;
  History history;

  void Walk(const AgentState& rs, const AgentState& cs, double prob) {
    const int t = static_cast<int>(history.size());
    if (t == horizon) {
      if (leaves) leaves->push_back({history, prob});
      return;
    }
    const MixedStrategy sr = Act(row, rs, history);
    const MixedStrategy sc = Act(col, cs, history);
    value_row += prob * ExpectedPayoff(sr, sc, game, Player::kRow);
    value_col += prob * ExpectedPayoff(sr, sc, game, Player::kCol);
    if (!leaves && t + 1 == horizon) return;
    const int n = game.num_actions();
    for (int a = 0; a < n; ++a) {
      if (sr(a) <= 0.0) continue;
      for (int b = 0; b < n; ++b) {
        if (sc(b) <= 0.0) continue;
        history.push_back({a, b});
        Walk(Observe(row, rs, a, b), Observe(col, cs, b, a), prob * sr(a) * sc(b));
        history.pop_back();
      }
    }
  }
};

Walker MakeWalker(const AgentSpec& row, const AgentSpec& col,
                  const TypeSpace& types, JointType joint, int horizon) {
  if (horizon < 0) throw DomainError("horizon must be non-negative");
  if (!IsBehavioral(row) || !IsBehavioral(col)) {
    throw DomainError("exact evaluation needs behavioral agents; agent '" +
                      (IsBehavioral(row) ? col.id : row.id) +
                      "' uses private randomness");
  }
  const double leaves = std::pow(static_cast<double>(types.num_actions()), 2.0 * horizon);
  if (leaves > kMaxExactLeaves) {
    throw CapacityError("history tree has " + FormatDouble(leaves) +
                        " leaves; use Monte-Carlo estimation for this horizon");
  }
  Walker w{row, col, &types, types.Game(joint), horizon, nullptr, 0.0, 0.0, {}};
  w.row.own_type = joint.row;
  w.col.own_type = joint.col;
  return w;
}

}  // namespace

std::vector<WeightedHistory> EnumerateHistories(const AgentSpec& row,
                                                const AgentSpec& col,
                                                const TypeSpace& types,
                                                JointType joint, int horizon) {
  Walker w = MakeWalker(row, col, types, joint, horizon);
  std::vector<WeightedHistory> leaves;
  w.leaves = &leaves;
  w.Walk(InitialState(w.row, types, Player::kRow, horizon, 1),
         InitialState(w.col, types, Player::kCol, horizon, 2), 1.0);
  return leaves;
}

std::pair<double, double> ExactEpisodeValue(const AgentSpec& row,
                                            const AgentSpec& col,
                                            const TypeSpace& types,
                                            JointType joint, int horizon) {
  Walker w = MakeWalker(row, col, types, joint, horizon);
  if (horizon == 0) return {0.0, 0.0};
  w.Walk(InitialState(w.row, types, Player::kRow, horizon, 1),
         InitialState(w.col, types, Player::kCol, horizon, 2), 1.0);
  return {w.value_row, w.value_col};
}

}  // namespace cooplab

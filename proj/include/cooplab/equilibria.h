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

#ifndef COOPLAB_EQUILIBRIA_H_
#define COOPLAB_EQUILIBRIA_H_

#include <vector>

#include "cooplab/game.h"

namespace cooplab {

inline constexpr int kMaxNashActions = 5;
inline constexpr double kNashTolerance = 1e-9;

struct EquilibriumProfile {
  MixedStrategy sigma_row;
  MixedStrategy sigma_col;
  double value_row = 0.0;
  double value_col = 0.0;

  double value(Player p) const {
    return p == Player::kRow ? value_row : value_col;
  }
  const MixedStrategy& strategy(Player p) const {
    return p == Player::kRow ? sigma_row : sigma_col;
  }
};

struct BestResponseResult {
  std::vector<int> actions;  // ascending
  double value = 0.0;
};

struct NashEnumeration {
  std::vector<EquilibriumProfile> profiles;
  // Set when some support pair produced a singular indifference system and
  // was skipped; the list then holds only the equilibria that were found.
  bool degenerate = false;
};

// Pareto-optimal Nash equilibria P(G).
struct PoneSet {
  std::vector<EquilibriumProfile> profiles;
};

// All actions within kProbTolerance of the best expected payoff against the
// opponent's mixed strategy.
BestResponseResult BestResponse(const BimatrixGame& game,
                                const MixedStrategy& opponent, Player player);

// Largest gain any pure deviation offers `player` at the profile.
double MaxDeviationGain(const BimatrixGame& game, const MixedStrategy& sigma_row,
                        const MixedStrategy& sigma_col, Player player);

bool IsNash(const BimatrixGame& game, const MixedStrategy& sigma_row,
            const MixedStrategy& sigma_col, double eps = kNashTolerance);

EquilibriumProfile MakeProfile(const BimatrixGame& game, MixedStrategy sigma_row,
                               MixedStrategy sigma_col);

// Support enumeration over equal-size support pairs, in canonical order
// (support size, then row mask, then column mask). Throws CapacityError
// when the game has more than kMaxNashActions actions.
NashEnumeration EnumerateNash(const BimatrixGame& game);

// True when `a` gives both players strictly more than `b`.
bool StronglyDominates(const EquilibriumProfile& a, const EquilibriumProfile& b,
                       double tol = kNashTolerance);

// Keeps the candidates that no other candidate strongly dominates.
PoneSet ParetoFilter(const std::vector<EquilibriumProfile>& candidates);
PoneSet ParetoOptimalNash(const BimatrixGame& game);

// tau: the player's lowest value over the PONE set.
double WorstPonePayoff(const PoneSet& pone, Player player);
double WorstPonePayoff(const BimatrixGame& game, Player player);

bool SameProfile(const EquilibriumProfile& a, const EquilibriumProfile& b,
                 double tol = kNashTolerance);

}  // namespace cooplab

#endif  // COOPLAB_EQUILIBRIA_H_

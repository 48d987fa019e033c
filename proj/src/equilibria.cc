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

#include "cooplab/equilibria.h"

#include <algorithm>
#include <bit>
#include <limits>

namespace cooplab {
namespace {

// Payoffs of `player`'s pure actions against the opponent's strategy.
Eigen::VectorXd ActionValues(const BimatrixGame& game,
                             const MixedStrategy& opponent, Player player) {
  if (opponent.size() != game.num_actions()) {
    throw ShapeError("strategy length does not match the game");
  }
  return player == Player::kRow
             ? Eigen::VectorXd(game.row_payoffs() * opponent)
             : Eigen::VectorXd(game.col_payoffs().transpose() * opponent);
}

std::vector<int> MaskToIndices(unsigned mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1u) out.push_back(i);
  }
  return out;
}

// Solves for the opponent strategy on `theirs` making `values` (an N x N
// matrix indexed (own action, opponent action)) constant over `own`.
// Returns false when the system is singular.
bool SolveIndifference(const Eigen::MatrixXd& values, const std::vector<int>& own,
                       const std::vector<int>& theirs, MixedStrategy* out,
                       double* level) {
  const int s = static_cast<int>(own.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) sys(r, c) = values(own[r], theirs[c]);
    sys(r, s) = -1.0;
  }
  for (int c = 0; c < s; ++c) sys(s, c) = 1.0;
  rhs(s) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  *out = MixedStrategy::Zero(values.cols());
  for (int c = 0; c < s; ++c) (*out)(theirs[c]) = sol(c);
  *level = sol(s);
  return true;
}

bool CleanDistribution(MixedStrategy* p) {
  for (Eigen::Index i = 0; i < p->size(); ++i) {
    if ((*p)(i) < -kNashTolerance) return false;
    if ((*p)(i) < 0.0) (*p)(i) = 0.0;
  }
  const double sum = p->sum();
  if (!(sum > 0.0)) return false;
  *p /= sum;
  return true;
}

}  // namespace

BestResponseResult BestResponse(const BimatrixGame& game,
                                const MixedStrategy& opponent, Player player) {
  const Eigen::VectorXd v = ActionValues(game, opponent, player);
  BestResponseResult out;
  out.value = v.maxCoeff();
  for (int a = 0; a < v.size(); ++a) {
    if (v(a) >= out.value - kProbTolerance) out.actions.push_back(a);
  }
  return out;
}

double MaxDeviationGain(const BimatrixGame& game, const MixedStrategy& sigma_row,
                        const MixedStrategy& sigma_col, Player player) {
  const MixedStrategy& own = player == Player::kRow ? sigma_row : sigma_col;
  const MixedStrategy& opp = player == Player::kRow ? sigma_col : sigma_row;
  const Eigen::VectorXd v = ActionValues(game, opp, player);
  return v.maxCoeff() - own.dot(v);
}

bool IsNash(const BimatrixGame& game, const MixedStrategy& sigma_row,
            const MixedStrategy& sigma_col, double eps) {
  return MaxDeviationGain(game, sigma_row, sigma_col, Player::kRow) <= eps &&
         MaxDeviationGain(game, sigma_row, sigma_col, Player::kCol) <= eps;
}

EquilibriumProfile MakeProfile(const BimatrixGame& game, MixedStrategy sigma_row,
                               MixedStrategy sigma_col) {
  EquilibriumProfile p;
  p.value_row = ExpectedPayoff(sigma_row, sigma_col, game, Player::kRow);
  p.value_col = ExpectedPayoff(sigma_row, sigma_col, game, Player::kCol);
  p.sigma_row = std::move(sigma_row);
  p.sigma_col = std::move(sigma_col);
  return p;
}

bool SameProfile(const EquilibriumProfile& a, const EquilibriumProfile& b,
                 double tol) {
  return (a.sigma_row - b.sigma_row).lpNorm<Eigen::Infinity>() <= tol &&
         (a.sigma_col - b.sigma_col).lpNorm<Eigen::Infinity>() <= tol;
}

NashEnumeration EnumerateNash(const BimatrixGame& game) {
  const int n = game.num_actions();
  if (n > kMaxNashActions) {
    throw CapacityError("support enumeration is capped at " +
                        std::to_string(kMaxNashActions) + " actions");
  }
  const Eigen::MatrixXd& a = game.row_payoffs();
  const Eigen::MatrixXd b_own = game.col_payoffs().transpose();

  NashEnumeration result;
  const unsigned full = (1u << n) - 1u;
  for (int size = 1; size <= n; ++size) {
    for (unsigned rmask = 1; rmask <= full; ++rmask) {
      if (std::popcount(rmask) != size) continue;
      const std::vector<int> rows = MaskToIndices(rmask);
      for (unsigned cmask = 1; cmask <= full; ++cmask) {
        if (std::popcount(cmask) != size) continue;
        const std::vector<int> cols = MaskToIndices(cmask);
        MixedStrategy y, x;
        double v = 0.0, u = 0.0;
        // y makes the row player indifferent on `rows`; x does the same for
        // the column player on `cols`.
        if (!SolveIndifference(a, rows, cols, &y, &v) ||
            !SolveIndifference(b_own, cols, rows, &x, &u)) {
          result.degenerate = true;
          continue;
        }
        if (!CleanDistribution(&x) || !CleanDistribution(&y)) continue;
        if (!IsNash(game, x, y)) continue;
        EquilibriumProfile p = MakeProfile(game, std::move(x), std::move(y));
        const bool dup = std::any_of(
            result.profiles.begin(), result.profiles.end(),
            [&](const EquilibriumProfile& q) { return SameProfile(p, q); });
        if (!dup) result.profiles.push_back(std::move(p));
      }
    }
  }
  return result;
}

bool StronglyDominates(const EquilibriumProfile& a, const EquilibriumProfile& b,
                       double tol) {
  return a.value_row > b.value_row + tol && a.value_col > b.value_col + tol;
}

PoneSet ParetoFilter(const std::vector<EquilibriumProfile>& candidates) {
  PoneSet out;
  for (const auto& p : candidates) {
    const bool dominated =
        std::any_of(candidates.begin(), candidates.end(),
                    [&](const EquilibriumProfile& q) {
                      return StronglyDominates(q, p);
                    });
    if (!dominated) out.profiles.push_back(p);
  }
  return out;
}

PoneSet ParetoOptimalNash(const BimatrixGame& game) {
  return ParetoFilter(EnumerateNash(game).profiles);
}

double WorstPonePayoff(const PoneSet& pone, Player player) {
  if (pone.profiles.empty()) throw InvariantError("PONE set is empty");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : pone.profiles) worst = std::min(worst, p.value(player));
  return worst;
}

double WorstPonePayoff(const BimatrixGame& game, Player player) {
  return WorstPonePayoff(ParetoOptimalNash(game), player);
}

}  // namespace cooplab

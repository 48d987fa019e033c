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

#ifndef COOPLAB_GAME_H_
#define COOPLAB_GAME_H_

// Core game model: bimatrix games over private types, mixed and joint
// strategies, histories and payoff arithmetic.
//
// Matrices follow the bimatrix convention: entry (i, j) belongs to the
// profile where the row player picks i and the column player picks j. A
// type's own payoff matrix G(theta) is stored "own action x opponent action",
// so the column player's bimatrix entry is the transpose of its own matrix.

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cooplab/errors.h"

namespace cooplab {

inline constexpr double kProbTolerance = 1e-12;
inline constexpr double kPayoffTolerance = 1e-9;

enum class Player { kRow = 0, kCol = 1 };

constexpr Player Opponent(Player p) {
  return p == Player::kRow ? Player::kCol : Player::kRow;
}
std::string PlayerName(Player p);
Player ParsePlayer(const std::string& name);

// Type indices into a TypeSpace; row == theta_1, col == theta_2.
struct JointType {
  int row = 0;
  int col = 0;
  int of(Player p) const { return p == Player::kRow ? row : col; }
  auto operator<=>(const JointType&) const = default;
};

template <typename Scalar>
using StrategyVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using PayoffMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Distribution over N actions.
using MixedStrategy = StrategyVector<double>;
// Distribution over N x N joint actions; entry (i, j) = Pr[row i, col j].
using JointStrategy = PayoffMatrix<double>;

template <typename Derived>
bool IsDistribution(const Eigen::DenseBase<Derived>& p,
                    double tol = kProbTolerance) {
  if (p.size() == 0) return false;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = static_cast<double>(p(i, j));
      if (!std::isfinite(v) || v < -tol) return false;
    }
  }
  return std::abs(static_cast<double>(p.sum()) - 1.0) <= tol;
}

template <typename Derived>
void CheckDistribution(const Eigen::DenseBase<Derived>& p,
                       const char* what = "strategy") {
  if (!IsDistribution(p)) {
    throw DomainError(std::string(what) + " is not a probability distribution");
  }
}

inline MixedStrategy UniformStrategy(int n) {
  return MixedStrategy::Constant(n, 1.0 / n);
}

inline MixedStrategy PureStrategy(int n, int action) {
  if (action < 0 || action >= n) throw RangeError("action out of range");
  MixedStrategy s = MixedStrategy::Zero(n);
  s(action) = 1.0;
  return s;
}

// The stage game G(theta) = [G(theta_1), G(theta_2)^T] for one joint type.
template <typename Scalar>
class BasicBimatrixGame {
 public:
  using Matrix = PayoffMatrix<Scalar>;

  BasicBimatrixGame(Matrix row_payoffs, Matrix col_payoffs,
                    JointType joint_type = {})
      : row_(std::move(row_payoffs)),
        col_(std::move(col_payoffs)),
        joint_type_(joint_type) {
    if (row_.rows() == 0 || row_.rows() != row_.cols() ||
        col_.rows() != row_.rows() || col_.cols() != row_.cols()) {
      throw ShapeError("bimatrix game needs two N x N payoff matrices");
    }
  }

  int num_actions() const { return static_cast<int>(row_.rows()); }
  const Matrix& row_payoffs() const { return row_; }
  const Matrix& col_payoffs() const { return col_; }
  const Matrix& payoffs(Player p) const {
    return p == Player::kRow ? row_ : col_;
  }
  JointType joint_type() const { return joint_type_; }

  // Payoff matrix of player p indexed (own action, opponent action).
  Matrix OwnView(Player p) const {
    return p == Player::kRow ? row_ : Matrix(col_.transpose());
  }

 private:
  Matrix row_;
  Matrix col_;
  JointType joint_type_;
};

using BimatrixGame = BasicBimatrixGame<double>;

template <typename Scalar>
Scalar Payoff(const BasicBimatrixGame<Scalar>& game, int a_row, int a_col,
              Player player) {
  const int n = game.num_actions();
  if (a_row < 0 || a_row >= n || a_col < 0 || a_col >= n) {
    throw RangeError("action out of range");
  }
  return game.payoffs(player)(a_row, a_col);
}

// sigma_row^T G sigma_col for the given player's matrix.
template <typename Scalar, typename DerivedRow, typename DerivedCol>
Scalar ExpectedPayoff(const Eigen::MatrixBase<DerivedRow>& sigma_row,
                      const Eigen::MatrixBase<DerivedCol>& sigma_col,
                      const BasicBimatrixGame<Scalar>& game, Player player) {
  const int n = game.num_actions();
  if (sigma_row.size() != n || sigma_col.size() != n) {
    throw ShapeError("strategy length does not match the game");
  }
  return (sigma_row.transpose().template cast<Scalar>() *
          game.payoffs(player) * sigma_col.template cast<Scalar>())
      .value();
}

// sum_ij z_ij G_ij: the player's expected payoff under a joint strategy.
template <typename Scalar, typename Derived>
Scalar JointPayoff(const Eigen::MatrixBase<Derived>& z,
                   const BasicBimatrixGame<Scalar>& game, Player player) {
  if (z.rows() != game.num_actions() || z.cols() != game.num_actions()) {
    throw ShapeError("joint strategy shape does not match the game");
  }
  return game.payoffs(player).cwiseProduct(z.template cast<Scalar>()).sum();
}

// Affine map (x - min) / (max - min) into [0, 1]; constant -> zeros.
template <typename Derived>
typename Derived::PlainObject NormalizePayoffs(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Scalar lo = m.minCoeff();
  const Scalar hi = m.maxCoeff();
  if (!(hi > lo)) return Derived::PlainObject::Zero(m.rows(), m.cols());
  return ((m.array() - lo) / (hi - lo)).matrix();
}

// Per-player affine rescale; best-response sets are unchanged.
template <typename Scalar>
BasicBimatrixGame<Scalar> NormalizeGame(const BasicBimatrixGame<Scalar>& g) {
  return BasicBimatrixGame<Scalar>(NormalizePayoffs(g.row_payoffs()),
                                   NormalizePayoffs(g.col_payoffs()),
                                   g.joint_type());
}

struct Stage {
  int row = 0;
  int col = 0;
  int of(Player p) const { return p == Player::kRow ? row : col; }
  bool operator==(const Stage&) const = default;
};

// Ordered stage actions h_t; h_0 is the empty vector.
using History = std::vector<Stage>;

// Throws RangeError unless every action lies in [0, num_actions).
void CheckHistory(const History& history, int num_actions);

// Finite type space Theta with each type's own payoff matrix.
class TypeSpace {
 public:
  TypeSpace(int num_actions, std::vector<std::string> names,
            std::vector<Eigen::MatrixXd> payoffs,
            std::vector<std::string> action_names = {});

  int num_actions() const { return num_actions_; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int type) const;
  const std::vector<std::string>& action_names() const { return actions_; }
  // G(theta) indexed (own action, opponent action).
  const Eigen::MatrixXd& payoffs(int type) const;
  int Index(const std::string& name) const;

  BimatrixGame Game(JointType joint) const;
  std::vector<JointType> JointTypes() const;

  // Each type matrix rescaled into [0, 1] independently.
  TypeSpace Normalized() const;

  // FNV-1a over a canonical rendering; identifies the space in datasets.
  std::uint64_t Hash() const;

 private:
  int num_actions_;
  std::vector<std::string> names_;
  std::vector<Eigen::MatrixXd> payoffs_;
  std::vector<std::string> actions_;
};

// JSON game file: {"num_actions", "types": [...], "payoffs": {type: rows}}
// plus optional "action_names".
TypeSpace LoadTypeSpace(const std::string& path);
TypeSpace ParseTypeSpace(const std::string& text);
std::string SerializeTypeSpace(const TypeSpace& types);

// Full record of one T-stage interaction.
struct EpisodeTrace {
  History history;
  std::vector<MixedStrategy> row_strategies;
  std::vector<MixedStrategy> col_strategies;
  // Protocol phase per stage (-1 for agents without phases).
  std::vector<int> row_phases;
  std::vector<int> col_phases;
  JointType joint_type;
  std::uint64_t seed = 0;
  std::string row_agent;
  std::string col_agent;

  int length() const { return static_cast<int>(history.size()); }
  const std::vector<MixedStrategy>& strategies(Player p) const {
    return p == Player::kRow ? row_strategies : col_strategies;
  }
};

// Throws DataError if strategy records are missing or a sampled action has
// zero probability under its announced strategy.
void CheckTrace(const EpisodeTrace& trace, int num_actions);

std::uint64_t Fnv1a(const std::string& bytes);
std::string FormatDouble(double v);

}  // namespace cooplab

#endif  // COOPLAB_GAME_H_

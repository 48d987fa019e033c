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

#ifndef COOPLAB_IMITATION_H_
#define COOPLAB_IMITATION_H_

// Imitate-then-commit learner: tabular imitation of one seat from a dataset,
// the commitment mixture built from an empirical joint strategy, and the
// sample-complexity formulas that accompany it.

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cooplab/agents.h"
#include "cooplab/game.h"
#include "cooplab/population.h"

namespace cooplab {

// Empirical action frequencies of one seat, keyed by (own type, history
// prefix). Absent keys read as the uniform strategy.
class ImitationPolicy {
 public:
  using Key = std::pair<int, std::vector<int>>;  // (type, flattened prefix)

  ImitationPolicy(int num_actions, int tilde_horizon, Player seat);

  int num_actions() const { return num_actions_; }
  int tilde_horizon() const { return tilde_horizon_; }
  Player seat() const { return seat_; }
  bool empty() const { return counts_.empty(); }

  // Counts `action` at the prefix history[0, t).
  void Add(int type, const History& history, int t, int action);

  // Strategy at the prefix history[0, t) with t = history.size().
  MixedStrategy Lookup(int type, const History& history) const;
  int Visits(int type, const History& history) const;

  const std::map<Key, Eigen::VectorXd>& counts() const { return counts_; }

  static Key MakeKey(int type, const History& history, int t);

 private:
  int num_actions_;
  int tilde_horizon_;
  Player seat_;
  std::map<Key, Eigen::VectorXd> counts_;
};

// Counts the seat's actions at every prefix shorter than tilde_horizon.
// An empty dataset yields the all-uniform policy (ImitationPolicy::empty()).
ImitationPolicy FitImitation(const Dataset& data, int tilde_horizon,
                             Player seat = Player::kRow);

// z_ij = #{t < up_to : (a_row, a_col) = (i, j)} / up_to.
JointStrategy EmpiricalJoint(const History& history, int up_to, int num_actions);

inline constexpr double kMixtureDropTolerance = 1e-12;

struct CommitmentComponent {
  MixedStrategy strategy;  // x_j(i) = z_ij / z_j
  double probability = 0.0;  // z_j
  int column = 0;
};

// nu: commit to x_j with probability z_j, for every column with z_j > 0.
struct CommitmentMixture {
  std::vector<CommitmentComponent> components;
  JointStrategy source;
};

// For a joint strategy in which the committing player is the row player.
CommitmentMixture MixtureFromJoint(const JointStrategy& z);

// Partition reply r_z: the column strategy y_P(j) = z_j / sum_{l in P} z_l on
// the group P of columns sharing the queried component's conditional.
MixedStrategy ResponseFunction(const CommitmentMixture& mixture,
                               int component_index);
MixedStrategy ResponseFunction(const JointStrategy& z, int component_index);

// Draws a component of the mixture built from the first `prefix_length`
// stages, seen from `seat` (the committing player).
CommitmentComponent SampleCommitment(const History& history, int prefix_length,
                                     Player seat, int num_actions,
                                     std::mt19937_64& rng);

// Imitation for stages [0, tilde_horizon), then a single commitment drawn
// from the mixture of the realized prefix. Requires tilde_horizon < horizon.
AgentSpec MakeImitateCommitAgent(const Dataset& data, int tilde_horizon,
                                 int horizon, int own_type,
                                 Player seat = Player::kRow);

// Imitation error bound min{T~, N^(2(T~+1)) |Theta| T~^2 ln(K) / K}; K = 0
// returns T~.
double ImitationErrorBound(int num_actions, int tilde_horizon, int num_types,
                           std::int64_t dataset_size);
// Variant min{T~, N^(2 T~) |Theta| T~^2 ln(N) / K} appearing in the
// derivation of the bound above.
double ImitationErrorBoundLogN(int num_actions, int tilde_horizon, int num_types,
                               std::int64_t dataset_size);

// 2 delta + delta_K + (2 (T - T~) / T + 1) eps.
double ImitateCommitRegretBound(double delta, double eps, double delta_k,
                                int horizon, int tilde_horizon);

struct AuthFailure {
  double corrected = 0.0;   // (1 - 1/N^k)(1 - M/N^(2k))
  double as_printed = 0.0;  // 1 - M/N^(2k) - 1/N + M/N^(3k)
};

AuthFailure AuthFailureProbability(int num_actions, int handshake_length,
                                   std::int64_t unique_histories);

struct BoundInputs {
  int num_actions = 2;
  int num_types = 2;
  int horizon = 40;
  int tilde_horizon = 10;
  int handshake_length = 1;
  std::int64_t dataset_size = 0;
  double delta = 0.1;
  // Negative: take eps from ComputeProtocolTolerances.
  double eps = -1.0;
  std::int64_t unique_histories = 0;
};

struct BoundReport {
  BoundInputs inputs;
  double delta_k = 0.0;
  double delta_k_log_n = 0.0;
  double regret_bound = 0.0;
  double failure_prob_corrected = 0.0;
  double failure_prob_as_printed = 0.0;
  ProtocolTolerances tolerances;
  double eps_used = 0.0;
};

BoundReport MakeBoundReport(const BoundInputs& inputs);
std::string BoundReportJson(const BoundReport& report);

}  // namespace cooplab

#endif  // COOPLAB_IMITATION_H_

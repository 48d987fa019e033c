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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace cooplab {

ImitationPolicy::ImitationPolicy(int num_actions, int tilde_horizon, Player seat)
    : num_actions_(num_actions), tilde_horizon_(tilde_horizon), seat_(seat) {
  if (num_actions < 1) throw DomainError("num_actions must be positive");
  if (tilde_horizon < 0) throw DomainError("imitation horizon must be >= 0");
}

ImitationPolicy::Key ImitationPolicy::MakeKey(int type, const History& history,
                                              int t) {
  Key key{type, {}};
  key.second.reserve(2 * t);
  for (int s = 0; s < t; ++s) {
    key.second.push_back(history[s].row);
    key.second.push_back(history[s].col);
  }
  return key;
}

void ImitationPolicy::Add(int type, const History& history, int t, int action) {
  if (action < 0 || action >= num_actions_) throw RangeError("action out of range");
  auto [it, inserted] = counts_.try_emplace(MakeKey(type, history, t));
  if (inserted) it->second = Eigen::VectorXd::Zero(num_actions_);
  it->second(action) += 1.0;
}

MixedStrategy ImitationPolicy::Lookup(int type, const History& history) const {
  const auto it =
      counts_.find(MakeKey(type, history, static_cast<int>(history.size())));
  if (it == counts_.end()) return UniformStrategy(num_actions_);
  return it->second / it->second.sum();
}

int ImitationPolicy::Visits(int type, const History& history) const {
  const auto it =
      counts_.find(MakeKey(type, history, static_cast<int>(history.size())));
  return it == counts_.end() ? 0 : static_cast<int>(it->second.sum());
}

ImitationPolicy FitImitation(const Dataset& data, int tilde_horizon, Player seat) {
  if (tilde_horizon > data.meta.horizon) {
    throw DomainError("imitation horizon exceeds the dataset horizon");
  }
  ImitationPolicy policy(data.meta.num_actions, tilde_horizon, seat);
  for (const auto& rec : data.episodes) {
    const int type = rec.types.of(seat);
    for (int t = 0; t < tilde_horizon; ++t) {
      policy.Add(type, rec.history, t, rec.history[t].of(seat));
    }
  }
  return policy;
}

JointStrategy EmpiricalJoint(const History& history, int up_to, int num_actions) {
  if (up_to < 1) throw DomainError("empirical joint strategy needs up_to >= 1");
  if (up_to > static_cast<int>(history.size())) {
    throw DomainError("up_to exceeds the history length");
  }
  CheckHistory(history, num_actions);
  JointStrategy z = JointStrategy::Zero(num_actions, num_actions);
  for (int t = 0; t < up_to; ++t) z(history[t].row, history[t].col) += 1.0;
  return z / static_cast<double>(up_to);
}

CommitmentMixture MixtureFromJoint(const JointStrategy& z) {
  if (z.rows() != z.cols()) throw ShapeError("joint strategy must be square");
  CheckDistribution(z, "joint strategy");
  CommitmentMixture nu;
  nu.source = z;
  double kept = 0.0;
  for (int j = 0; j < z.cols(); ++j) {
    const double zj = z.col(j).sum();
    if (zj <= kMixtureDropTolerance) continue;
    nu.components.push_back({z.col(j) / zj, zj, j});
    kept += zj;
  }
  for (auto& c : nu.components) c.probability /= kept;
  return nu;
}

MixedStrategy ResponseFunction(const CommitmentMixture& mixture,
                               int component_index) {
  if (component_index < 0 ||
      component_index >= static_cast<int>(mixture.components.size())) {
    throw RangeError("mixture component out of range");
  }
  const auto& query = mixture.components[component_index];
  MixedStrategy y = MixedStrategy::Zero(mixture.source.cols());
  for (const auto& c : mixture.components) {
    if ((c.strategy - query.strategy).lpNorm<Eigen::Infinity>() <= kProbTolerance) {
      y(c.column) = c.probability;
    }
  }
  return y / y.sum();
}

MixedStrategy ResponseFunction(const JointStrategy& z, int component_index) {
  return ResponseFunction(MixtureFromJoint(z), component_index);
}

CommitmentComponent SampleCommitment(const History& history, int prefix_length,
                                     Player seat, int num_actions,
                                     std::mt19937_64& rng) {
  JointStrategy z = EmpiricalJoint(history, prefix_length, num_actions);
  if (seat == Player::kCol) z.transposeInPlace();
  const CommitmentMixture nu = MixtureFromJoint(z);
  Eigen::VectorXd weights(nu.components.size());
  for (size_t c = 0; c < nu.components.size(); ++c) {
    weights(c) = nu.components[c].probability;
  }
  return nu.components[SampleIndex(weights, rng)];
}

AgentSpec MakeImitateCommitAgent(const Dataset& data, int tilde_horizon,
                                 int horizon, int own_type, Player seat) {
  if (tilde_horizon < 1 || tilde_horizon >= horizon) {
    throw DomainError("imitate-then-commit needs 1 <= T~ < T");
  }
  AgentSpec spec;
  spec.id = "ic";
  spec.own_type = own_type;
  spec.params = ImitateCommitParams{std::make_shared<const ImitationPolicy>(
      FitImitation(data, tilde_horizon, seat))};
  return spec;
}

double ImitationErrorBound(int num_actions, int tilde_horizon, int num_types,
                           std::int64_t dataset_size) {
  if (num_actions < 1 || tilde_horizon < 0 || num_types < 1 || dataset_size < 0) {
    throw DomainError("imitation bound inputs must be positive");
  }
  const double cap = tilde_horizon;
  if (dataset_size == 0) return cap;
  const double k = static_cast<double>(dataset_size);
  const double t = tilde_horizon;
  const double second = std::pow(static_cast<double>(num_actions), 2.0 * (t + 1.0)) *
                        num_types * t * t * std::log(k) / k;
  return std::min(cap, second);
}

double ImitationErrorBoundLogN(int num_actions, int tilde_horizon, int num_types,
                               std::int64_t dataset_size) {
  if (num_actions < 1 || tilde_horizon < 0 || num_types < 1 || dataset_size < 0) {
    throw DomainError("imitation bound inputs must be positive");
  }
  const double cap = tilde_horizon;
  if (dataset_size == 0) return cap;
  const double t = tilde_horizon;
  const double n = num_actions;
  const double second = std::pow(n, 2.0 * t) * num_types * t * t * std::log(n) /
                        static_cast<double>(dataset_size);
  return std::min(cap, second);
}

double ImitateCommitRegretBound(double delta, double eps, double delta_k,
                                int horizon, int tilde_horizon) {
  if (horizon < 1) throw DomainError("horizon must be positive");
  const double beta = static_cast<double>(horizon - tilde_horizon) / horizon;
  return 2.0 * delta + delta_k + (2.0 * beta + 1.0) * eps;
}

AuthFailure AuthFailureProbability(int num_actions, int handshake_length,
                                   std::int64_t unique_histories) {
  const double n = num_actions;
  const double nk = std::pow(n, handshake_length);
  const double n2k = nk * nk;
  const double m = static_cast<double>(unique_histories);
  if (unique_histories < 0 || m > n2k) {
    throw DomainError("unique history count must lie in [0, N^(2k)]");
  }
  AuthFailure out;
  out.corrected = (1.0 - 1.0 / nk) * (1.0 - m / n2k);
  out.as_printed = 1.0 - m / n2k - 1.0 / n + m / (n2k * nk);
  return out;
}

BoundReport MakeBoundReport(const BoundInputs& in) {
  BoundReport r;
  r.inputs = in;
  r.delta_k = ImitationErrorBound(in.num_actions, in.tilde_horizon, in.num_types,
                                  in.dataset_size);
  r.delta_k_log_n = ImitationErrorBoundLogN(in.num_actions, in.tilde_horizon,
                                            in.num_types, in.dataset_size);
  r.tolerances = ComputeProtocolTolerances(in.delta, in.horizon,
                                           in.handshake_length, in.num_actions);
  r.eps_used = in.eps >= 0.0 ? in.eps : r.tolerances.eps;
  r.regret_bound = ImitateCommitRegretBound(in.delta, r.eps_used, r.delta_k,
                                            in.horizon, in.tilde_horizon);
  const AuthFailure af =
      AuthFailureProbability(in.num_actions, in.handshake_length, in.unique_histories);
  r.failure_prob_corrected = af.corrected;
  r.failure_prob_as_printed = af.as_printed;
  return r;
}

std::string BoundReportJson(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["inputs"] = {{"N", r.inputs.num_actions},
                 {"num_types", r.inputs.num_types},
                 {"T", r.inputs.horizon},
                 {"tilde_T", r.inputs.tilde_horizon},
                 {"k", r.inputs.handshake_length},
                 {"K", r.inputs.dataset_size},
                 {"delta", r.inputs.delta},
                 {"M", r.inputs.unique_histories}};
  j["delta_K"] = r.delta_k;
  j["delta_K_log_N_variant"] = r.delta_k_log_n;
  j["protocol"] = {{"eps0", r.tolerances.eps0},
                   {"eps1", r.tolerances.eps1},
                   {"eps", r.tolerances.eps},
                   {"eps_exceeds_unit", r.tolerances.eps_exceeds_unit}};
  j["eps_used"] = r.eps_used;
  j["ic_regret_bound"] = r.regret_bound;
  j["auth_failure"] = {{"corrected", r.failure_prob_corrected},
                       {"as_printed", r.failure_prob_as_printed}};
  return j.dump(2);
}

}  // namespace cooplab

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

#ifndef COOPLAB_AGENTS_H_
#define COOPLAB_AGENTS_H_

// Behavioral agents for the repeated game. Every agent is described by an
// immutable AgentSpec; per-episode mutable data lives in AgentState. The
// interface is functional: Act() reads a state, Observe() returns the next
// state.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cooplab/equilibria.h"
#include "cooplab/game.h"
#include "cooplab/regret.h"

namespace cooplab {

class ImitationPolicy;
class FlattenedTable;

enum class AgentKind {
  kMw,
  kProtocol,
  kFixedMixed,
  kFixedSequence,
  kGrimTrigger,
  kUniformRandom,
  kBestResponder,
  kImitateCommit,
  kFlattened,
};

std::string AgentKindName(AgentKind kind);

// kStandard is sqrt(8 ln(N) / T). kAsPrinted is sqrt(8 ln(N / T)), which is
// only defined when N >= T.
enum class EtaRule { kStandard, kAsPrinted };

double DefaultEta(int num_actions, int horizon, EtaRule rule = EtaRule::kStandard);

// One multiplicative-weights step on probability weights:
// w'(a) ~ w(a) exp(eta * G(a, opp)). Computed in log space.
Eigen::VectorXd MwUpdate(const Eigen::VectorXd& weights,
                         const Eigen::MatrixXd& own_payoffs, int opp_action,
                         double eta);

// Log-space form used by the agents: adds eta * G(., opp) and renormalizes so
// that logsumexp(log_weights) == 0.
void MwLogUpdate(Eigen::VectorXd& log_weights, const Eigen::MatrixXd& own_payoffs,
                 int opp_action, double eta);
MixedStrategy SoftmaxStrategy(const Eigen::VectorXd& log_weights);

// Handshake codes: base-N big-endian digits of the type index.
int DefaultHandshakeLength(int num_types, int num_actions);
std::vector<int> HandshakeEncode(int type, int length, int num_actions);
// nullopt for sequences that are not the code of any type in [0, num_types).
std::optional<int> HandshakeDecode(std::span<const int> digits, int num_actions,
                                   int num_types);

// Ceiling on the running expected regret for staying on the convention:
// k + eps1 (T - k) - sqrt(((T - k) / 2) ln N) - 1.
double ProtocolThreshold(int handshake_length, int horizon, double eps1,
                         int num_actions);

struct ProtocolTolerances {
  double eps0 = 0.0;
  double eps1 = 0.0;
  double eps = 0.0;
  // eps carries a sqrt(((T - k) / 2) ln(1 / delta)) term, so it exceeds 1
  // (a vacuous average-regret guarantee for [0, 1] payoffs) at moderate T.
  bool eps_exceeds_unit = false;
};

// eps0 = sqrt((2 / (T - k)) ln(2 / delta)),
// eps1 = eps0 + sqrt(ln N / (2 (T - k))) + 1 / (T - k),
// eps  = eps1 + sqrt(((T - k) / 2) ln(1 / delta)).
ProtocolTolerances ComputeProtocolTolerances(double delta, int horizon,
                                             int handshake_length, int num_actions);

// Maps each joint type to the convention profile s(theta) in P(G(theta)).
class ConventionTable {
 public:
  enum class Selection { kFirst, kLast };

  ConventionTable(int num_types, std::map<JointType, EquilibriumProfile> entries);

  // One PONE per joint type picked from the canonical enumeration order.
  static ConventionTable FromParetoSet(const TypeSpace& types,
                                       Selection selection = Selection::kFirst);

  int num_types() const { return num_types_; }
  const EquilibriumProfile& at(JointType joint) const;
  const std::map<JointType, EquilibriumProfile>& entries() const {
    return entries_;
  }

  // Throws InvariantError unless every joint type has an entry that matches a
  // member of the PONE set of its game.
  void Validate(const TypeSpace& types) const;

 private:
  int num_types_;
  std::map<JointType, EquilibriumProfile> entries_;
};

struct MwParams {
  std::optional<double> eta;  // overrides DefaultEta
  EtaRule eta_rule = EtaRule::kStandard;
};

struct ProtocolParams {
  std::shared_ptr<const ConventionTable> conventions;
  int handshake_length = -1;  // -1: DefaultHandshakeLength
  double eps1 = 0.0;
  EtaRule fallback_eta_rule = EtaRule::kStandard;
};

struct FixedMixedParams {
  MixedStrategy strategy;
};

// Cycles through `actions`.
struct FixedSequenceParams {
  std::vector<int> actions;
};

// Plays `cooperate` until the opponent plays an action outside `tolerated`,
// then `punish` forever.
struct GrimTriggerParams {
  int cooperate = 0;
  int punish = 1;
  std::vector<int> tolerated = {0};
};

struct UniformRandomParams {};

// Pure best response (lowest index on ties) to the opponent's empirical
// action frequencies; uniform belief at stage 0.
struct BestResponderParams {};

struct ImitateCommitParams {
  std::shared_ptr<const ImitationPolicy> policy;
};

struct FlattenedParams {
  std::shared_ptr<const FlattenedTable> table;
};

using AgentParams =
    std::variant<MwParams, ProtocolParams, FixedMixedParams, FixedSequenceParams,
                 GrimTriggerParams, UniformRandomParams, BestResponderParams,
                 ImitateCommitParams, FlattenedParams>;

struct AgentSpec {
  std::string id;
  AgentParams params;
  // Bound per episode by the runner from the joint type.
  int own_type = 0;

  AgentKind kind() const { return static_cast<AgentKind>(params.index()); }
};

// Kinds whose behavior is fully described by their announced strategies
// (no private randomness). Only these can be flattened or enumerated.
bool IsBehavioral(const AgentSpec& spec);

enum class ProtocolPhase { kHandshake = 0, kConvention = 1, kFallback = 2 };

struct MwState {
  Eigen::VectorXd log_weights;
  double eta = 0.0;
};

struct ProtocolState {
  ProtocolPhase phase = ProtocolPhase::kHandshake;
  int handshake_length = 0;
  double threshold = 0.0;
  int partner_type = -1;
  std::vector<int> own_code;
  RegretAccumulator accumulator{1};
  MwState fallback;
};

struct GrimState {
  bool triggered = false;
};

struct CommitState {
  bool committed = false;
  int component = -1;
  MixedStrategy commitment;
};

struct AgentState {
  Player seat = Player::kRow;
  int own_type = 0;
  int horizon = 0;
  int num_actions = 0;
  int stage = 0;
  Eigen::MatrixXd own_payoffs;  // (own action, opponent action)
  History history;
  std::mt19937_64 rng;
  std::variant<std::monostate, MwState, ProtocolState, GrimState, CommitState>
      detail;
};

AgentState InitialState(const AgentSpec& spec, const TypeSpace& types,
                        Player seat, int horizon, std::uint64_t seed);

// Announced mixed strategy for stage history.size(). Pure in its inputs.
MixedStrategy Act(const AgentSpec& spec, const AgentState& state,
                  const History& history);

// State after the stage with the given own and opponent actions.
AgentState Observe(const AgentSpec& spec, AgentState state, int own_action,
                   int opp_action);

// Phase of a protocol agent, -1 for other kinds.
int PhaseCode(const AgentState& state);

}  // namespace cooplab

#endif  // COOPLAB_AGENTS_H_

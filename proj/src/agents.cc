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

#include "cooplab/agents.h"

#include <algorithm>
#include <cmath>

#include "cooplab/imitation.h"
#include "cooplab/population.h"

namespace cooplab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double LogSumExp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

MwState MakeMwState(int num_actions, double eta) {
  MwState s;
  s.eta = eta;
  s.log_weights = Eigen::VectorXd::Constant(num_actions, -std::log(num_actions));
  return s;
}

int OpponentAction(const Stage& s, Player seat) { return s.of(Opponent(seat)); }

// Convention strategy for `seat` given own and decoded partner types.
const MixedStrategy& ConventionStrategy(const ProtocolParams& p,
                                        const AgentState& state, int partner) {
  const JointType joint = state.seat == Player::kRow
                              ? JointType{state.own_type, partner}
                              : JointType{partner, state.own_type};
  return p.conventions->at(joint).strategy(state.seat);
}

MixedStrategy ProtocolStrategy(const ProtocolParams& p, const AgentState& state) {
  const auto& ps = std::get<ProtocolState>(state.detail);
  switch (ps.phase) {
    case ProtocolPhase::kHandshake:
      return PureStrategy(state.num_actions, ps.own_code[state.stage]);
    case ProtocolPhase::kConvention:
      return ConventionStrategy(p, state, ps.partner_type);
    case ProtocolPhase::kFallback:
      return SoftmaxStrategy(ps.fallback.log_weights);
  }
  return UniformStrategy(state.num_actions);
}

void ProtocolObserve(const ProtocolParams& p, AgentState& state, int own,
                     int opp) {
  (void)own;
  const MixedStrategy announced = ProtocolStrategy(p, state);
  auto& ps = std::get<ProtocolState>(state.detail);
  const Eigen::VectorXd values = state.own_payoffs.col(opp);
  ps.accumulator.Add(values, announced.dot(values));
  const int done = state.stage + 1;  // stages completed after this one

  if (ps.phase == ProtocolPhase::kFallback) {
    MwLogUpdate(ps.fallback.log_weights, state.own_payoffs, opp, ps.fallback.eta);
    return;
  }
  if (ps.phase == ProtocolPhase::kHandshake) {
    if (done < ps.handshake_length) return;
    std::vector<int> digits;
    for (int t = 0; t < ps.handshake_length; ++t) {
      digits.push_back(t + 1 == done ? opp : OpponentAction(state.history[t], state.seat));
    }
    const auto decoded = HandshakeDecode(digits, state.num_actions,
                                         p.conventions->num_types());
    if (!decoded) {
      ps.phase = ProtocolPhase::kFallback;
      return;
    }
    ps.partner_type = *decoded;
    ps.phase = ProtocolPhase::kConvention;
  }
  if (ps.accumulator.Value() > ps.threshold) ps.phase = ProtocolPhase::kFallback;
}

MixedStrategy BestResponderStrategy(const AgentState& state,
                                    const History& history) {
  const int n = state.num_actions;
  Eigen::VectorXd belief = Eigen::VectorXd::Constant(n, 1.0 / n);
  if (!history.empty()) {
    belief.setZero();
    for (const Stage& s : history) belief(OpponentAction(s, state.seat)) += 1.0;
    belief /= static_cast<double>(history.size());
  }
  const Eigen::VectorXd values = state.own_payoffs * belief;
  Eigen::Index best = 0;
  values.maxCoeff(&best);
  return PureStrategy(n, static_cast<int>(best));
}

}  // namespace

std::string AgentKindName(AgentKind kind) {
  switch (kind) {
    case AgentKind::kMw: return "mw";
    case AgentKind::kProtocol: return "protocol";
    case AgentKind::kFixedMixed: return "fixed-mixed";
    case AgentKind::kFixedSequence: return "fixed-sequence";
    case AgentKind::kGrimTrigger: return "grim-trigger";
    case AgentKind::kUniformRandom: return "uniform-random";
    case AgentKind::kBestResponder: return "best-responder";
    case AgentKind::kImitateCommit: return "imitate-commit";
    case AgentKind::kFlattened: return "flattened";
  }
  return "unknown";
}

double DefaultEta(int num_actions, int horizon, EtaRule rule) {
  if (num_actions < 1 || horizon < 1) {
    throw DomainError("eta needs N >= 1 and T >= 1");
  }
  const double n = num_actions;
  const double t = horizon;
  if (rule == EtaRule::kAsPrinted) {
    const double inner = 8.0 * std::log(n / t);
    if (!(inner > 0.0)) {
      throw DomainError("sqrt(8 ln(N / T)) is undefined for N <= T");
    }
    return std::sqrt(inner);
  }
  return std::sqrt(8.0 * std::log(n) / t);
}

void MwLogUpdate(Eigen::VectorXd& log_weights, const Eigen::MatrixXd& own_payoffs,
                 int opp_action, double eta) {
  if (opp_action < 0 || opp_action >= own_payoffs.cols()) {
    throw RangeError("opponent action out of range");
  }
  log_weights += eta * own_payoffs.col(opp_action);
  log_weights.array() -= LogSumExp(log_weights);
  if (!log_weights.allFinite()) throw NumericError("MW weights became non-finite");
}

MixedStrategy SoftmaxStrategy(const Eigen::VectorXd& log_weights) {
  MixedStrategy p = (log_weights.array() - log_weights.maxCoeff()).exp().matrix();
  return p / p.sum();
}

Eigen::VectorXd MwUpdate(const Eigen::VectorXd& weights,
                         const Eigen::MatrixXd& own_payoffs, int opp_action,
                         double eta) {
  if (weights.size() != own_payoffs.rows()) {
    throw ShapeError("weights do not match the payoff matrix");
  }
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw NumericError("MW weights must be finite and positive");
  }
  Eigen::VectorXd lw = weights.array().log().matrix();
  MwLogUpdate(lw, own_payoffs, opp_action, eta);
  return SoftmaxStrategy(lw);
}

int DefaultHandshakeLength(int num_types, int num_actions) {
  if (num_types < 1) throw DomainError("type space is empty");
  if (num_types == 1) return 0;
  if (num_actions < 2) throw CapacityError("one action cannot encode types");
  int k = 0;
  long long capacity = 1;
  while (capacity < num_types) {
    capacity *= num_actions;
    ++k;
  }
  return k;
}

std::vector<int> HandshakeEncode(int type, int length, int num_actions) {
  if (type < 0) throw RangeError("type index is negative");
  std::vector<int> digits(length, 0);
  long long rest = type;
  for (int i = length - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(rest % num_actions);
    rest /= num_actions;
  }
  if (rest != 0) {
    throw CapacityError("type index does not fit in " + std::to_string(length) +
                        " base-" + std::to_string(num_actions) + " digits");
  }
  return digits;
}

std::optional<int> HandshakeDecode(std::span<const int> digits, int num_actions,
                                   int num_types) {
  long long value = 0;
  for (int d : digits) {
    if (d < 0 || d >= num_actions) return std::nullopt;
    value = value * num_actions + d;
    if (value >= num_types) return std::nullopt;
  }
  return static_cast<int>(value);
}

double ProtocolThreshold(int handshake_length, int horizon, double eps1,
                         int num_actions) {
  const double rest = horizon - handshake_length;
  return handshake_length + eps1 * rest -
         std::sqrt(rest / 2.0 * std::log(static_cast<double>(num_actions))) - 1.0;
}

ProtocolTolerances ComputeProtocolTolerances(double delta, int horizon,
                                             int handshake_length,
                                             int num_actions) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
  if (horizon <= handshake_length) throw DomainError("need T > k");
  if (num_actions < 1) throw DomainError("need N >= 1");
  const double rest = horizon - handshake_length;
  ProtocolTolerances out;
  out.eps0 = std::sqrt(2.0 / rest * std::log(2.0 / delta));
  out.eps1 = out.eps0 +
             std::sqrt(std::log(static_cast<double>(num_actions)) / (2.0 * rest)) +
             1.0 / rest;
  out.eps = out.eps1 + std::sqrt(rest / 2.0 * std::log(1.0 / delta));
  out.eps_exceeds_unit = out.eps > 1.0;
  return out;
}

ConventionTable::ConventionTable(int num_types,
                                 std::map<JointType, EquilibriumProfile> entries)
    : num_types_(num_types), entries_(std::move(entries)) {}

ConventionTable ConventionTable::FromParetoSet(const TypeSpace& types,
                                               Selection selection) {
  std::map<JointType, EquilibriumProfile> entries;
  for (const JointType& joint : types.JointTypes()) {
    const PoneSet pone = ParetoOptimalNash(types.Game(joint));
    if (pone.profiles.empty()) {
      throw InvariantError("joint type (" + types.name(joint.row) + ", " +
                           types.name(joint.col) + ") has no PONE");
    }
    entries.emplace(joint, selection == Selection::kFirst
                               ? pone.profiles.front()
                               : pone.profiles.back());
  }
  return ConventionTable(types.size(), std::move(entries));
}

const EquilibriumProfile& ConventionTable::at(JointType joint) const {
  auto it = entries_.find(joint);
  if (it == entries_.end()) throw RangeError("no convention for joint type");
  return it->second;
}

void ConventionTable::Validate(const TypeSpace& types) const {
  if (num_types_ != types.size()) {
    throw InvariantError("convention table and type space sizes differ");
  }
  for (const JointType& joint : types.JointTypes()) {
    auto it = entries_.find(joint);
    if (it == entries_.end()) {
      throw InvariantError("convention table misses joint type (" +
                           types.name(joint.row) + ", " + types.name(joint.col) +
                           ")");
    }
    const PoneSet pone = ParetoOptimalNash(types.Game(joint));
    const bool member = std::any_of(
        pone.profiles.begin(), pone.profiles.end(),
        [&](const EquilibriumProfile& q) { return SameProfile(q, it->second); });
    if (!member) {
      throw InvariantError("convention for (" + types.name(joint.row) + ", " +
                           types.name(joint.col) + ") is not a PONE");
    }
  }
}

bool IsBehavioral(const AgentSpec& spec) {
  return spec.kind() != AgentKind::kImitateCommit;
}

AgentState InitialState(const AgentSpec& spec, const TypeSpace& types,
                        Player seat, int horizon, std::uint64_t seed) {
  AgentState state;
  state.seat = seat;
  state.own_type = spec.own_type;
  state.horizon = horizon;
  state.num_actions = types.num_actions();
  state.own_payoffs = types.payoffs(spec.own_type);
  state.rng.seed(seed);
  const int n = state.num_actions;

  std::visit(
      Overloaded{
          [&](const MwParams& p) {
            const double eta = p.eta ? *p.eta : DefaultEta(n, horizon, p.eta_rule);
            if (!(eta >= 0.0) || !std::isfinite(eta)) {
              throw DomainError("MW learning rate must be finite and >= 0");
            }
            state.detail = MakeMwState(n, eta);
          },
          [&](const ProtocolParams& p) {
            if (!p.conventions) throw DataError("protocol agent has no conventions");
            if (p.conventions->num_types() != types.size()) {
              throw InvariantError("conventions do not match the type space");
            }
            ProtocolState ps;
            ps.handshake_length = p.handshake_length >= 0
                                      ? p.handshake_length
                                      : DefaultHandshakeLength(types.size(), n);
            if (horizon <= ps.handshake_length) {
              throw DomainError("protocol needs T > k");
            }
            ps.own_code = HandshakeEncode(spec.own_type, ps.handshake_length, n);
            ps.threshold = ProtocolThreshold(ps.handshake_length, horizon, p.eps1, n);
            ps.accumulator = RegretAccumulator(n);
            // The fallback learner only ever runs on the T - k stages after
            // the handshake.
            ps.fallback = MakeMwState(
                n, DefaultEta(n, horizon - ps.handshake_length, p.fallback_eta_rule));
            if (ps.handshake_length == 0) {
              ps.partner_type = 0;
              ps.phase = ProtocolPhase::kConvention;
            }
            state.detail = std::move(ps);
          },
          [&](const FixedMixedParams& p) {
            if (p.strategy.size() != n) throw ShapeError("fixed strategy length");
            CheckDistribution(p.strategy, "fixed strategy");
          },
          [&](const FixedSequenceParams& p) {
            if (p.actions.empty()) throw DomainError("fixed sequence is empty");
            for (int a : p.actions) {
              if (a < 0 || a >= n) throw RangeError("sequence action out of range");
            }
          },
          [&](const GrimTriggerParams& p) {
            if (p.cooperate < 0 || p.cooperate >= n || p.punish < 0 ||
                p.punish >= n) {
              throw RangeError("grim trigger action out of range");
            }
            state.detail = GrimState{};
          },
          [&](const UniformRandomParams&) {},
          [&](const BestResponderParams&) {},
          [&](const ImitateCommitParams& p) {
            if (!p.policy) throw DataError("imitate-commit agent has no policy");
            if (p.policy->num_actions() != n) {
              throw ShapeError("imitation policy does not match the game");
            }
            state.detail = CommitState{};
          },
          [&](const FlattenedParams& p) {
            if (!p.table) throw DataError("flattened agent has no table");
            if (p.table->seat() != seat) {
              throw DomainError("flattened agent was built for the other seat");
            }
          },
      },
      spec.params);
  return state;
}

MixedStrategy Act(const AgentSpec& spec, const AgentState& state,
                  const History& history) {
  const int n = state.num_actions;
  return std::visit(
      Overloaded{
          [&](const MwParams&) {
            return SoftmaxStrategy(std::get<MwState>(state.detail).log_weights);
          },
          [&](const ProtocolParams& p) { return ProtocolStrategy(p, state); },
          [&](const FixedMixedParams& p) { return MixedStrategy(p.strategy); },
          [&](const FixedSequenceParams& p) {
            return PureStrategy(n, p.actions[history.size() % p.actions.size()]);
          },
          [&](const GrimTriggerParams& p) {
            return PureStrategy(n, std::get<GrimState>(state.detail).triggered
                                       ? p.punish
                                       : p.cooperate);
          },
          [&](const UniformRandomParams&) { return UniformStrategy(n); },
          [&](const BestResponderParams&) {
            return BestResponderStrategy(state, history);
          },
          [&](const ImitateCommitParams& p) {
            const auto& cs = std::get<CommitState>(state.detail);
            if (cs.committed) return MixedStrategy(cs.commitment);
            return p.policy->Lookup(state.own_type, history);
          },
          [&](const FlattenedParams& p) {
            return p.table->Lookup(state.own_type, history);
          },
      },
      spec.params);
}

AgentState Observe(const AgentSpec& spec, AgentState state, int own_action,
                   int opp_action) {
  const int n = state.num_actions;
  if (own_action < 0 || own_action >= n || opp_action < 0 || opp_action >= n) {
    throw RangeError("observed action out of range");
  }
  std::visit(
      Overloaded{
          [&](const MwParams&) {
            auto& mw = std::get<MwState>(state.detail);
            MwLogUpdate(mw.log_weights, state.own_payoffs, opp_action, mw.eta);
          },
          [&](const ProtocolParams& p) {
            ProtocolObserve(p, state, own_action, opp_action);
          },
          [&](const GrimTriggerParams& p) {
            auto& g = std::get<GrimState>(state.detail);
            if (std::find(p.tolerated.begin(), p.tolerated.end(), opp_action) ==
                p.tolerated.end()) {
              g.triggered = true;
            }
          },
          [](const auto&) {},
      },
      spec.params);

  state.history.push_back(state.seat == Player::kRow
                              ? Stage{own_action, opp_action}
                              : Stage{opp_action, own_action});
  ++state.stage;

  if (const auto* ic = std::get_if<ImitateCommitParams>(&spec.params)) {
    auto& cs = std::get<CommitState>(state.detail);
    const int prefix = ic->policy->tilde_horizon();
    if (!cs.committed && state.stage == prefix) {
      CommitmentComponent c =
          SampleCommitment(state.history, prefix, state.seat, n, state.rng);
      cs.committed = true;
      cs.component = c.column;
      cs.commitment = std::move(c.strategy);
    }
  }
  return state;
}

int PhaseCode(const AgentState& state) {
  if (const auto* ps = std::get_if<ProtocolState>(&state.detail)) {
    return static_cast<int>(ps->phase);
  }
  return -1;
}

}  // namespace cooplab

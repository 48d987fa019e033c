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

#include "cooplab/config.h"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace cooplab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

MixedStrategy StrategyFromJson(const json& j, int n, const char* what) {
  const std::vector<double> v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != n) {
    throw FormatError(std::string(what) + " must have num_actions entries");
  }
  MixedStrategy s = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  if (!IsDistribution(s, 1e-9)) {
    throw FormatError(std::string(what) + " is not a distribution");
  }
  return s / s.sum();
}

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

EtaRule ParseEtaRule(const json& j, const char* key) {
  if (!j.contains(key)) return EtaRule::kStandard;
  const std::string r = j.at(key).get<std::string>();
  if (r == "standard") return EtaRule::kStandard;
  if (r == "as-printed") return EtaRule::kAsPrinted;
  throw FormatError("unknown eta rule '" + r + "'");
}

std::string EtaRuleName(EtaRule r) {
  return r == EtaRule::kStandard ? "standard" : "as-printed";
}

}  // namespace

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
}

std::shared_ptr<const ConventionTable> ParseConventions(const json& j,
                                                        const TypeSpace& types) {
  if (j.is_string()) {
    const std::string mode = j.get<std::string>();
    if (mode == "first-pone") {
      return std::make_shared<const ConventionTable>(
          ConventionTable::FromParetoSet(types, ConventionTable::Selection::kFirst));
    }
    if (mode == "last-pone") {
      return std::make_shared<const ConventionTable>(
          ConventionTable::FromParetoSet(types, ConventionTable::Selection::kLast));
    }
    throw FormatError("unknown convention selection '" + mode + "'");
  }
  if (!j.is_array()) throw FormatError("conventions must be a string or a list");
  std::map<JointType, EquilibriumProfile> entries;
  const int n = types.num_actions();
  for (const json& e : j) {
    JointType jt;
    try {
      jt = {types.Index(e.at("theta1").get<std::string>()),
            types.Index(e.at("theta2").get<std::string>())};
    } catch (const RangeError& err) {
      throw FormatError(std::string("convention entry: ") + err.what());
    }
    MixedStrategy r = StrategyFromJson(e.at("sigma_row"), n, "sigma_row");
    MixedStrategy c = StrategyFromJson(e.at("sigma_col"), n, "sigma_col");
    entries[jt] = MakeProfile(types.Game(jt), std::move(r), std::move(c));
  }
  auto table = std::make_shared<const ConventionTable>(types.size(), std::move(entries));
  table->Validate(types);
  return table;
}

ordered_json ConventionTableToJson(const ConventionTable& table,
                                   const TypeSpace* types) {
  ordered_json out = ordered_json::array();
  for (const auto& [jt, p] : table.entries()) {
    ordered_json e;
    if (types) {
      e["theta1"] = types->name(jt.row);
      e["theta2"] = types->name(jt.col);
    } else {
      e["theta1"] = jt.row;
      e["theta2"] = jt.col;
    }
    e["sigma_row"] = ToVector(p.sigma_row);
    e["sigma_col"] = ToVector(p.sigma_col);
    out.push_back(std::move(e));
  }
  return out;
}

AgentSpec ParseAgentSpec(const json& j, const TypeSpace& types, int horizon) {
  AgentSpec spec;
  const int n = types.num_actions();
  try {
    const std::string kind = j.at("kind").get<std::string>();
    spec.id = j.value("id", kind);
    if (kind == "mw") {
      MwParams p;
      if (j.contains("eta")) p.eta = j.at("eta").get<double>();
      p.eta_rule = ParseEtaRule(j, "eta_rule");
      spec.params = p;
    } else if (kind == "protocol") {
      ProtocolParams p;
      p.conventions = ParseConventions(j.value("conventions", json("first-pone")), types);
      p.handshake_length = j.value("k", DefaultHandshakeLength(types.size(), n));
      p.fallback_eta_rule = ParseEtaRule(j, "fallback_eta_rule");
      if (j.contains("eps1")) {
        p.eps1 = j.at("eps1").get<double>();
      } else if (j.contains("delta")) {
        p.eps1 = ComputeProtocolTolerances(j.at("delta").get<double>(), horizon,
                                           p.handshake_length, n)
                     .eps1;
      } else {
        throw FormatError("protocol agent needs eps1 or delta");
      }
      spec.params = p;
    } else if (kind == "fixed-mixed") {
      spec.params = FixedMixedParams{StrategyFromJson(j.at("strategy"), n, "strategy")};
    } else if (kind == "fixed-sequence") {
      spec.params = FixedSequenceParams{j.at("actions").get<std::vector<int>>()};
    } else if (kind == "grim-trigger") {
      GrimTriggerParams p;
      p.cooperate = j.value("cooperate", 0);
      p.punish = j.value("punish", 1);
      if (j.contains("tolerated")) p.tolerated = j.at("tolerated").get<std::vector<int>>();
      spec.params = p;
    } else if (kind == "uniform-random") {
      spec.params = UniformRandomParams{};
    } else if (kind == "best-responder") {
      spec.params = BestResponderParams{};
    } else {
      throw FormatError("agent kind '" + kind + "' cannot be built from a config");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad agent spec: ") + e.what());
  }
  return spec;
}

ordered_json AgentSpecToJson(const AgentSpec& spec, const TypeSpace* types) {
  ordered_json j;
  j["id"] = spec.id;
  j["kind"] = AgentKindName(spec.kind());
  if (const auto* p = std::get_if<MwParams>(&spec.params)) {
    if (p->eta) j["eta"] = *p->eta;
    j["eta_rule"] = EtaRuleName(p->eta_rule);
  } else if (const auto* p = std::get_if<ProtocolParams>(&spec.params)) {
    j["k"] = p->handshake_length;
    j["eps1"] = p->eps1;
    j["fallback_eta_rule"] = EtaRuleName(p->fallback_eta_rule);
    if (p->conventions) j["conventions"] = ConventionTableToJson(*p->conventions, types);
  } else if (const auto* p = std::get_if<FixedMixedParams>(&spec.params)) {
    j["strategy"] = ToVector(p->strategy);
  } else if (const auto* p = std::get_if<FixedSequenceParams>(&spec.params)) {
    j["actions"] = p->actions;
  } else if (const auto* p = std::get_if<GrimTriggerParams>(&spec.params)) {
    j["cooperate"] = p->cooperate;
    j["punish"] = p->punish;
    j["tolerated"] = p->tolerated;
  }
  return j;
}

Population ParsePopulation(const json& j, const TypeSpace& types, int horizon) {
  Population pop;
  if (!j.contains("members") || !j.at("members").is_array()) {
    throw FormatError("population needs a members list");
  }
  for (const json& m : j.at("members")) {
    pop.members.push_back(ParseAgentSpec(m, types, horizon));
    pop.weights.push_back(m.value("weight", 1.0));
  }
  double total = 0.0;
  for (double w : pop.weights) total += w;
  if (!(total > 0.0)) throw FormatError("population weights must be positive");
  for (double& w : pop.weights) w /= total;
  pop.Validate();
  return pop;
}

PopulationFile LoadPopulationFile(const std::string& path, int horizon) {
  const json j = ReadJsonFile(path);
  if (!j.contains("game")) throw FormatError(path + ": population needs a game file");
  const std::filesystem::path game =
      std::filesystem::path(path).parent_path() / j.at("game").get<std::string>();
  TypeSpace types = LoadTypeSpace(game.string());
  if (j.value("normalize", false)) types = types.Normalized();
  try {
    Population pop = ParsePopulation(j, types, horizon);
    return {std::move(types), std::move(pop)};
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::uint64_t PopulationHash(const Population& population) {
  ordered_json j = ordered_json::array();
  for (size_t i = 0; i < population.members.size(); ++i) {
    ordered_json m = AgentSpecToJson(population.members[i]);
    m["weight"] = population.weights[i];
    j.push_back(std::move(m));
  }
  return Fnv1a(j.dump());
}

TypeDistribution ParseTypeDistribution(const json& j, const TypeSpace& types) {
  TypeDistribution mu;
  try {
    if (j.value("uniform", false)) {
      mu = TypeDistribution::Uniform(types);
    } else {
      for (const json& p : j.at("support")) {
        mu.support.push_back({types.Index(p.at(0).get<std::string>()),
                              types.Index(p.at(1).get<std::string>())});
      }
      mu.weights = j.at("weights").get<std::vector<double>>();
      double total = 0.0;
      for (double w : mu.weights) total += w;
      if (!(total > 0.0)) throw FormatError("type weights must be positive");
      for (double& w : mu.weights) w /= total;
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad type distribution: ") + e.what());
  } catch (const RangeError& e) {
    throw FormatError(std::string("bad type distribution: ") + e.what());
  }
  mu.Validate(types);
  return mu;
}

TypeDistribution LoadTypeDistribution(const std::string& path,
                                      const TypeSpace& types) {
  try {
    return ParseTypeDistribution(ReadJsonFile(path), types);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace cooplab

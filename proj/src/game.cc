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

#include "cooplab/game.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cooplab {

using nlohmann::json;

std::string PlayerName(Player p) { return p == Player::kRow ? "row" : "col"; }

Player ParsePlayer(const std::string& name) {
  if (name == "row" || name == "1") return Player::kRow;
  if (name == "col" || name == "2") return Player::kCol;
  throw DomainError("unknown player '" + name + "' (expected row|col)");
}

void CheckHistory(const History& history, int num_actions) {
  for (const Stage& s : history) {
    if (s.row < 0 || s.row >= num_actions || s.col < 0 ||
        s.col >= num_actions) {
      throw RangeError("history action out of range");
    }
  }
}

TypeSpace::TypeSpace(int num_actions, std::vector<std::string> names,
                     std::vector<Eigen::MatrixXd> payoffs,
                     std::vector<std::string> action_names)
    : num_actions_(num_actions),
      names_(std::move(names)),
      payoffs_(std::move(payoffs)),
      actions_(std::move(action_names)) {
  if (num_actions_ < 1) throw DomainError("num_actions must be positive");
  if (names_.empty()) throw DomainError("type space is empty");
  if (names_.size() != payoffs_.size()) {
    throw ShapeError("one payoff matrix per type is required");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw DomainError("duplicate type '" + n + "'");
  }
  for (const auto& m : payoffs_) {
    if (m.rows() != num_actions_ || m.cols() != num_actions_) {
      throw ShapeError("type payoff matrix is not N x N");
    }
  }
  if (actions_.empty()) {
    for (int a = 0; a < num_actions_; ++a) actions_.push_back(std::to_string(a));
  } else if (static_cast<int>(actions_.size()) != num_actions_) {
    throw ShapeError("action_names must have num_actions entries");
  }
}

const std::string& TypeSpace::name(int type) const {
  if (type < 0 || type >= size()) throw RangeError("type index out of range");
  return names_[type];
}

const Eigen::MatrixXd& TypeSpace::payoffs(int type) const {
  if (type < 0 || type >= size()) throw RangeError("type index out of range");
  return payoffs_[type];
}

int TypeSpace::Index(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw RangeError("unknown type '" + name + "'");
}

BimatrixGame TypeSpace::Game(JointType joint) const {
  return BimatrixGame(payoffs(joint.row), payoffs(joint.col).transpose(),
                      joint);
}

std::vector<JointType> TypeSpace::JointTypes() const {
  std::vector<JointType> out;
  for (int r = 0; r < size(); ++r) {
    for (int c = 0; c < size(); ++c) out.push_back({r, c});
  }
  return out;
}

TypeSpace TypeSpace::Normalized() const {
  std::vector<Eigen::MatrixXd> scaled;
  for (const auto& m : payoffs_) scaled.push_back(NormalizePayoffs(m));
  return TypeSpace(num_actions_, names_, std::move(scaled), actions_);
}

std::uint64_t Fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t TypeSpace::Hash() const { return Fnv1a(SerializeTypeSpace(*this)); }

namespace {

Eigen::MatrixXd MatrixFromJson(const json& rows, int n, const std::string& who) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw FormatError("payoffs for '" + who + "' must have num_actions rows");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw FormatError("payoff row for '" + who + "' has wrong length");
    }
    for (int j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw FormatError("payoff entry for '" + who + "' is not a number");
      }
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

TypeSpace ParseTypeSpace(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("game file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("num_actions") || !doc.contains("types") ||
      !doc.contains("payoffs")) {
    throw FormatError("game file needs num_actions, types and payoffs");
  }
  const int n = doc.at("num_actions").get<int>();
  std::vector<std::string> names = doc.at("types").get<std::vector<std::string>>();
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& name : names) {
    if (!doc.at("payoffs").contains(name)) {
      throw FormatError("no payoff matrix for type '" + name + "'");
    }
    mats.push_back(MatrixFromJson(doc.at("payoffs").at(name), n, name));
  }
  std::vector<std::string> actions;
  if (doc.contains("action_names")) {
    actions = doc.at("action_names").get<std::vector<std::string>>();
  }
  return TypeSpace(n, std::move(names), std::move(mats), std::move(actions));
}

TypeSpace LoadTypeSpace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open game file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return ParseTypeSpace(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string SerializeTypeSpace(const TypeSpace& types) {
  // Hand-rendered so the bytes (and the hash) do not depend on JSON
  // number formatting.
  std::ostringstream out;
  out << "{\"num_actions\": " << types.num_actions() << ", \"types\": [";
  for (int t = 0; t < types.size(); ++t) {
    out << (t ? ", " : "") << json(types.name(t)).dump();
  }
  out << "], \"action_names\": [";
  for (int a = 0; a < types.num_actions(); ++a) {
    out << (a ? ", " : "") << json(types.action_names()[a]).dump();
  }
  out << "], \"payoffs\": {";
  for (int t = 0; t < types.size(); ++t) {
    out << (t ? ", " : "") << json(types.name(t)).dump() << ": [";
    const auto& m = types.payoffs(t);
    for (int i = 0; i < m.rows(); ++i) {
      out << (i ? ", " : "") << "[";
      for (int j = 0; j < m.cols(); ++j) {
        out << (j ? ", " : "") << FormatDouble(m(i, j));
      }
      out << "]";
    }
    out << "]";
  }
  out << "}}";
  return out.str();
}

void CheckTrace(const EpisodeTrace& trace, int num_actions) {
  const size_t t = trace.history.size();
  if (trace.row_strategies.size() != t || trace.col_strategies.size() != t) {
    throw DataError("trace strategy records do not match history length");
  }
  CheckHistory(trace.history, num_actions);
  for (size_t s = 0; s < t; ++s) {
    const auto& h = trace.history[s];
    if (trace.row_strategies[s].size() != num_actions ||
        trace.col_strategies[s].size() != num_actions) {
      throw DataError("trace strategy has wrong length");
    }
    if (!(trace.row_strategies[s](h.row) > 0.0) ||
        !(trace.col_strategies[s](h.col) > 0.0)) {
      throw DataError("sampled action has zero announced probability");
    }
  }
}

}  // namespace cooplab

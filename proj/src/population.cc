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

#include "cooplab/population.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "cooplab/parallel.h"
#include "json.hpp"

namespace cooplab {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void CheckWeights(const std::vector<double>& w, const char* what) {
  if (w.empty()) throw DomainError(std::string(what) + " is empty");
  Eigen::Map<const Eigen::VectorXd> v(w.data(), static_cast<Eigen::Index>(w.size()));
  CheckDistribution(v, what);
}

std::string HexHash(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::uint64_t ParseHexHash(const std::string& s, int line) {
  try {
    size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used, 16);
    if (used != s.size()) throw FormatError("bad hash", line);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad hash '" + s + "'", line);
  }
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  return SplitMix64(master ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int SampleIndex(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  const double u = UniformUnit(rng);
  double cum = 0.0;
  int last = -1;
  for (int i = 0; i < probs.size(); ++i) {
    if (!(probs(i) > 0.0)) continue;
    cum += probs(i);
    last = i;
    if (u < cum) return i;
  }
  if (last < 0) throw DomainError("cannot sample from an all-zero distribution");
  return last;
}

void Population::Validate() const {
  if (members.empty()) throw DomainError("population has no members");
  if (members.size() != weights.size()) {
    throw ShapeError("population needs one weight per member");
  }
  CheckWeights(weights, "population weights");
}

TypeDistribution TypeDistribution::Uniform(const TypeSpace& types) {
  TypeDistribution mu;
  mu.support = types.JointTypes();
  mu.weights.assign(mu.support.size(), 1.0 / mu.support.size());
  return mu;
}

TypeDistribution TypeDistribution::PointMass(JointType joint) {
  return TypeDistribution{{joint}, {1.0}};
}

void TypeDistribution::Validate(const TypeSpace& types) const {
  if (support.size() != weights.size()) {
    throw ShapeError("type distribution needs one weight per joint type");
  }
  CheckWeights(weights, "type distribution");
  for (const JointType& j : support) {
    if (j.row < 0 || j.row >= types.size() || j.col < 0 || j.col >= types.size()) {
      throw RangeError("type distribution references an unknown type");
    }
  }
}

EpisodeTrace RunEpisode(const AgentSpec& row, const AgentSpec& col,
                        const TypeSpace& types, JointType joint, int horizon,
                        std::uint64_t seed) {
  if (horizon < 0) throw DomainError("horizon must be non-negative");
  AgentSpec row_spec = row;
  AgentSpec col_spec = col;
  row_spec.own_type = joint.row;
  col_spec.own_type = joint.col;

  EpisodeTrace trace;
  trace.joint_type = joint;
  trace.seed = seed;
  trace.row_agent = row.id;
  trace.col_agent = col.id;
  trace.history.reserve(horizon);
  trace.row_strategies.reserve(horizon);
  trace.col_strategies.reserve(horizon);

  AgentState rs = InitialState(row_spec, types, Player::kRow, horizon,
                               DeriveSeed(seed, 1));
  AgentState cs = InitialState(col_spec, types, Player::kCol, horizon,
                               DeriveSeed(seed, 2));
  std::mt19937_64 rng(DeriveSeed(seed, 0));
  for (int t = 0; t < horizon; ++t) {
    try {
      MixedStrategy sr = Act(row_spec, rs, trace.history);
      MixedStrategy sc = Act(col_spec, cs, trace.history);
      trace.row_phases.push_back(PhaseCode(rs));
      trace.col_phases.push_back(PhaseCode(cs));
      const int ar = SampleIndex(sr, rng);
      const int ac = SampleIndex(sc, rng);
      trace.history.push_back({ar, ac});
      trace.row_strategies.push_back(std::move(sr));
      trace.col_strategies.push_back(std::move(sc));
      rs = Observe(row_spec, std::move(rs), ar, ac);
      cs = Observe(col_spec, std::move(cs), ac, ar);
    } catch (const Error&) {
      RethrowWithContext("episode stage " + std::to_string(t) + ": ");
    }
  }
  return trace;
}

EpisodeDraw DrawEpisode(const Population& population, const TypeDistribution& mu,
                        std::uint64_t master_seed, std::int64_t index) {
  const std::uint64_t s = DeriveSeed(master_seed, static_cast<std::uint64_t>(index));
  std::mt19937_64 rng(s);
  const Eigen::Map<const Eigen::VectorXd> rho(
      population.weights.data(), static_cast<Eigen::Index>(population.weights.size()));
  const Eigen::Map<const Eigen::VectorXd> mw(
      mu.weights.data(), static_cast<Eigen::Index>(mu.weights.size()));
  EpisodeDraw d;
  d.row_member = SampleIndex(rho, rng);
  d.col_member = SampleIndex(rho, rng);
  d.joint = mu.support[SampleIndex(mw, rng)];
  d.seed = DeriveSeed(s, 0x5eedULL);
  return d;
}

Dataset GenerateDataset(const Population& population, const TypeDistribution& mu,
                        const TypeSpace& types, int episodes, int horizon,
                        std::uint64_t master_seed, int jobs) {
  population.Validate();
  mu.Validate(types);
  if (episodes < 0) throw DomainError("episode count must be non-negative");
  Dataset data;
  data.meta.version = kDatasetVersion;
  data.meta.horizon = horizon;
  data.meta.num_actions = types.num_actions();
  data.meta.type_space_hash = types.Hash();
  data.meta.master_seed = master_seed;
  data.meta.population_hash = PopulationHash(population);
  data.episodes.resize(episodes);
  ParallelFor(episodes, jobs, [&](int j) {
    const EpisodeDraw d = DrawEpisode(population, mu, master_seed, j);
    EpisodeTrace trace =
        RunEpisode(population.members[d.row_member], population.members[d.col_member],
                   types, d.joint, horizon, d.seed);
    data.episodes[j] = DatasetRecord{d.joint, std::move(trace.history)};
  });
  return data;
}

void WriteDataset(const Dataset& data, const TypeSpace& types, std::ostream& out) {
  nlohmann::ordered_json header;
  header["version"] = data.meta.version;
  header["T"] = data.meta.horizon;
  header["N"] = data.meta.num_actions;
  header["type_space_hash"] = HexHash(data.meta.type_space_hash);
  header["master_seed"] = data.meta.master_seed;
  header["population_hash"] = HexHash(data.meta.population_hash);
  header["n"] = data.episodes.size();
  out << header.dump() << '\n';
  for (const auto& rec : data.episodes) {
    nlohmann::ordered_json r;
    r["theta1"] = types.name(rec.types.row);
    r["theta2"] = types.name(rec.types.col);
    std::vector<int> flat;
    flat.reserve(2 * rec.history.size());
    for (const Stage& s : rec.history) {
      flat.push_back(s.row);
      flat.push_back(s.col);
    }
    r["actions"] = flat;
    out << r.dump() << '\n';
  }
}

void WriteDataset(const Dataset& data, const TypeSpace& types,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  WriteDataset(data, types, out);
}

Dataset ReadDataset(std::istream& in, const TypeSpace& types) {
  using nlohmann::json;
  std::string line;
  int line_no = 0;
  auto parse = [&](const std::string& text) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
  };
  if (!std::getline(in, line)) throw FormatError("dataset is empty", 1);
  ++line_no;
  Dataset data;
  std::int64_t expected = 0;
  try {
    const json h = parse(line);
    data.meta.version = h.at("version").get<int>();
    if (data.meta.version != kDatasetVersion) {
      throw FormatError("unsupported dataset version " +
                            std::to_string(data.meta.version),
                        line_no);
    }
    data.meta.horizon = h.at("T").get<int>();
    data.meta.num_actions = h.at("N").get<int>();
    data.meta.type_space_hash =
        ParseHexHash(h.at("type_space_hash").get<std::string>(), line_no);
    data.meta.master_seed = h.at("master_seed").get<std::uint64_t>();
    data.meta.population_hash =
        ParseHexHash(h.at("population_hash").get<std::string>(), line_no);
    expected = h.at("n").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad dataset header: ") + e.what(), line_no);
  }
  if (data.meta.type_space_hash != types.Hash()) {
    throw FormatError("dataset was generated for a different type space", line_no);
  }
  if (data.meta.num_actions != types.num_actions()) {
    throw FormatError("dataset action count does not match the type space", line_no);
  }
  const int n = data.meta.num_actions;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json r = parse(line);
    DatasetRecord rec;
    std::vector<int> flat;
    try {
      rec.types = {types.Index(r.at("theta1").get<std::string>()),
                   types.Index(r.at("theta2").get<std::string>())};
      flat = r.at("actions").get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad record: ") + e.what(), line_no);
    } catch (const RangeError& e) {
      throw FormatError(e.what(), line_no);
    }
    if (static_cast<int>(flat.size()) != 2 * data.meta.horizon) {
      throw FormatError("record must hold 2T actions", line_no);
    }
    for (size_t i = 0; i < flat.size(); i += 2) {
      if (flat[i] < 0 || flat[i] >= n || flat[i + 1] < 0 || flat[i + 1] >= n) {
        throw FormatError("action out of range", line_no);
      }
      rec.history.push_back({flat[i], flat[i + 1]});
    }
    data.episodes.push_back(std::move(rec));
  }
  if (static_cast<std::int64_t>(data.episodes.size()) != expected) {
    throw FormatError("header announces " + std::to_string(expected) +
                          " records but file holds " +
                          std::to_string(data.episodes.size()),
                      line_no);
  }
  return data;
}

Dataset ReadDataset(const std::string& path, const TypeSpace& types) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset '" + path + "'");
  try {
    return ReadDataset(in, types);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

FlattenedTable::FlattenedTable(int num_actions, int num_types, int horizon,
                               Player seat)
    : num_actions_(num_actions),
      num_types_(num_types),
      horizon_(horizon),
      seat_(seat) {
  std::size_t total = 0;
  std::size_t layer = 1;
  for (int t = 0; t < horizon; ++t) {
    offsets_.push_back(total);
    total += layer;
    layer *= static_cast<std::size_t>(num_actions) * num_actions;
  }
  offsets_.push_back(total);
  table_.resize(total * num_types);
  filled_.assign(total * num_types, false);
}

std::size_t FlattenedTable::Slot(int type, const History& history) const {
  std::size_t code = 0;
  for (const Stage& s : history) {
    code = code * num_actions_ * num_actions_ + s.row * num_actions_ + s.col;
  }
  return static_cast<std::size_t>(type) * offsets_.back() +
         offsets_[history.size()] + code;
}

MixedStrategy FlattenedTable::Lookup(int type, const History& history) const {
  if (type < 0 || type >= num_types_) throw RangeError("type index out of range");
  if (static_cast<int>(history.size()) >= horizon_) {
    return UniformStrategy(num_actions_);
  }
  const std::size_t slot = Slot(type, history);
  return filled_[slot] ? table_[slot] : UniformStrategy(num_actions_);
}

void FlattenedTable::Set(int type, const History& history, MixedStrategy strategy) {
  if (static_cast<int>(history.size()) >= horizon_) {
    throw RangeError("history longer than the flattened horizon");
  }
  const std::size_t slot = Slot(type, history);
  table_[slot] = std::move(strategy);
  filled_[slot] = true;
}

AgentSpec FlattenPopulation(const Population& population, const TypeSpace& types,
                            int horizon, Player seat) {
  population.Validate();
  const int n = types.num_actions();
  double leaves = std::pow(static_cast<double>(n), 2.0 * horizon);
  if (leaves > static_cast<double>(kMaxFlattenHistories)) {
    throw CapacityError("flattening enumerates N^(2T) = " +
                        FormatDouble(leaves) + " histories; cap is " +
                        std::to_string(kMaxFlattenHistories));
  }
  for (const auto& m : population.members) {
    if (!IsBehavioral(m)) {
      throw DomainError("member '" + m.id + "' has private randomness");
    }
  }
  auto table = std::make_shared<FlattenedTable>(n, types.size(), horizon, seat);
  const int members = static_cast<int>(population.members.size());

  for (int type = 0; type < types.size(); ++type) {
    std::vector<AgentSpec> specs = population.members;
    std::vector<AgentState> states;
    for (auto& s : specs) {
      s.own_type = type;
      states.push_back(InitialState(s, types, seat, horizon, 0));
    }
    Eigen::VectorXd posterior =
        Eigen::Map<const Eigen::VectorXd>(population.weights.data(), members);
    History history;

    std::function<void(const std::vector<AgentState>&, const Eigen::VectorXd&)>
        visit = [&](const std::vector<AgentState>& st, const Eigen::VectorXd& w) {
          std::vector<MixedStrategy> sigma;
          MixedStrategy mix = MixedStrategy::Zero(n);
          for (int m = 0; m < members; ++m) {
            sigma.push_back(Act(specs[m], st[m], history));
            mix += w(m) * sigma.back();
          }
          table->Set(type, history, mix / mix.sum());
          if (static_cast<int>(history.size()) + 1 >= horizon) return;
          for (int own = 0; own < n; ++own) {
            Eigen::VectorXd next_w(members);
            for (int m = 0; m < members; ++m) next_w(m) = w(m) * sigma[m](own);
            const double total = next_w.sum();
            if (!(total > 0.0)) continue;  // unreachable: Lookup stays uniform
            next_w /= total;
            for (int opp = 0; opp < n; ++opp) {
              std::vector<AgentState> next_st;
              next_st.reserve(members);
              for (int m = 0; m < members; ++m) {
                next_st.push_back(Observe(specs[m], st[m], own, opp));
              }
              history.push_back(seat == Player::kRow ? Stage{own, opp}
                                                     : Stage{opp, own});
              visit(next_st, next_w);
              history.pop_back();
            }
          }
        };
    if (horizon > 0) visit(states, posterior);
  }

  AgentSpec out;
  out.id = "flattened";
  out.params = FlattenedParams{std::move(table)};
  return out;
}

}  // namespace cooplab

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

#ifndef COOPLAB_POPULATION_H_
#define COOPLAB_POPULATION_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cooplab/agents.h"
#include "cooplab/game.h"

namespace cooplab {

// Keyed SplitMix64 mix of (master, index): independent per-episode streams
// regardless of execution order.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Uniform double in [0, 1) from the top 53 bits of one draw.
double UniformUnit(std::mt19937_64& rng);

// Index drawn from a probability vector; never returns a zero-mass index.
int SampleIndex(const Eigen::VectorXd& probs, std::mt19937_64& rng);

// Partner population C with sampling weights rho.
struct Population {
  std::vector<AgentSpec> members;
  std::vector<double> weights;

  void Validate() const;
};

// Distribution mu over joint types.
struct TypeDistribution {
  std::vector<JointType> support;
  std::vector<double> weights;

  static TypeDistribution Uniform(const TypeSpace& types);
  static TypeDistribution PointMass(JointType joint);
  void Validate(const TypeSpace& types) const;
};

// Hash of the population's serialized members and weights.
std::uint64_t PopulationHash(const Population& population);

// Plays one T-stage episode. Own types are bound from `joint`; each agent
// gets its own private stream derived from `seed`.
EpisodeTrace RunEpisode(const AgentSpec& row, const AgentSpec& col,
                        const TypeSpace& types, JointType joint, int horizon,
                        std::uint64_t seed);

struct DatasetRecord {
  JointType types;
  History history;
  bool operator==(const DatasetRecord&) const = default;
};

struct DatasetMetadata {
  int version = 1;
  int horizon = 0;
  int num_actions = 0;
  std::uint64_t type_space_hash = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t population_hash = 0;
  bool operator==(const DatasetMetadata&) const = default;
};

struct Dataset {
  DatasetMetadata meta;
  std::vector<DatasetRecord> episodes;
  int size() const { return static_cast<int>(episodes.size()); }
};

// Random choices behind dataset episode `index`.
struct EpisodeDraw {
  int row_member = 0;
  int col_member = 0;
  JointType joint;
  std::uint64_t seed = 0;  // passed to RunEpisode
};

EpisodeDraw DrawEpisode(const Population& population, const TypeDistribution& mu,
                        std::uint64_t master_seed, std::int64_t index);

// n self-play episodes: members drawn i.i.d. from rho, joint type from mu,
// episode j seeded with DeriveSeed(master_seed, j). Only types and
// histories are kept.
Dataset GenerateDataset(const Population& population, const TypeDistribution& mu,
                        const TypeSpace& types, int episodes, int horizon,
                        std::uint64_t master_seed, int jobs = 1);

// Line-delimited JSON: a header line, then one record per episode.
inline constexpr int kDatasetVersion = 1;
void WriteDataset(const Dataset& data, const TypeSpace& types, std::ostream& out);
void WriteDataset(const Dataset& data, const TypeSpace& types,
                  const std::string& path);
Dataset ReadDataset(std::istream& in, const TypeSpace& types);
Dataset ReadDataset(const std::string& path, const TypeSpace& types);

// Per-(type, history) strategy of a population collapsed into one agent.
class FlattenedTable {
 public:
  FlattenedTable(int num_actions, int num_types, int horizon, Player seat);

  int horizon() const { return horizon_; }
  Player seat() const { return seat_; }
  // Unreachable or out-of-horizon histories give the uniform strategy.
  MixedStrategy Lookup(int type, const History& history) const;
  void Set(int type, const History& history, MixedStrategy strategy);

 private:
  std::size_t Slot(int type, const History& history) const;

  int num_actions_;
  int num_types_;
  int horizon_;
  Player seat_;
  std::vector<std::size_t> offsets_;  // start of each history length
  std::vector<MixedStrategy> table_;
  std::vector<bool> filled_;
};

inline constexpr std::int64_t kMaxFlattenHistories = 1000000;

// Behavioral strategy equivalent to facing a member freshly drawn from rho:
// at each history the members are mixed by their posterior weight rho(m) *
// Pr[m produces the seat's own actions so far]. Throws CapacityError when
// N^(2 horizon) exceeds kMaxFlattenHistories.
AgentSpec FlattenPopulation(const Population& population, const TypeSpace& types,
                            int horizon, Player seat);

}  // namespace cooplab

#endif  // COOPLAB_POPULATION_H_

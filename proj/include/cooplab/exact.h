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

#ifndef COOPLAB_EXACT_H_
#define COOPLAB_EXACT_H_

// Exact evaluation of an episode by recursion over the history tree. Each
// branch is weighted by the agents' announced mixed strategies, so only
// behavioral agents are accepted.

#include <utility>
#include <vector>

#include "cooplab/agents.h"
#include "cooplab/game.h"

namespace cooplab {

// Largest history tree (N^{2T} leaves) the exact routines will walk.
inline constexpr double kMaxExactLeaves = 531441.0;

struct WeightedHistory {
  History history;
  double probability = 0.0;
};

// Every reachable length-T history with its probability, in lexicographic
// order of (row, col) actions per stage.
std::vector<WeightedHistory> EnumerateHistories(const AgentSpec& row,
                                                const AgentSpec& col,
                                                const TypeSpace& types,
                                                JointType joint, int horizon);

// Expected total payoff over T stages for (row, col).
std::pair<double, double> ExactEpisodeValue(const AgentSpec& row,
                                            const AgentSpec& col,
                                            const TypeSpace& types,
                                            JointType joint, int horizon);

}  // namespace cooplab

#endif  // COOPLAB_EXACT_H_

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

#ifndef COOPLAB_CONFIG_H_
#define COOPLAB_CONFIG_H_

// JSON forms of agent specs, convention tables, populations and type
// distributions.
//
// Agent spec:   {"id": "p0", "kind": "protocol", "k": 2, "delta": 0.1,
//                "conventions": "first-pone"}
// Population:   {"game": "<game file, relative>", "normalize": true,
//                "members": [{...spec..., "weight": 0.5}, ...]}
// Distribution: {"uniform": true} or
//               {"support": [["a", "b"], ...], "weights": [...]}

#include <memory>
#include <string>

#include "cooplab/agents.h"
#include "cooplab/population.h"
#include "json.hpp"

namespace cooplab {

nlohmann::json ReadJsonFile(const std::string& path);

// `horizon` resolves protocol parameters given as a confidence level
// ("delta") into the convention-phase tolerance eps1.
AgentSpec ParseAgentSpec(const nlohmann::json& j, const TypeSpace& types,
                         int horizon);
// Imitate-then-commit and flattened agents serialize their kind and id only.
nlohmann::ordered_json AgentSpecToJson(const AgentSpec& spec,
                                       const TypeSpace* types = nullptr);

// Accepts "first-pone", "last-pone" or an explicit list of
// {"theta1", "theta2", "sigma_row", "sigma_col"} entries. The result is
// validated against the PONE solver.
std::shared_ptr<const ConventionTable> ParseConventions(const nlohmann::json& j,
                                                        const TypeSpace& types);
// Type names when `types` is given, indices otherwise.
nlohmann::ordered_json ConventionTableToJson(const ConventionTable& table,
                                             const TypeSpace* types = nullptr);

Population ParsePopulation(const nlohmann::json& j, const TypeSpace& types,
                           int horizon);

struct PopulationFile {
  TypeSpace types;
  Population population;
};

// Reads the population and the game file it references.
PopulationFile LoadPopulationFile(const std::string& path, int horizon);

TypeDistribution ParseTypeDistribution(const nlohmann::json& j,
                                       const TypeSpace& types);
TypeDistribution LoadTypeDistribution(const std::string& path,
                                      const TypeSpace& types);

}  // namespace cooplab

#endif  // COOPLAB_CONFIG_H_

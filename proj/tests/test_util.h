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

#ifndef COOPLAB_TESTS_TEST_UTIL_H_
#define COOPLAB_TESTS_TEST_UTIL_H_

#include <random>
#include <string>

#include "cooplab/game.h"
#include "cooplab/population.h"

namespace cooplab::testing {

inline std::string DataPath(const std::string& rel) {
  return std::string(COOPLAB_DATA_DIR) + "/" + rel;
}

inline Eigen::MatrixXd RandomMatrix(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = UniformUnit(rng);
  }
  return m;
}

inline BimatrixGame RandomGame(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd a = RandomMatrix(n, rng);
  Eigen::MatrixXd b = RandomMatrix(n, rng);
  return BimatrixGame(std::move(a), std::move(b));
}

inline MixedStrategy RandomStrategy(int n, std::mt19937_64& rng) {
  MixedStrategy s(n);
  for (int i = 0; i < n; ++i) s(i) = -std::log(1.0 - UniformUnit(rng));
  return s / s.sum();
}

inline TypeSpace Table1a() { return LoadTypeSpace(DataPath("games/table1a.json")); }
inline TypeSpace Table1b() { return LoadTypeSpace(DataPath("games/table1b.json")); }

}  // namespace cooplab::testing

#endif  // COOPLAB_TESTS_TEST_UTIL_H_

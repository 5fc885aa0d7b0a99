// Copyright 2026 The mailnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Random instance generators for property tests.

#include <cstddef>
#include <random>

#include "mailnet/grid.hpp"
#include "mailnet/tree.hpp"

namespace mailnet::testing {

struct TreeCase {
  EmbeddedTree tree;
  MailingPlan plan;
};

// Random planar tree with 1..max_edges edges, random terminals (sources and
// sinks may share vertices) and a plan with 1..max_pairs positive entries.
TreeCase random_tree_case(std::mt19937_64& rng, std::size_t max_edges = 10,
                          std::size_t max_pairs = 6);

// Flat-Dirichlet point of the simplex with n entries.
SimplexWeights random_simplex(std::mt19937_64& rng, std::size_t n);

}  // namespace mailnet::testing

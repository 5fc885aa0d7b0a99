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

// Sparse weighted-Laplacian plumbing shared by the potential solvers.

#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "mailnet/grid.hpp"

namespace mailnet::detail {

// Component label per node for the graph whose edges are those with
// weight > 0. Labels are dense and ordered by smallest node index.
std::vector<int> positive_edge_components(const Grid& grid,
                                          std::span<const double> weight);

// Compact numbering of one component with its gauge node removed.
struct ReducedIndex {
  std::vector<int> of_node;       // -1 when the node is not an unknown
  std::vector<NodeIndex> nodes;   // unknown -> node
  std::size_t size() const { return nodes.size(); }
};

ReducedIndex reduce_component(std::span<const int> labels, int label,
                              NodeIndex gauge);

// Sum_e w_e (u_lo - u_hi)^2 as a matrix over the reduced unknowns, plus
// ridge on the diagonal. Edges touching the gauge node keep their diagonal
// contribution.
Eigen::SparseMatrix<double> assemble_laplacian(const Grid& grid,
                                               const ReducedIndex& index,
                                               std::span<const double> w,
                                               double ridge);

}  // namespace mailnet::detail

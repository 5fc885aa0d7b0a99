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

#include "laplacian.hpp"

#include <numeric>

namespace mailnet::detail {
namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<int> positive_edge_components(const Grid& grid,
                                          std::span<const double> weight) {
  const int n = static_cast<int>(grid.node_count());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto edges = grid.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!(weight[e] > 0.0)) continue;
    const int a = find_root(parent, edges[e].lo);
    const int b = find_root(parent, edges[e].hi);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> label(n, -1);
  std::vector<int> root_label(n, -1);
  int next = 0;
  for (int z = 0; z < n; ++z) {
    const int r = find_root(parent, z);
    if (root_label[r] < 0) root_label[r] = next++;
    label[z] = root_label[r];
  }
  return label;
}

ReducedIndex reduce_component(std::span<const int> labels, int label,
                              NodeIndex gauge) {
  ReducedIndex idx;
  idx.of_node.assign(labels.size(), -1);
  for (std::size_t z = 0; z < labels.size(); ++z) {
    if (labels[z] != label || static_cast<NodeIndex>(z) == gauge) continue;
    idx.of_node[z] = static_cast<int>(idx.nodes.size());
    idx.nodes.push_back(static_cast<NodeIndex>(z));
  }
  return idx;
}

Eigen::SparseMatrix<double> assemble_laplacian(const Grid& grid,
                                               const ReducedIndex& index,
                                               std::span<const double> w,
                                               double ridge) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  triplets.reserve(4 * grid.edge_count() + index.size());
  const auto edges = grid.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!(w[e] > 0.0)) continue;
    const int a = index.of_node[edges[e].lo];
    const int b = index.of_node[edges[e].hi];
    if (a >= 0) triplets.emplace_back(a, a, w[e]);
    if (b >= 0) triplets.emplace_back(b, b, w[e]);
    if (a >= 0 && b >= 0) {
      triplets.emplace_back(a, b, -w[e]);
      triplets.emplace_back(b, a, -w[e]);
    }
  }
  if (ridge > 0.0) {
    for (std::size_t i = 0; i < index.size(); ++i) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), ridge);
    }
  }
  const int n = static_cast<int>(index.size());
  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return mat;
}

}  // namespace mailnet::detail

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

#include "testing/random_instances.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

namespace mailnet::testing {

TreeCase random_tree_case(std::mt19937_64& rng, std::size_t max_edges,
                          std::size_t max_pairs) {
  std::uniform_int_distribution<std::size_t> edge_count(1, max_edges);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  const std::size_t ne = edge_count(rng);
  const std::size_t nv = ne + 1;

  std::vector<Point> vertices(nv);
  for (Point& p : vertices) p = {coord(rng), coord(rng), 0.0};
  std::vector<TreeEdge> edges;
  for (std::size_t v = 1; v < nv; ++v) {
    std::uniform_int_distribution<std::size_t> parent(0, v - 1);
    edges.push_back({parent(rng), v});
  }

  std::vector<std::size_t> order(nv);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t max_terminals = std::min<std::size_t>(3, nv);
  std::uniform_int_distribution<std::size_t> terminal_count(1, max_terminals);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> sources(order.begin(),
                                   order.begin() + terminal_count(rng));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> sinks(order.begin(), order.begin() + terminal_count(rng));

  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = 0; j < sinks.size(); ++j) keys.push_back({i, j});
  }
  std::shuffle(keys.begin(), keys.end(), rng);
  std::uniform_int_distribution<std::size_t> pair_count(
      1, std::min(max_pairs, keys.size()));
  keys.resize(pair_count(rng));
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::vector<PlanEntry> entries;
  double total = 0.0;
  for (const auto& [i, j] : keys) {
    entries.push_back({i, j, mass(rng)});
    total += entries.back().mass;
  }
  for (PlanEntry& e : entries) e.mass /= total;

  const std::size_t ns = sources.size();
  const std::size_t nk = sinks.size();
  return {EmbeddedTree::create(2, std::move(vertices), std::move(edges),
                               std::move(sources), std::move(sinks)),
          MailingPlan::create(ns, nk, std::move(entries))};
}

SimplexWeights random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> v(n);
  for (double& x : v) x = draw(rng);
  return SimplexWeights::normalized(std::move(v));
}

}  // namespace mailnet::testing

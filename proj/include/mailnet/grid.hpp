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

// Discrete geometry: the grid Z with its axis-aligned neighbor structure,
// terminals, the prescribed mailing plan, and points of the simplex S(Z).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mailnet {

using NodeIndex = std::int32_t;

// A maximal block of edges along one axis whose low endpoints are contiguous
// node indices; the high endpoint of edge k is lo + stride. Kernels work on
// whole runs so that both endpoint arrays are unit-stride.
struct EdgeRun {
  int axis = 0;
  std::size_t first_edge = 0;
  NodeIndex first_lo = 0;
  std::size_t count = 0;
  NodeIndex stride = 1;
};

struct Edge {
  NodeIndex lo = 0;
  NodeIndex hi = 0;
};

class Grid {
 public:
  // dims has 1 to 3 entries, each >= 2; spacing > 0. Throws InputError.
  static Grid build(std::span<const int> dims, double spacing);

  int dimension() const { return static_cast<int>(dims_.size()); }
  std::span<const int> dims() const { return dims_; }
  double spacing() const { return spacing_; }
  std::size_t node_count() const { return inv_degree_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const NodeIndex> neighbors(NodeIndex z) const {
    return {adjacency_.data() + offsets_[z],
            adjacency_.data() + offsets_[z + 1]};
  }
  int degree(NodeIndex z) const {
    return static_cast<int>(offsets_[z + 1] - offsets_[z]);
  }
  // 1/|N(z)| for every node.
  std::span<const double> inv_degrees() const { return inv_degree_; }

  std::span<const EdgeRun> edge_runs() const { return runs_; }
  std::span<const Edge> edges() const { return edges_; }

  std::array<int, 3> multi_index(NodeIndex z) const;
  NodeIndex node_at(std::span<const int> index) const;
  // Physical coordinates: multi-index times spacing, padded with zeros to 3.
  std::array<double, 3> position(NodeIndex z) const;

  // Nearest grid node to a physical point (coordinates beyond dimension()
  // are ignored); clamps to the grid box. Reports the Euclidean snap distance.
  NodeIndex nearest_node(std::span<const double> point,
                         double* snap_distance = nullptr) const;

  bool contains(NodeIndex z) const {
    return z >= 0 && static_cast<std::size_t>(z) < node_count();
  }

 private:
  Grid() = default;

  std::vector<int> dims_;
  std::array<NodeIndex, 3> strides_{1, 1, 1};
  double spacing_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeIndex> adjacency_;
  std::vector<double> inv_degree_;
  std::vector<EdgeRun> runs_;
  std::vector<Edge> edges_;
};

// Sources A and sinks B as grid nodes. Lists are nonempty with distinct
// entries; A and B may share nodes.
class TerminalSet {
 public:
  static TerminalSet create(const Grid& grid, std::vector<NodeIndex> sources,
                            std::vector<NodeIndex> sinks);

  std::span<const NodeIndex> sources() const { return sources_; }
  std::span<const NodeIndex> sinks() const { return sinks_; }

 private:
  std::vector<NodeIndex> sources_;
  std::vector<NodeIndex> sinks_;
};

struct PlanEntry {
  std::size_t source = 0;  // index into the source list
  std::size_t sink = 0;    // index into the sink list
  double mass = 0.0;
};

struct Marginals {
  std::vector<double> source;  // f+
  std::vector<double> sink;    // f-
};

// The prescribed plan pi(i, j): positive masses on distinct (i, j) keys
// summing to one.
class MailingPlan {
 public:
  static constexpr double kMassTolerance = 1e-12;

  static MailingPlan create(std::size_t source_count, std::size_t sink_count,
                            std::vector<PlanEntry> entries);

  std::size_t source_count() const { return source_count_; }
  std::size_t sink_count() const { return sink_count_; }
  std::span<const PlanEntry> entries() const { return entries_; }

 private:
  std::size_t source_count_ = 0;
  std::size_t sink_count_ = 0;
  std::vector<PlanEntry> entries_;
};

Marginals plan_marginals(const MailingPlan& plan);

// A plan entry resolved to grid nodes.
struct NodePair {
  NodeIndex source = 0;
  NodeIndex sink = 0;
  double mass = 0.0;
};

std::vector<NodePair> resolve_pairs(const TerminalSet& terminals,
                                    const MailingPlan& plan);

// A point m of the simplex S(Z).
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Validates nonnegativity and unit sum.
  static SimplexWeights from_values(std::vector<double> values);
  // Rescales nonnegative values to unit sum first.
  static SimplexWeights normalized(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

SimplexWeights uniform_weights(const Grid& grid);

}  // namespace mailnet

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

// Reading a network off a solved measure m: threshold the weights, keep the
// component holding the terminals, prune dangling spurs and, when no cycle
// remains, emit the embedded tree and its Gilbert cost.

#include <optional>
#include <span>
#include <vector>

#include "mailnet/grid.hpp"
#include "mailnet/tree.hpp"

namespace mailnet {

struct SupportGraph {
  double threshold = 0.0;        // tau * max m
  std::vector<NodeIndex> nodes;  // ascending
  std::vector<Edge> edges;       // grid edges with both ends in nodes
  std::vector<double> lengths;   // physical, = spacing
  std::vector<double> weights;   // (m(lo) + m(hi)) / 2
};

// Nodes with m >= tau * max m plus every terminal of a plan entry.
// tau in (0, 1].
SupportGraph support_graph(const Grid& grid, const SimplexWeights& m,
                           const TerminalSet& terminals, const MailingPlan& plan,
                           double tau);

struct TreeifyResult {
  int component_count = 0;   // of the support graph
  int support_cycle_count = 0;  // |E| - |V| + components of the support graph
  bool terminals_connected = false;
  // Component label per support node (same order as SupportGraph::nodes).
  std::vector<int> labels;
  int pruned = 0;        // removed non-terminal leaves
  int cycle_count = 0;   // |E| - |V| + 1 on the pruned terminal component
  std::vector<NodeIndex> nodes;  // pruned terminal component
  std::vector<Edge> edges;
  std::optional<EmbeddedTree> tree;  // only when acyclic and connected
};

TreeifyResult prune_and_treeify(const Grid& grid, const SupportGraph& graph,
                                const TerminalSet& terminals,
                                const MailingPlan& plan);

// Replaces every chain of degree-2 non-terminal vertices by one straight
// segment between its ends.
EmbeddedTree straight_skeleton(const EmbeddedTree& tree);

struct BranchVertex {
  Point position{};
  int degree = 0;
};

// is_tree holds exactly when the support graph has no cycle and the
// terminals share one component.
struct ExtractionReport {
  bool is_tree = false;
  int component_count = 0;
  int cycle_count = 0;  // |E| - |V| + components of the support graph
  int pruned = 0;
  std::vector<double> orbit_lengths;  // per plan entry, along the tree
  std::vector<BranchVertex> branch_vertices;
  double gilbert_cost = 0.0;           // along the grid path
  double skeleton_gilbert_cost = 0.0;  // straight between branch points
  double length = 0.0;                 // used length along the grid path
  double skeleton_length = 0.0;
  std::optional<double> oracle_value;
  std::optional<double> oracle_gap;  // skeleton cost / oracle - 1
};

// Costs, orbits and branch vertices of a tree in the class (A, B, pi).
ExtractionReport evaluate_extraction(const EmbeddedTree& tree,
                                     const MailingPlan& plan, double sigma,
                                     std::optional<double> oracle_value = {});

// support_graph, prune_and_treeify and evaluate_extraction in sequence.
ExtractionReport extract(const Grid& grid, const SimplexWeights& m,
                         const TerminalSet& terminals, const MailingPlan& plan,
                         double sigma, double tau,
                         std::optional<double> oracle_value = {},
                         TreeifyResult* treeify = nullptr);

}  // namespace mailnet

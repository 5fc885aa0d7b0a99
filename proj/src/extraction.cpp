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

#include "mailnet/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "mailnet/error.hpp"

namespace mailnet {
namespace {

constexpr int kAbsent = -1;

std::vector<NodeIndex> all_terminals(const TerminalSet& terminals) {
  std::vector<NodeIndex> out(terminals.sources().begin(),
                             terminals.sources().end());
  out.insert(out.end(), terminals.sinks().begin(), terminals.sinks().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_plan(const TerminalSet& terminals, const MailingPlan& plan) {
  if (plan.source_count() != terminals.sources().size() ||
      plan.sink_count() != terminals.sinks().size()) {
    throw InputError("plan and terminal set disagree on the number of terminals");
  }
}

}  // namespace

SupportGraph support_graph(const Grid& grid, const SimplexWeights& m,
                           const TerminalSet& terminals, const MailingPlan& plan,
                           double tau) {
  check_plan(terminals, plan);
  if (m.size() != grid.node_count()) {
    throw InputError("weights do not match the grid");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw InputError("support threshold tau must lie in (0, 1]");
  }
  const auto values = m.values();
  const double peak = *std::max_element(values.begin(), values.end());

  SupportGraph graph;
  graph.threshold = tau * peak;
  std::vector<char> keep(grid.node_count(), 0);
  for (std::size_t z = 0; z < values.size(); ++z) {
    if (values[z] > 0.0 && values[z] >= graph.threshold) keep[z] = 1;
  }
  for (NodeIndex t : all_terminals(terminals)) keep[t] = 1;

  for (std::size_t z = 0; z < keep.size(); ++z) {
    if (keep[z]) graph.nodes.push_back(static_cast<NodeIndex>(z));
  }
  for (const Edge& e : grid.edges()) {
    if (!keep[e.lo] || !keep[e.hi]) continue;
    graph.edges.push_back(e);
    graph.lengths.push_back(grid.spacing());
    graph.weights.push_back(0.5 * (values[e.lo] + values[e.hi]));
  }
  return graph;
}

TreeifyResult prune_and_treeify(const Grid& grid, const SupportGraph& graph,
                                const TerminalSet& terminals,
                                const MailingPlan& plan) {
  check_plan(terminals, plan);
  const std::size_t n = graph.nodes.size();
  std::vector<int> local(grid.node_count(), kAbsent);
  for (std::size_t i = 0; i < n; ++i) {
    local[graph.nodes[i]] = static_cast<int>(i);
  }
  const auto terminal_nodes = all_terminals(terminals);
  for (NodeIndex t : terminal_nodes) {
    if (local[t] == kAbsent) {
      throw InputError("support graph is missing terminal node " +
                       std::to_string(t));
    }
  }

  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const int a = local[graph.edges[e].lo];
    const int b = local[graph.edges[e].hi];
    if (a == kAbsent || b == kAbsent) {
      throw InputError("support edge leaves the node set");
    }
    incident[a].push_back(e);
    incident[b].push_back(e);
  }
  auto other = [&](std::size_t e, int v) {
    const int a = local[graph.edges[e].lo];
    return a == v ? local[graph.edges[e].hi] : a;
  };

  TreeifyResult result;
  result.labels.assign(n, kAbsent);
  for (std::size_t s = 0; s < n; ++s) {
    if (result.labels[s] != kAbsent) continue;
    const int label = result.component_count++;
    std::deque<int> queue{static_cast<int>(s)};
    result.labels[s] = label;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (std::size_t e : incident[v]) {
        const int w = other(e, v);
        if (result.labels[w] == kAbsent) {
          result.labels[w] = label;
          queue.push_back(w);
        }
      }
    }
  }

  result.support_cycle_count = static_cast<int>(graph.edges.size()) -
                               static_cast<int>(n) + result.component_count;

  const int root = result.labels[local[terminal_nodes.front()]];
  result.terminals_connected = std::all_of(
      terminal_nodes.begin(), terminal_nodes.end(),
      [&](NodeIndex t) { return result.labels[local[t]] == root; });
  if (!result.terminals_connected) return result;

  std::vector<char> alive(n, 0);
  std::vector<char> is_terminal(n, 0);
  std::vector<int> degree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (result.labels[v] == root) alive[v] = 1;
  }
  for (NodeIndex t : terminal_nodes) is_terminal[local[t]] = 1;
  for (std::size_t v = 0; v < n; ++v) {
    if (alive[v]) degree[v] = static_cast<int>(incident[v].size());
  }
  std::deque<int> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (alive[v] && !is_terminal[v] && degree[v] <= 1) {
      leaves.push_back(static_cast<int>(v));
    }
  }
  while (!leaves.empty()) {
    const int v = leaves.front();
    leaves.pop_front();
    if (!alive[v]) continue;
    alive[v] = 0;
    ++result.pruned;
    for (std::size_t e : incident[v]) {
      const int w = other(e, v);
      if (!alive[w]) continue;
      if (--degree[w] <= 1 && !is_terminal[w]) leaves.push_back(w);
    }
  }

  std::vector<std::size_t> tree_index(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    tree_index[v] = result.nodes.size();
    result.nodes.push_back(graph.nodes[v]);
  }
  for (const Edge& e : graph.edges) {
    if (alive[local[e.lo]] && alive[local[e.hi]]) result.edges.push_back(e);
  }
  result.cycle_count = static_cast<int>(result.edges.size()) -
                       static_cast<int>(result.nodes.size()) + 1;
  if (result.cycle_count != 0) return result;

  std::vector<Point> vertices;
  vertices.reserve(result.nodes.size());
  for (NodeIndex z : result.nodes) vertices.push_back(grid.position(z));
  std::vector<TreeEdge> edges;
  edges.reserve(result.edges.size());
  for (const Edge& e : result.edges) {
    edges.push_back({tree_index[local[e.lo]], tree_index[local[e.hi]]});
  }
  std::vector<std::size_t> sources, sinks;
  for (NodeIndex t : terminals.sources()) sources.push_back(tree_index[local[t]]);
  for (NodeIndex t : terminals.sinks()) sinks.push_back(tree_index[local[t]]);
  result.tree = EmbeddedTree::create(grid.dimension(), std::move(vertices),
                                     std::move(edges), std::move(sources),
                                     std::move(sinks));
  return result;
}

EmbeddedTree straight_skeleton(const EmbeddedTree& tree) {
  const std::size_t n = tree.vertex_count();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    incident[tree.edges()[e].a].push_back(e);
    incident[tree.edges()[e].b].push_back(e);
  }
  std::vector<char> key(n, 0);
  for (std::size_t v = 0; v < n; ++v) key[v] = incident[v].size() != 2;
  for (std::size_t v : tree.sources()) key[v] = 1;
  for (std::size_t v : tree.sinks()) key[v] = 1;

  std::vector<std::size_t> renumber(n, 0);
  std::vector<Point> vertices;
  for (std::size_t v = 0; v < n; ++v) {
    if (!key[v]) continue;
    renumber[v] = vertices.size();
    vertices.push_back(tree.vertices()[v]);
  }
  std::vector<TreeEdge> edges;
  for (std::size_t start = 0; start < n; ++start) {
    if (!key[start]) continue;
    for (std::size_t first : incident[start]) {
      std::size_t prev = start;
      std::size_t edge = first;
      std::size_t cur = tree.edges()[edge].a == prev ? tree.edges()[edge].b
                                                     : tree.edges()[edge].a;
      while (!key[cur]) {
        edge = incident[cur][0] == edge ? incident[cur][1] : incident[cur][0];
        prev = cur;
        cur = tree.edges()[edge].a == prev ? tree.edges()[edge].b
                                           : tree.edges()[edge].a;
      }
      if (start < cur) edges.push_back({renumber[start], renumber[cur]});
    }
  }
  std::vector<std::size_t> sources, sinks;
  for (std::size_t v : tree.sources()) sources.push_back(renumber[v]);
  for (std::size_t v : tree.sinks()) sinks.push_back(renumber[v]);
  return EmbeddedTree::create(tree.dimension(), std::move(vertices),
                              std::move(edges), std::move(sources),
                              std::move(sinks));
}

ExtractionReport evaluate_extraction(const EmbeddedTree& tree,
                                     const MailingPlan& plan, double sigma,
                                     std::optional<double> oracle_value) {
  ExtractionReport report;
  report.is_tree = true;
  report.component_count = 1;

  const EdgeFlow flows = compute_edge_flows(tree, plan);
  report.gilbert_cost = gilbert_cost(tree, flows, sigma);
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    if (flows.flow[e] > 0.0) report.length += tree.lengths()[e];
  }

  const EmbeddedTree skeleton = straight_skeleton(tree);
  const EdgeFlow skeleton_flows = compute_edge_flows(skeleton, plan);
  report.skeleton_gilbert_cost = gilbert_cost(skeleton, skeleton_flows, sigma);
  for (std::size_t e = 0; e < skeleton.edge_count(); ++e) {
    if (skeleton_flows.flow[e] > 0.0) {
      report.skeleton_length += skeleton.lengths()[e];
    }
  }

  for (const PlanEntry& entry : plan.entries()) {
    double length = 0.0;
    for (std::size_t e : tree.find_orbit(tree.sources()[entry.source],
                                         tree.sinks()[entry.sink])) {
      length += tree.lengths()[e];
    }
    report.orbit_lengths.push_back(length);
  }

  std::vector<int> degree(tree.vertex_count(), 0);
  for (const TreeEdge& e : tree.edges()) {
    ++degree[e.a];
    ++degree[e.b];
  }
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) {
    if (degree[v] >= 3) {
      report.branch_vertices.push_back({tree.vertices()[v], degree[v]});
    }
  }

  if (oracle_value) {
    report.oracle_value = oracle_value;
    if (*oracle_value > 0.0) {
      report.oracle_gap = report.skeleton_gilbert_cost / *oracle_value - 1.0;
    }
  }
  return report;
}

ExtractionReport extract(const Grid& grid, const SimplexWeights& m,
                         const TerminalSet& terminals, const MailingPlan& plan,
                         double sigma, double tau,
                         std::optional<double> oracle_value,
                         TreeifyResult* treeify) {
  const SupportGraph graph = support_graph(grid, m, terminals, plan, tau);
  TreeifyResult pruned = prune_and_treeify(grid, graph, terminals, plan);

  ExtractionReport report;
  if (pruned.tree) {
    report = evaluate_extraction(*pruned.tree, plan, sigma, oracle_value);
  } else {
    report.oracle_value = oracle_value;
  }
  report.is_tree = pruned.tree.has_value() && pruned.support_cycle_count == 0;
  report.component_count = pruned.component_count;
  report.cycle_count = pruned.support_cycle_count;
  report.pruned = pruned.pruned;
  if (treeify) *treeify = std::move(pruned);
  return report;
}

}  // namespace mailnet

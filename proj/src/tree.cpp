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

#include "mailnet/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "mailnet/error.hpp"

namespace mailnet {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_plan_fits(const EmbeddedTree& tree, const MailingPlan& plan) {
  if (plan.source_count() > tree.sources().size() ||
      plan.sink_count() > tree.sinks().size()) {
    throw InputError("plan refers to terminals that the tree does not realize");
  }
}

double power_or_zero(double w, double exponent) {
  return w > 0.0 ? std::pow(w, exponent) : 0.0;
}

}  // namespace

double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

EmbeddedTree EmbeddedTree::create(int dimension, std::vector<Point> vertices,
                                  std::vector<TreeEdge> edges,
                                  std::vector<std::size_t> sources,
                                  std::vector<std::size_t> sinks) {
  if (dimension < 1 || dimension > 3) {
    throw InputError("tree dimension must be 1, 2 or 3");
  }
  const std::size_t n = vertices.size();
  if (n == 0) throw InputError("tree has no vertices");
  if (edges.size() + 1 != n) {
    throw InputError("tree needs |edges| = |vertices| - 1, got " +
                     std::to_string(edges.size()) + " edges for " +
                     std::to_string(n) + " vertices");
  }
  for (const Point& p : vertices) {
    for (int k = dimension; k < 3; ++k) {
      if (p[k] != 0.0) throw InputError("vertex coordinate beyond dimension");
    }
  }

  EmbeddedTree t;
  t.dimension_ = dimension;
  t.lengths_.reserve(edges.size());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (a >= n || b >= n) throw InputError("edge endpoint out of range");
    if (a == b) throw InputError("self-loop edge");
    const double len = distance(vertices[a], vertices[b]);
    if (!(len > 0.0)) {
      throw InputError("edge " + std::to_string(e) + " has zero length");
    }
    t.lengths_.push_back(len);
    adj[a].push_back({b, e});
    adj[b].push_back({a, e});
  }

  t.parent_.assign(n, kNone);
  t.parent_edge_.assign(n, kNone);
  t.depth_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> queue;
  queue.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (const auto& [u, e] : adj[v]) {
      if (e == t.parent_edge_[v]) continue;
      if (seen[u]) throw InputError("tree contains a cycle");
      seen[u] = true;
      ++reached;
      t.parent_[u] = v;
      t.parent_edge_[u] = e;
      t.depth_[u] = t.depth_[v] + 1;
      queue.push(u);
    }
  }
  if (reached != n) throw InputError("tree is disconnected");

  for (std::size_t v : sources) {
    if (v >= n) throw InputError("source vertex out of range");
  }
  for (std::size_t v : sinks) {
    if (v >= n) throw InputError("sink vertex out of range");
  }
  t.vertices_ = std::move(vertices);
  t.edges_ = std::move(edges);
  t.sources_ = std::move(sources);
  t.sinks_ = std::move(sinks);
  return t;
}

double EmbeddedTree::total_length() const {
  double s = 0.0;
  for (double l : lengths_) s += l;
  return s;
}

std::vector<std::size_t> EmbeddedTree::find_orbit(std::size_t from,
                                                  std::size_t to) const {
  if (from >= vertices_.size() || to >= vertices_.size()) {
    throw InputError("orbit endpoint is not a tree vertex");
  }
  std::vector<std::size_t> head;
  std::vector<std::size_t> tail;
  std::size_t a = from;
  std::size_t b = to;
  while (depth_[a] > depth_[b]) {
    head.push_back(parent_edge_[a]);
    a = parent_[a];
  }
  while (depth_[b] > depth_[a]) {
    tail.push_back(parent_edge_[b]);
    b = parent_[b];
  }
  while (a != b) {
    head.push_back(parent_edge_[a]);
    a = parent_[a];
    tail.push_back(parent_edge_[b]);
    b = parent_[b];
  }
  head.insert(head.end(), tail.rbegin(), tail.rend());
  return head;
}

EdgeFlow compute_edge_flows(const EmbeddedTree& tree, const MailingPlan& plan) {
  check_plan_fits(tree, plan);
  EdgeFlow f;
  f.flow.assign(tree.edge_count(), 0.0);
  f.signed_flow.assign(tree.edge_count(), 0.0);
  for (const PlanEntry& entry : plan.entries()) {
    std::size_t at = tree.sources()[entry.source];
    const std::size_t to = tree.sinks()[entry.sink];
    for (std::size_t e : tree.find_orbit(at, to)) {
      const TreeEdge& edge = tree.edges()[e];
      f.flow[e] += entry.mass;
      if (edge.a == at) {
        f.signed_flow[e] += entry.mass;
        at = edge.b;
      } else {
        f.signed_flow[e] -= entry.mass;
        at = edge.a;
      }
    }
  }
  return f;
}

double kirchhoff_residual(const EmbeddedTree& tree, const MailingPlan& plan,
                          const EdgeFlow& flows) {
  check_plan_fits(tree, plan);
  std::vector<double> net(tree.vertex_count(), 0.0);
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    net[tree.edges()[e].a] += flows.signed_flow[e];
    net[tree.edges()[e].b] -= flows.signed_flow[e];
  }
  const Marginals marg = plan_marginals(plan);
  for (std::size_t i = 0; i < marg.source.size(); ++i) {
    net[tree.sources()[i]] -= marg.source[i];
  }
  for (std::size_t j = 0; j < marg.sink.size(); ++j) {
    net[tree.sinks()[j]] += marg.sink[j];
  }
  double worst = 0.0;
  for (double r : net) worst = std::max(worst, std::abs(r));
  return worst;
}

double gilbert_cost(const EmbeddedTree& tree, const EdgeFlow& flows,
                    double sigma) {
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw InputError("sigma must lie in [0, 1)");
  }
  double g = 0.0;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    // Unused edges never count, including sigma = 0 where 0^0 would be 1.
    if (flows.flow[e] > 0.0) g += std::pow(flows.flow[e], sigma) * tree.lengths()[e];
  }
  return g;
}

double gilbert_cost(const EmbeddedTree& tree, const MailingPlan& plan,
                    double sigma) {
  return gilbert_cost(tree, compute_edge_flows(tree, plan), sigma);
}

double budget_used(const EmbeddedTree& tree, const CostBudget& budget) {
  double used = 0.0;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    used += tree.lengths()[e] * budget.s[e];
  }
  return used;
}

double transport_cost(const EmbeddedTree& tree, const CostBudget& budget,
                      const EdgeFlow& flows) {
  if (budget.s.size() != tree.edge_count()) {
    throw InputError("budget size does not match the tree");
  }
  if (!(budget.alpha > 0.0)) throw InputError("alpha must be positive");
  for (double s : budget.s) {
    if (!(s >= 0.0)) throw InputError("budget entries must be nonnegative");
  }
  if (budget_used(tree, budget) > 1.0 + kBudgetTolerance) {
    throw InputError("budget exceeds the unit construction limit");
  }
  double h = 0.0;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const double w = flows.flow[e];
    if (!(w > 0.0)) continue;
    if (budget.s[e] == 0.0) return std::numeric_limits<double>::infinity();
    h += w * tree.lengths()[e] * std::pow(budget.s[e], -budget.alpha);
  }
  return h;
}

double transport_cost(const EmbeddedTree& tree, const CostBudget& budget,
                      const MailingPlan& plan) {
  return transport_cost(tree, budget, compute_edge_flows(tree, plan));
}

CostBudget optimal_budget(const EmbeddedTree& tree, const MailingPlan& plan,
                          double alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  const EdgeFlow flows = compute_edge_flows(tree, plan);
  const double power = 1.0 / (1.0 + alpha);
  CostBudget budget;
  budget.alpha = alpha;
  budget.s.resize(tree.edge_count());
  double norm = 0.0;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    budget.s[e] = power_or_zero(flows.flow[e], power);
    norm += tree.lengths()[e] * budget.s[e];
  }
  if (!(norm > 0.0)) throw InputError("every edge flow is zero");
  for (double& s : budget.s) s /= norm;
  return budget;
}

double min_transport_cost(const EmbeddedTree& tree, const MailingPlan& plan,
                          double alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  const EdgeFlow flows = compute_edge_flows(tree, plan);
  const double power = 1.0 / (1.0 + alpha);
  double sum = 0.0;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    sum += tree.lengths()[e] * power_or_zero(flows.flow[e], power);
  }
  if (!(sum > 0.0)) throw InputError("every edge flow is zero");
  return std::pow(sum, 1.0 + alpha);
}

}  // namespace mailnet

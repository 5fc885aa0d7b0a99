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

// Exact combinatorial side of the mailing problem: embedded trees in the
// class (A, B, pi), edge flows, the Gilbert cost and the budgeted transport
// cost with its closed-form optimal budget.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mailnet/grid.hpp"

namespace mailnet {

using Point = std::array<double, 3>;

double distance(const Point& a, const Point& b);

struct TreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
};

// Undirected tree with Euclidean edge lengths. sources()[i] and sinks()[j]
// are the vertices realizing plan indices i and j.
class EmbeddedTree {
 public:
  // Throws InputError unless the graph is connected and acyclic, every edge
  // has positive length and every terminal is a vertex.
  static EmbeddedTree create(int dimension, std::vector<Point> vertices,
                             std::vector<TreeEdge> edges,
                             std::vector<std::size_t> sources,
                             std::vector<std::size_t> sinks);

  int dimension() const { return dimension_; }
  std::span<const Point> vertices() const { return vertices_; }
  std::span<const TreeEdge> edges() const { return edges_; }
  std::span<const double> lengths() const { return lengths_; }
  std::span<const std::size_t> sources() const { return sources_; }
  std::span<const std::size_t> sinks() const { return sinks_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  double total_length() const;

  // Edge ids of the unique path from `from` to `to`, in walking order.
  std::vector<std::size_t> find_orbit(std::size_t from, std::size_t to) const;

 private:
  EmbeddedTree() = default;

  int dimension_ = 2;
  std::vector<Point> vertices_;
  std::vector<TreeEdge> edges_;
  std::vector<double> lengths_;
  std::vector<std::size_t> sources_;
  std::vector<std::size_t> sinks_;
  // Rooted at vertex 0.
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_edge_;
  std::vector<std::size_t> depth_;
};

// w_pi(e), plus the oriented net flow along edges()[e] from a to b.
struct EdgeFlow {
  std::vector<double> flow;
  std::vector<double> signed_flow;
};

// Construction cost per unit length s(e) and the exponent alpha.
struct CostBudget {
  std::vector<double> s;
  double alpha = 1.0;
};

inline constexpr double kConservationTolerance = 1e-12;
inline constexpr double kBudgetTolerance = 1e-12;

EdgeFlow compute_edge_flows(const EmbeddedTree& tree, const MailingPlan& plan);

// Largest violation of flow conservation over all vertices: net oriented
// outflow must equal f+(v) - f-(v).
double kirchhoff_residual(const EmbeddedTree& tree, const MailingPlan& plan,
                          const EdgeFlow& flows);

// G = sum_e w(e)^sigma |e| over edges with positive flow; sigma in [0, 1).
double gilbert_cost(const EmbeddedTree& tree, const EdgeFlow& flows,
                    double sigma);
double gilbert_cost(const EmbeddedTree& tree, const MailingPlan& plan,
                    double sigma);

// Sum_e |e| s(e).
double budget_used(const EmbeddedTree& tree, const CostBudget& budget);

// H(T, s) = sum_e w(e) |e| s(e)^-alpha; +inf when a used edge has s = 0.
double transport_cost(const EmbeddedTree& tree, const CostBudget& budget,
                      const MailingPlan& plan);
double transport_cost(const EmbeddedTree& tree, const CostBudget& budget,
                      const EdgeFlow& flows);

// Minimizer of H(T, .) under the unit budget:
// s(e) = w(e)^(1/(1+alpha)) / sum_e' |e'| w(e')^(1/(1+alpha)).
CostBudget optimal_budget(const EmbeddedTree& tree, const MailingPlan& plan,
                          double alpha);

// H(T) = (sum_e |e| w(e)^(1/(1+alpha)))^(1+alpha).
double min_transport_cost(const EmbeddedTree& tree, const MailingPlan& plan,
                          double alpha);

}  // namespace mailnet

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

// Brute-force references that share no optimization code with the entropic
// solver: direct mirror descent on H_p over the simplex, exhaustive star
// branch-point search, central differences, convexity probes, projected
// descent on the budget set and a Newton-KKT entropic simplex minimizer.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mailnet/grid.hpp"
#include "mailnet/tree.hpp"
#include "mailnet/wasserstein.hpp"

namespace mailnet {

struct OracleResult {
  std::string method;
  double value = 0.0;  // +inf only when flagged infinite
  bool infinite = false;
  std::vector<double> argument;  // m, the branch point, or s
  NodeIndex node = -1;           // branch node for the star search
  long count = 0;                // iterations or enumerated candidates
  bool converged = true;
  std::uint64_t seed = 0;
};

// Entropy mirror descent with step eta0 / sqrt(t) on the sup-normalized
// envelope gradient, reporting the better of the running average and the
// best iterate. Intended for grids up to 8x8.
OracleResult primal_min_direct(const Grid& grid, std::span<const NodePair> pairs,
                               const PExponent& exponent, int steps,
                               double eta0 = 1.0);

// For every grid node v, the star joining each distinct terminal to v by a
// straight segment; returns the smallest Gilbert cost.
OracleResult branch_point_search(const Grid& grid, const TerminalSet& terminals,
                                 const MailingPlan& plan, double sigma);

// The star tree used by branch_point_search for center node v.
EmbeddedTree star_tree(const Grid& grid, const TerminalSet& terminals,
                       NodeIndex center);

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, double step);

struct ConvexityReport {
  int trials = 0;
  double worst_margin = 0.0;  // max of f(mix) - mix of f; <= 0 when convex
  bool passed = true;
  std::uint64_t seed = 0;
};

// Midpoint-style probes of primal_objective at lambda in {1/4, 1/2, 3/4}
// between flat-Dirichlet draws.
ConvexityReport convexity_probe(const Grid& grid, std::span<const NodePair> pairs,
                                const PExponent& exponent, int trials,
                                std::uint64_t seed, double tolerance = 1e-9);

// Projected gradient descent with backtracking on the unit budget, over the
// edges that carry flow.
OracleResult budget_min_direct(const EmbeddedTree& tree, const MailingPlan& plan,
                               double alpha, int steps);

// argmin over the simplex of -sum m c + eps sum m log m by damped
// Newton-KKT iterations from uniform m.
OracleResult entropic_simplex_min(std::span<const double> c, double eps,
                                  int steps = 500);

}  // namespace mailnet

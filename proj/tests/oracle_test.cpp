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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mailnet/entropic.hpp"
#include "mailnet/error.hpp"
#include "mailnet/oracle.hpp"
#include "mailnet/stencil.hpp"
#include "testing/random_instances.hpp"

namespace mailnet {
namespace {

Grid make_grid(std::vector<int> dims, double spacing) {
  return Grid::build(dims, spacing);
}

NodeIndex at(const Grid& g, double x, double y) {
  const std::vector<double> p{x, y};
  return g.nearest_node(p, nullptr);
}

TEST(PrimalMinDirect, FiveNodePath) {
  const Grid g = make_grid({5}, 1.0);
  const std::vector<NodePair> pairs{{0, 4, 1.0}};
  const OracleResult r = primal_min_direct(g, pairs, PExponent::from_p(2.0), 2000);
  const double uniform = primal_objective(g, uniform_weights(g), pairs, PExponent::from_p(2.0));
  EXPECT_NEAR(uniform, 25.0 - 25.0 / 3.0, 1e-10);
  EXPECT_LE(r.value, uniform);
  // The conductances always sum to 1 on a path, so the minimum (n-1)^2 is
  // reached exactly when every edge carries k = 1/4.
  EXPECT_NEAR(r.value, 16.0, 1e-6);
  std::vector<double> k(g.edge_count());
  stencil::conductances(g, r.argument, k);
  for (double v : k) EXPECT_NEAR(v, 0.25, 1e-4);
}

TEST(PrimalMinDirect, AgreesWithEntropicSolveOnSmallSquare) {
  const Grid g = make_grid({3, 3}, 0.5);
  const std::vector<NodePair> pairs{{0, 8, 1.0}};
  const OracleResult r = primal_min_direct(g, pairs, PExponent::from_p(2.0), 2000);
  const SolveResult s = solve(g, pairs, PExponent::from_p(2.0));
  const double solved = s.diagnostics.stages.back().primal;
  EXPECT_NEAR(r.value, solved, 1e-3 * solved);
}

TEST(PrimalMinDirect, DuplicatedPairEqualsSinglePair) {
  const Grid g = make_grid({3, 3}, 0.5);
  const std::vector<NodePair> one{{0, 8, 1.0}};
  const std::vector<NodePair> two{{0, 8, 0.5}, {0, 8, 0.5}};
  const PExponent e = PExponent::from_p(2.0);
  EXPECT_NEAR(primal_min_direct(g, one, e, 300).value,
              primal_min_direct(g, two, e, 300).value, 1e-10);
}

TEST(PrimalMinDirect, RejectsLargeGrids) {
  const Grid g = make_grid({9, 9}, 0.125);
  const std::vector<NodePair> pairs{{0, 80, 1.0}};
  EXPECT_THROW(primal_min_direct(g, pairs, PExponent::from_p(2.0), 10), InputError);
}

TEST(BranchPointSearch, TwoTerminalsTieAlongTheSegment) {
  const Grid g = make_grid({9, 9}, 0.125);
  const TerminalSet t = TerminalSet::create(g, {at(g, 0.125, 0.25)}, {at(g, 0.875, 0.25)});
  const MailingPlan plan = MailingPlan::create(1, 1, {{0, 0, 1.0}});
  const OracleResult r = branch_point_search(g, t, plan, 0.5);
  EXPECT_NEAR(r.value, 0.75, 1e-14);
  EXPECT_NEAR(r.argument[1], 0.25, 1e-14);
  EXPECT_EQ(r.count, 81);
}

TEST(BranchPointSearch, EquilateralTriangleSteinerProxy) {
  const Grid g = make_grid({33, 33}, 1.0 / 16);
  const double h = std::sqrt(3.0) / 2.0;
  const NodeIndex a = at(g, 0.5, 0.5), b = at(g, 1.5, 0.5), c = at(g, 1.0, 0.5 + h);
  const TerminalSet t = TerminalSet::create(g, {a, b}, {b, c});
  const MailingPlan plan =
      MailingPlan::create(2, 2, {{0, 0, 1.0 / 3}, {0, 1, 1.0 / 3}, {1, 1, 1.0 / 3}});
  const OracleResult r = branch_point_search(g, t, plan, 1.0 / 8.0);
  const Point centroid{1.0, 0.5 + h / 3.0, 0.0};
  EXPECT_LE(std::abs(r.argument[0] - centroid[0]), 1.0 / 16);
  EXPECT_LE(std::abs(r.argument[1] - centroid[1]), 1.0 / 16);
  const EmbeddedTree star = star_tree(g, t, r.node);
  EXPECT_NEAR(star.total_length(), std::sqrt(3.0), 0.02);
}

TEST(BranchPointSearch, YInstanceMatchesContinuousFermatSearch) {
  const Grid g = make_grid({33, 33}, 1.0 / 32);
  const NodeIndex x1 = at(g, 0.25, 0.2), x2 = at(g, 0.25, 0.8), y = at(g, 0.85, 0.5);
  const TerminalSet t = TerminalSet::create(g, {x1, x2}, {y});
  const MailingPlan plan = MailingPlan::create(2, 1, {{0, 0, 0.5}, {1, 0, 0.5}});
  const OracleResult r = branch_point_search(g, t, plan, 0.5);
  // Weighted Fermat point of the snapped terminals by Weiszfeld iteration.
  const std::vector<Point> p{g.position(x1), g.position(x2), g.position(y)};
  const std::vector<double> w{std::sqrt(0.5), std::sqrt(0.5), 1.0};
  Point v{0.5, 0.5, 0.0};
  for (int it = 0; it < 10000; ++it) {
    Point num{0, 0, 0};
    double den = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = distance(v, p[i]);
      for (int k = 0; k < 2; ++k) num[k] += w[i] * p[i][k] / d;
      den += w[i] / d;
    }
    v = {num[0] / den, num[1] / den, 0.0};
  }
  double best = 0.0;
  for (int i = 0; i < 3; ++i) best += w[i] * distance(v, p[i]);
  EXPECT_GE(r.value, best - 1e-12);
  EXPECT_LE(r.value, best * (1.0 + 1e-3));
}

TEST(FiniteDiffGradient, Quadratic) {
  const std::vector<double> x{3.0};
  const auto g = finite_diff_gradient([](std::span<const double> v) { return v[0] * v[0]; },
                                      x, 1e-5);
  EXPECT_NEAR(g[0], 6.0, 1e-9);
}

TEST(FiniteDiffGradient, ConstantIsZero) {
  const std::vector<double> x{1.0, -2.0, 0.5};
  for (double v : finite_diff_gradient([](std::span<const double>) { return 4.0; }, x, 1e-3)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(FiniteDiffGradient, MatchesDualGradient) {
  const Grid g = make_grid({5, 5}, 0.25);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  PotentialSet pot = PotentialSet::zeros(g, {{0, 24, 1.0}});
  for (double& v : pot.phi[0]) v = normal(rng);
  const DualSettings s{PExponent::from_p(4.0), 0.3, 0.02};
  const auto f = [&](std::span<const double> x) {
    PotentialSet p = pot;
    p.phi[0].assign(x.begin(), x.end());
    return dual_objective(g, p, s);
  };
  const auto fd = finite_diff_gradient(f, pot.phi[0], 1e-5);
  const auto grad = dual_gradient(g, pot, s)[0];
  for (std::size_t z = 0; z < fd.size(); ++z) {
    EXPECT_NEAR(fd[z], grad[z], 1e-5 * std::max(1.0, std::abs(grad[z])));
  }
}

TEST(ConvexityProbe, PassesOnSmallGrid) {
  const Grid g = make_grid({6, 6}, 0.2);
  const std::vector<NodePair> pairs{{0, 35, 0.5}, {5, 30, 0.5}};
  const ConvexityReport r = convexity_probe(g, pairs, PExponent::from_p(2.0), 20, 3);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.trials, 20);
  EXPECT_LE(r.worst_margin, 1e-9);
  EXPECT_EQ(r.seed, 3u);
}

TEST(ConvexityProbe, EqualEndpointsGiveEquality) {
  const Grid g = make_grid({5, 5}, 0.25);
  const std::vector<NodePair> pairs{{0, 24, 1.0}};
  std::mt19937_64 rng(8);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  const PExponent e = PExponent::from_p(2.0);
  const double f = primal_objective(g, m, pairs, e);
  std::vector<double> mix(m.values().begin(), m.values().end());
  EXPECT_NEAR(primal_objective(g, SimplexWeights::normalized(mix), pairs, e), f, 1e-12 * f);
}

TEST(BudgetMinDirect, SingleEdge) {
  const EmbeddedTree t = EmbeddedTree::create(2, {{0, 0, 0}, {2, 0, 0}}, {{0, 1}}, {0}, {1});
  const MailingPlan plan = MailingPlan::create(1, 1, {{0, 0, 1.0}});
  const OracleResult r = budget_min_direct(t, plan, 1.0, 100);
  EXPECT_DOUBLE_EQ(r.argument[0], 0.5);
  EXPECT_DOUBLE_EQ(r.value, 4.0);
}

TEST(BudgetMinDirect, Star) {
  const EmbeddedTree t = EmbeddedTree::create(
      2, {{0, 0, 0}, {0, 2, 0}, {1, 1, 0}, {3, 1, 0}}, {{0, 2}, {1, 2}, {2, 3}}, {0, 1}, {3});
  const MailingPlan plan = MailingPlan::create(2, 1, {{0, 0, 0.5}, {1, 0, 0.5}});
  const OracleResult r = budget_min_direct(t, plan, 1.0, 10000);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 16.0, 16.0 * 1e-6);
  EXPECT_NEAR(r.argument[2], 0.25, 1e-5);
}

TEST(BudgetMinDirect, RandomTreesAgreeWithClosedForm) {
  std::mt19937_64 rng(606);
  int checked = 0;
  while (checked < 60) {
    const auto c = testing::random_tree_case(rng, 6, 4);
    const EdgeFlow f = compute_edge_flows(c.tree, c.plan);
    if (*std::max_element(f.flow.begin(), f.flow.end()) == 0.0) continue;
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double closed = min_transport_cost(c.tree, c.plan, alpha);
      const OracleResult r = budget_min_direct(c.tree, c.plan, alpha, 20000);
      EXPECT_NEAR(r.value, closed, 1e-6 * closed) << "alpha = " << alpha;
    }
    ++checked;
  }
}

TEST(EntropicSimplexMin, HandExample) {
  const std::vector<double> c{std::log(2.0), 0.0, 0.0};
  const OracleResult r = entropic_simplex_min(c, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.argument[0], 0.5, 1e-12);
  EXPECT_NEAR(r.argument[1], 0.25, 1e-12);
}

TEST(EntropicSimplexMin, AgreesWithSoftmax) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (double eps : {2.0, 0.3, 0.05}) {
    std::vector<double> c(40);
    for (double& v : c) v = u(rng);
    const OracleResult r = entropic_simplex_min(c, eps);
    const SimplexWeights m = entropic_weights(c, eps);
    double sup = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sup = std::max(sup, std::abs(m[i] - r.argument[i]));
    EXPECT_LT(sup, 1e-6) << "eps = " << eps;
  }
}

}  // namespace
}  // namespace mailnet

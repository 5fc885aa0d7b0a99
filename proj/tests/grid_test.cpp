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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mailnet/error.hpp"
#include "mailnet/grid.hpp"
#include "testing/random_instances.hpp"

namespace mailnet {
namespace {

std::vector<NodeIndex> sorted(std::span<const NodeIndex> s) {
  std::vector<NodeIndex> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

TEST(BuildGrid, ThreeNodePath) {
  const int dims[] = {3};
  const Grid g = Grid::build(dims, 1.0);
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(sorted(g.neighbors(0)), (std::vector<NodeIndex>{1}));
  EXPECT_EQ(sorted(g.neighbors(1)), (std::vector<NodeIndex>{0, 2}));
  EXPECT_EQ(g.degree(1), 2);
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(BuildGrid, TwoByTwoIsAllCorners) {
  const int dims[] = {2, 2};
  const Grid g = Grid::build(dims, 1.0);
  for (NodeIndex z = 0; z < 4; ++z) EXPECT_EQ(g.degree(z), 2);
}

TEST(BuildGrid, FiveByFiveDegreesMatchOffsetEnumeration) {
  const int dims[] = {5, 5};
  const Grid g = Grid::build(dims, 0.25);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      int expected = 0;
      const int offsets[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& o : offsets) {
        const int nx = x + o[0];
        const int ny = y + o[1];
        if (nx >= 0 && nx < 5 && ny >= 0 && ny < 5) ++expected;
      }
      const int idx[] = {x, y};
      EXPECT_EQ(g.degree(g.node_at(idx)), expected);
    }
  }
  const int center[] = {2, 2}, side[] = {0, 2}, corner[] = {4, 4};
  EXPECT_EQ(g.degree(g.node_at(center)), 4);
  EXPECT_EQ(g.degree(g.node_at(side)), 3);
  EXPECT_EQ(g.degree(g.node_at(corner)), 2);
}

TEST(BuildGrid, ThreeDimensionalInteriorHasSixNeighbors) {
  const int dims[] = {3, 3, 3};
  const Grid g = Grid::build(dims, 1.0);
  const int c[] = {1, 1, 1};
  EXPECT_EQ(g.degree(g.node_at(c)), 6);
  EXPECT_EQ(g.edge_count(), 54u);
}

TEST(BuildGrid, RejectsBadInput) {
  const int one[] = {1, 4};
  const int zero[] = {0};
  const int ok[] = {3, 3};
  const int four[] = {2, 2, 2, 2};
  EXPECT_THROW(Grid::build(one, 1.0), InputError);
  EXPECT_THROW(Grid::build(zero, 1.0), InputError);
  EXPECT_THROW(Grid::build(ok, 0.0), InputError);
  EXPECT_THROW(Grid::build(ok, -1.0), InputError);
  EXPECT_THROW(Grid::build(four, 1.0), InputError);
}

TEST(BuildGrid, NeighborSymmetryExhaustive) {
  for (int nx = 2; nx <= 65; nx += 7) {
    for (int ny : {2, 3, 17, 65}) {
      const int dims[] = {nx, ny};
      const Grid g = Grid::build(dims, 1.0);
      for (NodeIndex z = 0; z < static_cast<NodeIndex>(g.node_count()); ++z) {
        ASSERT_GE(g.degree(z), 1);
        for (NodeIndex w : g.neighbors(z)) {
          const auto back = g.neighbors(w);
          ASSERT_NE(std::find(back.begin(), back.end(), z), back.end());
        }
      }
    }
  }
}

TEST(BuildGrid, EdgeRunsCoverEveryEdgeOnce) {
  const int dims[] = {4, 3, 2};
  const Grid g = Grid::build(dims, 1.0);
  std::size_t covered = 0;
  for (const EdgeRun& run : g.edge_runs()) {
    for (std::size_t k = 0; k < run.count; ++k) {
      const Edge e = g.edges()[run.first_edge + k];
      EXPECT_EQ(e.lo, run.first_lo + static_cast<NodeIndex>(k));
      EXPECT_EQ(e.hi, e.lo + run.stride);
      const auto a = g.multi_index(e.lo);
      const auto b = g.multi_index(e.hi);
      EXPECT_EQ(b[run.axis], a[run.axis] + 1);
      ++covered;
    }
  }
  EXPECT_EQ(covered, g.edge_count());
}

TEST(BuildGrid, NearestNodeSnapsAndReportsDistance) {
  const int dims[] = {3, 3};
  // Unit square sampled by 3 x 3 nodes.
  const Grid g = Grid::build(dims, 0.5);
  double snap = -1.0;
  const double p[] = {0.49, 0.51};
  const NodeIndex z = g.nearest_node(p, &snap);
  const int center[] = {1, 1};
  EXPECT_EQ(z, g.node_at(center));
  EXPECT_NEAR(snap, std::sqrt(2.0) * 0.01, 1e-15);
}

TEST(BuildGrid, NearestNodeClampsOutsidePoints) {
  const int dims[] = {3, 3};
  const Grid g = Grid::build(dims, 0.5);
  const double p[] = {-3.0, 0.74};
  const int expect[] = {0, 1};
  EXPECT_EQ(g.nearest_node(p), g.node_at(expect));
}

TEST(PlanMarginals, SinglePair) {
  const MailingPlan plan = MailingPlan::create(1, 1, {{0, 0, 1.0}});
  const Marginals m = plan_marginals(plan);
  EXPECT_EQ(m.source, std::vector<double>{1.0});
  EXPECT_EQ(m.sink, std::vector<double>{1.0});
}

TEST(PlanMarginals, SymmetricMerge) {
  const MailingPlan plan = MailingPlan::create(2, 1, {{0, 0, 0.5}, {1, 0, 0.5}});
  const Marginals m = plan_marginals(plan);
  EXPECT_EQ(m.source, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(m.sink, std::vector<double>{1.0});
}

TEST(PlanMarginals, RowAndColumnSums) {
  const MailingPlan plan =
      MailingPlan::create(2, 2, {{0, 0, 0.3}, {0, 1, 0.2}, {1, 1, 0.5}});
  const Marginals m = plan_marginals(plan);
  EXPECT_NEAR(m.source[0], 0.5, 1e-15);
  EXPECT_NEAR(m.source[1], 0.5, 1e-15);
  EXPECT_NEAR(m.sink[0], 0.3, 1e-15);
  EXPECT_NEAR(m.sink[1], 0.7, 1e-15);
}

TEST(PlanMarginals, SumToOneForRandomPlans) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = testing::random_tree_case(rng);
    const Marginals m = plan_marginals(c.plan);
    double a = 0.0, b = 0.0;
    for (double v : m.source) a += v;
    for (double v : m.sink) b += v;
    EXPECT_NEAR(a, 1.0, 1e-12);
    EXPECT_NEAR(b, 1.0, 1e-12);
  }
}

TEST(MailingPlanInvariants, RejectsBadPlans) {
  EXPECT_THROW(MailingPlan::create(1, 1, {}), InputError);
  EXPECT_THROW(MailingPlan::create(1, 1, {{0, 0, 0.9}}), InputError);
  EXPECT_THROW(MailingPlan::create(1, 1, {{0, 0, 0.5}, {0, 0, 0.5}}), InputError);
  EXPECT_THROW(MailingPlan::create(1, 2, {{0, 0, 1.5}, {0, 1, -0.5}}), InputError);
  EXPECT_THROW(MailingPlan::create(1, 1, {{1, 0, 1.0}}), InputError);
}

TEST(TerminalSetInvariants, RejectsDuplicatesAndForeignNodes) {
  const int dims[] = {3, 3};
  const Grid g = Grid::build(dims, 1.0);
  EXPECT_THROW(TerminalSet::create(g, {0, 0}, {4}), InputError);
  EXPECT_THROW(TerminalSet::create(g, {0}, {9}), InputError);
  EXPECT_THROW(TerminalSet::create(g, {}, {1}), InputError);
  // A node may be both a source and a sink.
  EXPECT_NO_THROW(TerminalSet::create(g, {0, 4}, {4}));
}

TEST(UniformWeights, SmallAndLargeGrids) {
  const int d3[] = {3};
  const SimplexWeights w3 = uniform_weights(Grid::build(d3, 1.0));
  for (double v : w3.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);

  const int d33[] = {33, 33};
  const SimplexWeights w = uniform_weights(Grid::build(d33, 1.0 / 32));
  ASSERT_EQ(w.size(), 1089u);
  double total = 0.0;
  for (double v : w.values()) {
    EXPECT_DOUBLE_EQ(v, 1.0 / 1089.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SimplexWeightsInvariants, ClosedUnderConvexCombination) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const SimplexWeights a = testing::random_simplex(rng, 64);
    const SimplexWeights b = testing::random_simplex(rng, 64);
    for (double lambda : {0.0, 0.3, 0.5, 1.0}) {
      std::vector<double> mix(64);
      for (std::size_t i = 0; i < 64; ++i) {
        mix[i] = lambda * a[i] + (1.0 - lambda) * b[i];
      }
      EXPECT_NO_THROW(SimplexWeights::from_values(mix));
    }
  }
}

TEST(SimplexWeightsInvariants, RejectsNegativeOrUnnormalized) {
  EXPECT_THROW(SimplexWeights::from_values({0.5, 0.6}), InputError);
  EXPECT_THROW(SimplexWeights::from_values({1.5, -0.5}), InputError);
  EXPECT_THROW(SimplexWeights::from_values({}), InputError);
}

}  // namespace
}  // namespace mailnet

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
#include <limits>
#include <random>
#include <vector>

#include "mailnet/error.hpp"
#include "mailnet/grid.hpp"
#include "mailnet/wasserstein.hpp"
#include "testing/random_instances.hpp"

namespace mailnet {
namespace {

Grid path_grid(int n) {
  const std::vector<int> dims{n};
  return Grid::build(dims, 1.0);
}

Grid square_grid(int n) {
  const std::vector<int> dims{n, n};
  return Grid::build(dims, 1.0 / (n - 1));
}

NodePair end_to_end(const Grid& grid) {
  return {0, static_cast<NodeIndex>(grid.node_count() - 1), 1.0};
}

// Resistance-style closed form sum_e k_e^(1-p) for conductances on a path.
double series_value(const Grid& grid, const std::vector<double>& m, double p) {
  double total = 0.0;
  for (const Edge& e : grid.edges()) {
    const double k =
        m[e.lo] / grid.degree(e.lo) + m[e.hi] / grid.degree(e.hi);
    total += std::pow(k, 1.0 - p);
  }
  return total;
}

TEST(PExponent, ConjugatePairs) {
  const PExponent two = PExponent::from_sigma(0.5);
  EXPECT_DOUBLE_EQ(two.p(), 2.0);
  EXPECT_DOUBLE_EQ(two.conjugate(), 2.0);
  const PExponent eight = PExponent::from_p(8.0);
  EXPECT_DOUBLE_EQ(eight.conjugate(), 8.0 / 7.0);
  EXPECT_DOUBLE_EQ(eight.penalty_factor(), 7.0);
  EXPECT_THROW(PExponent::from_p(1.0), InputError);
  EXPECT_THROW(PExponent::from_sigma(0.0), InputError);
  EXPECT_THROW(PExponent::from_sigma(1.0), InputError);
}

TEST(PathWpp, UniformUnitPath) {
  const std::vector<PathSegment> path{{1.0, 1.0}};
  EXPECT_DOUBLE_EQ(path_wpp(path, PExponent::from_p(2.0)), 1.0);
}

TEST(PathWpp, HalfDensity) {
  const std::vector<PathSegment> path{{1.0, 0.5}};
  EXPECT_DOUBLE_EQ(path_wpp(path, PExponent::from_p(2.0)), 2.0);
}

TEST(PathWpp, ZeroDensityIsInfinite) {
  const std::vector<PathSegment> path{{1.0, 1.0}, {0.5, 0.0}};
  EXPECT_TRUE(std::isinf(path_wpp(path, PExponent::from_p(3.0))));
}

TEST(ParallelWpp, TwoEqualOrbits) {
  const std::vector<double> orbits{2.0, 2.0};
  EXPECT_NEAR(parallel_wpp(orbits, PExponent::from_p(2.0)), 1.0, 1e-12);
}

TEST(ParallelWpp, KFoldSymmetric) {
  for (double p : {1.5, 2.0, 3.0, 8.0}) {
    for (int k = 1; k <= 6; ++k) {
      const std::vector<double> orbits(k, 1.7);
      EXPECT_NEAR(parallel_wpp(orbits, PExponent::from_p(p)),
                  1.7 * std::pow(k, 1.0 - p), 1e-12);
    }
  }
}

TEST(ParallelWpp, SingleOrbitIsIdentity) {
  const std::vector<double> orbits{3.25};
  EXPECT_EQ(parallel_wpp(orbits, PExponent::from_p(4.0)), 3.25);
}

TEST(Dphi, PathByHand) {
  const Grid g = path_grid(3);
  const std::vector<double> phi{0.0, 1.0, 3.0};
  const std::vector<double> d = dphi(g, phi, 2.0);
  EXPECT_DOUBLE_EQ(d[0], 1.0);
  EXPECT_DOUBLE_EQ(d[1], 2.5);
  EXPECT_DOUBLE_EQ(d[2], 4.0);
}

TEST(Dphi, ConstantPotentialVanishes) {
  const Grid g = square_grid(5);
  const std::vector<double> phi(g.node_count(), -2.5);
  for (double d : dphi(g, phi, 4.0 / 3.0)) EXPECT_EQ(d, 0.0);
}

TEST(Dphi, MatchesDirectNeighborSum) {
  const Grid g = square_grid(6);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> phi(g.node_count());
  for (double& v : phi) v = normal(rng);
  const double q = 1.25;
  const std::vector<double> d = dphi(g, phi, q);
  for (NodeIndex z = 0; z < static_cast<NodeIndex>(g.node_count()); ++z) {
    double expected = 0.0;
    for (NodeIndex w : g.neighbors(z)) expected += std::pow(std::abs(phi[z] - phi[w]), q);
    expected /= g.degree(z);
    EXPECT_NEAR(d[z], expected, 1e-13 * (1.0 + expected));
  }
}

TEST(DiscreteWp, ThreeNodeOptimum) {
  const Grid g = path_grid(3);
  const SimplexWeights m = uniform_weights(g);
  const std::vector<double> phi{4.0, 2.0, 0.0};
  EXPECT_NEAR(discrete_wp(g, m, phi, end_to_end(g), PExponent::from_p(2.0)), 4.0,
              1e-14);
}

TEST(DiscreteWp, GaugeInvariance) {
  const Grid g = square_grid(5);
  std::mt19937_64 rng(11);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  std::vector<double> phi(g.node_count());
  std::normal_distribution<double> normal;
  for (double& v : phi) v = normal(rng);
  const NodePair pair{3, 21, 1.0};
  for (double p : {2.0, 3.0, 1.5}) {
    const double base = discrete_wp(g, m, phi, pair, PExponent::from_p(p));
    std::vector<double> shifted = phi;
    for (double& v : shifted) v += 7.0;
    EXPECT_NEAR(discrete_wp(g, m, shifted, pair, PExponent::from_p(p)), base,
                1e-12 * (1.0 + std::abs(base)));
  }
}

TEST(InnerMax, ThreeNodePath) {
  const Grid g = path_grid(3);
  const Potential pot =
      inner_max(g, uniform_weights(g), end_to_end(g), PExponent::from_p(2.0));
  EXPECT_NEAR(pot.value, 4.0, 1e-12);
  EXPECT_NEAR(pot.phi[0], 4.0, 1e-12);
  EXPECT_NEAR(pot.phi[1], 2.0, 1e-12);
  EXPECT_NEAR(pot.phi[2], 0.0, 1e-12);
  EXPECT_TRUE(pot.converged);
}

TEST(InnerMax, UniformPathClosedForm) {
  for (int n : {3, 4, 9, 17, 33, 65}) {
    const Grid g = path_grid(n);
    const Potential pot =
        inner_max(g, uniform_weights(g), end_to_end(g), PExponent::from_p(2.0));
    const double expected = n * n - 5.0 * n / 3.0;
    EXPECT_NEAR(pot.value, expected, 1e-8 * expected) << "n = " << n;
  }
}

TEST(InnerMax, ContinuumGapShrinks) {
  double previous = std::numeric_limits<double>::infinity();
  for (int n : {9, 17, 33, 65}) {
    const Grid g = path_grid(n);
    const double v =
        inner_max(g, uniform_weights(g), end_to_end(g), PExponent::from_p(2.0)).value;
    const double gap = std::abs(v - (n - 1.0) * (n - 1.0)) / ((n - 1.0) * (n - 1.0));
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 0.01);
}

TEST(InnerMax, SamePointIsZero) {
  const Grid g = square_grid(4);
  const Potential pot =
      inner_max(g, uniform_weights(g), {5, 5, 1.0}, PExponent::from_p(3.0));
  EXPECT_EQ(pot.value, 0.0);
}

TEST(InnerMax, ValueMatchesFunctionalAtOptimum) {
  const Grid g = square_grid(6);
  std::mt19937_64 rng(8);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  const NodePair pair{0, 35, 1.0};
  const PExponent two = PExponent::from_p(2.0);
  const Potential pot = inner_max(g, m, pair, two);
  EXPECT_NEAR(discrete_wp(g, m, pot.phi, pair, two), pot.value,
              1e-10 * pot.value);
  // Any perturbation lowers the concave functional.
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> phi = pot.phi;
    for (double& v : phi) v += 1e-3 * normal(rng);
    EXPECT_LE(discrete_wp(g, m, phi, pair, two), pot.value + 1e-9 * pot.value);
  }
}

TEST(InnerMax, SymmetricInEndpoints) {
  const Grid g = square_grid(7);
  std::mt19937_64 rng(17);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  for (double p : {2.0, 3.0, 1.5}) {
    const PExponent e = PExponent::from_p(p);
    const double forward = inner_max(g, m, {2, 40, 1.0}, e).value;
    const double backward = inner_max(g, m, {40, 2, 1.0}, e).value;
    EXPECT_NEAR(forward, backward, 1e-8 * forward) << "p = " << p;
  }
}

TEST(InnerMax, SeriesFormulaForGeneralP) {
  const Grid g = path_grid(12);
  std::mt19937_64 rng(21);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  const std::vector<double> mv(m.values().begin(), m.values().end());
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    InnerOptions options;
    options.smoothing = 1e-9;
    const Potential pot = inner_max(g, m, end_to_end(g), PExponent::from_p(p), options);
    const double expected = series_value(g, mv, p);
    EXPECT_TRUE(pot.converged) << "p = " << p;
    EXPECT_NEAR(pot.value, expected, 1e-8 * expected) << "p = " << p;
  }
}

TEST(InnerMax, NewtonConvergesOnTwoDimensionalGrid) {
  const Grid g = square_grid(9);
  std::mt19937_64 rng(4);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  for (double p : {1.5, 3.0, 8.0}) {
    const Potential pot = inner_max(g, m, {10, 70, 1.0}, PExponent::from_p(p));
    EXPECT_TRUE(pot.converged) << "p = " << p;
    EXPECT_LT(pot.gradient_norm, 1e-10);
  }
}

TEST(InnerMax, ZeroMassBandDisconnects) {
  const Grid g = square_grid(6);
  std::vector<double> values(g.node_count(), 1.0);
  for (int row = 0; row < 6; ++row) {
    const std::vector<int> a{2, row}, b{3, row};
    values[g.node_at(a)] = 0.0;
    values[g.node_at(b)] = 0.0;
  }
  const SimplexWeights m = SimplexWeights::normalized(values);
  const Potential pot = inner_max(g, m, {0, 35, 1.0}, PExponent::from_p(2.0));
  EXPECT_TRUE(pot.disconnected);
  EXPECT_TRUE(std::isinf(pot.value));
}

TEST(InnerMax, SingleZeroColumnStaysConnected) {
  const Grid g = square_grid(6);
  std::vector<double> values(g.node_count(), 1.0);
  for (int row = 0; row < 6; ++row) {
    const std::vector<int> a{2, row};
    values[g.node_at(a)] = 0.0;
  }
  const SimplexWeights m = SimplexWeights::normalized(values);
  const Potential pot = inner_max(g, m, {0, 35, 1.0}, PExponent::from_p(2.0));
  EXPECT_FALSE(pot.disconnected);
  EXPECT_TRUE(std::isfinite(pot.value));
}

TEST(EvaluatePrimal, EnvelopeGradientMatchesFiniteDifferences) {
  const Grid g = square_grid(5);
  std::mt19937_64 rng(5);
  const SimplexWeights m = testing::random_simplex(rng, g.node_count());
  const std::vector<NodePair> pairs{{0, 24, 0.6}, {4, 20, 0.4}};
  const PExponent two = PExponent::from_p(2.0);
  const PrimalEvaluation eval = evaluate_primal(g, m, pairs, two);
  std::vector<double> base(m.values().begin(), m.values().end());
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t i = rng() % base.size(), j = rng() % base.size();
    if (i == j) continue;
    std::vector<double> plus = base, minus = base;
    plus[i] += h;
    plus[j] -= h;
    minus[i] -= h;
    minus[j] += h;
    const double fd = (primal_objective(g, SimplexWeights::normalized(plus), pairs, two) -
                       primal_objective(g, SimplexWeights::normalized(minus), pairs, two)) /
                      (2.0 * h);
    const double analytic = eval.gradient[i] - eval.gradient[j];
    EXPECT_NEAR(fd, analytic, 1e-5 * (std::abs(analytic) + 1.0));
  }
}

TEST(EvaluatePrimal, LinearInPlanMass) {
  const Grid g = square_grid(4);
  const SimplexWeights m = uniform_weights(g);
  const PExponent two = PExponent::from_p(2.0);
  const std::vector<NodePair> one{{0, 15, 1.0}};
  const std::vector<NodePair> split{{0, 15, 0.5}, {0, 15, 0.5}};
  EXPECT_NEAR(primal_objective(g, m, one, two), primal_objective(g, m, split, two),
              1e-12 * primal_objective(g, m, one, two));
}

TEST(EvaluatePrimal, ConvexAlongRandomSegments) {
  const Grid g = square_grid(6);
  std::mt19937_64 rng(1234);
  const std::vector<NodePair> pairs{{0, 35, 0.5}, {5, 30, 0.5}};
  const PExponent two = PExponent::from_p(2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexWeights a = testing::random_simplex(rng, g.node_count());
    const SimplexWeights b = testing::random_simplex(rng, g.node_count());
    std::vector<double> mid(a.size());
    for (std::size_t z = 0; z < mid.size(); ++z) mid[z] = 0.5 * (a[z] + b[z]);
    const double fa = primal_objective(g, a, pairs, two);
    const double fb = primal_objective(g, b, pairs, two);
    const double fm = primal_objective(g, SimplexWeights::normalized(mid), pairs, two);
    EXPECT_LE(fm, 0.5 * (fa + fb) + 1e-9 * (fa + fb));
  }
}

TEST(EvaluatePrimal, DisconnectedPairMakesValueInfinite) {
  const Grid g = path_grid(5);
  const SimplexWeights m =
      SimplexWeights::from_values({0.5, 0.0, 0.0, 0.0, 0.5});
  const std::vector<NodePair> pairs{{0, 4, 1.0}};
  EXPECT_TRUE(std::isinf(primal_objective(g, m, pairs, PExponent::from_p(2.0))));
}

TEST(EvaluatePrimal, RejectsMismatchedWeights) {
  const Grid g = path_grid(5);
  const SimplexWeights m = SimplexWeights::from_values({0.5, 0.5});
  const std::vector<NodePair> pairs{{0, 4, 1.0}};
  EXPECT_THROW(primal_objective(g, m, pairs, PExponent::from_p(2.0)), InputError);
}

}  // namespace
}  // namespace mailnet

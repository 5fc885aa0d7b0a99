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

// The conditional Wasserstein cost W_p^p(x, y || m): closed forms along a
// weighted path and over parallel orbits, and the grid functional
//
//   W(m, phi; x, y) = -(p/p') sum_z m(z) D phi(z) + p (phi(x) - phi(y)),
//   D phi(z) = sum_{z' in N(z)} |phi(z) - phi(z')|^p' / |N(z)|,
//
// maximized over potentials phi.

#include <span>
#include <vector>

#include "mailnet/grid.hpp"

namespace mailnet {

class PExponent {
 public:
  static PExponent from_p(double p);          // p > 1
  static PExponent from_sigma(double sigma);  // sigma in (0, 1), p = 1/sigma

  double p() const { return p_; }
  double conjugate() const { return conjugate_; }
  double sigma() const { return 1.0 / p_; }
  // p / p', which equals p - 1.
  double penalty_factor() const { return p_ / conjugate_; }

 private:
  explicit PExponent(double p);
  double p_;
  double conjugate_;
};

struct PathSegment {
  double length = 0.0;   // > 0
  double density = 0.0;  // >= 0
};

// sum |e| s(e)^(1-p); +inf when a segment has zero density.
double path_wpp(std::span<const PathSegment> path, const PExponent& exponent);

// (sum_i I_i^(1/(1-p)))^(1-p) for orbit integrals I_i > 0.
double parallel_wpp(std::span<const double> orbit_integrals,
                    const PExponent& exponent);

// D phi per node, using the penalty (t^2 + delta^2)^(q/2) - delta^q with
// q = conjugate (delta = 0 is the exact |t|^q).
std::vector<double> dphi(const Grid& grid, std::span<const double> phi,
                         double conjugate, double delta = 0.0);

// W(m, phi; x, y) with the exact penalty.
double discrete_wp(const Grid& grid, const SimplexWeights& m,
                   std::span<const double> phi, const NodePair& pair,
                   const PExponent& exponent);

struct InnerOptions {
  // Relative smoothing for p' < 2: delta = smoothing * (largest difference
  // of the starting potential over edges with k > 0). Ignored when p' >= 2.
  double smoothing = 1e-3;
  // Stop when sup |gradient| / p falls below this.
  double tolerance = 1e-10;
  int max_iterations = 200;
};

// Maximizer of W(m, .; x, y) under the gauge phi(y) = 0.
struct Potential {
  std::vector<double> phi;
  NodePair pair;
  double value = 0.0;      // maximized (smoothed when delta > 0) functional
  double delta = 0.0;      // absolute smoothing used
  bool disconnected = false;  // value is +inf
  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;  // sup |gradient| / p
};

// p = 2 is a direct sparse solve; otherwise damped Newton ascent on the
// smoothed functional started from the rescaled p = 2 potential. The
// problem lives on the component of {e : k_e > 0} that holds the pair.
Potential inner_max(const Grid& grid, const SimplexWeights& m,
                    const NodePair& pair, const PExponent& exponent,
                    const InnerOptions& options = {});

struct PrimalEvaluation {
  double value = 0.0;            // H_p(m); +inf if some pair is cut off
  std::vector<double> gradient;  // dH/dm(z) = -(p/p') sum pi D phi(z)
  std::vector<Potential> potentials;
  bool converged = true;
};

// H_p(m) = sum_pairs pi * inner_max value, pairs solved concurrently.
PrimalEvaluation evaluate_primal(const Grid& grid, const SimplexWeights& m,
                                 std::span<const NodePair> pairs,
                                 const PExponent& exponent,
                                 const InnerOptions& options = {});

double primal_objective(const Grid& grid, const SimplexWeights& m,
                        std::span<const NodePair> pairs,
                        const PExponent& exponent,
                        const InnerOptions& options = {});

}  // namespace mailnet

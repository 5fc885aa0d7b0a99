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

// Entropic regularization of the outer minimization over m. For potentials
// {phi_a}, one per plan pair, the aggregated energy is
//
//   c(z) = sum_a pi_a D phi_a(z),
//
// the minimizing weights are m = softmax(c / eps), and the dual objective is
//
//   H(phi) = -(eps p/p') log sum_z exp(c(z)/eps) + p sum_a pi_a (phi_a(x_a) - phi_a(y_a)),
//
// which is concave in the potentials and maximized stage by stage while eps
// is annealed.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mailnet/grid.hpp"
#include "mailnet/wasserstein.hpp"

namespace mailnet {

// Consistent: the softmax, dual and entropic primal above. Printed: the
// literal constants exp(c/2eps) and -eps log sum exp(c/2eps), kept only for
// comparison runs; its dual no longer equals the entropic primal.
enum class Convention { kConsistent, kPrinted };

struct DualSettings {
  PExponent exponent = PExponent::from_p(2.0);
  double eps = 1.0;
  // Absolute smoothing of |t|^p' (0 = exact penalty).
  double delta = 0.0;
  Convention convention = Convention::kConsistent;
};

// One potential per active pair, each with phi(sink) = 0 after gauge().
struct PotentialSet {
  std::vector<NodePair> pairs;
  std::vector<std::vector<double>> phi;

  static PotentialSet zeros(const Grid& grid, std::vector<NodePair> pairs);
  std::size_t size() const { return pairs.size(); }
  // Shifts each potential so that it vanishes at its sink.
  void gauge();
};

std::vector<double> aggregate_energy(const Grid& grid,
                                     const PotentialSet& potentials,
                                     double conjugate, double delta = 0.0);

// Max-shifted softmax of c / eps.
SimplexWeights entropic_weights(std::span<const double> c, double eps);

double dual_objective(const Grid& grid, const PotentialSet& potentials,
                      const DualSettings& settings);

// Gradient of dual_objective, shaped like potentials.phi.
std::vector<std::vector<double>> dual_gradient(const Grid& grid,
                                               const PotentialSet& potentials,
                                               const DualSettings& settings);

// sum_a pi_a W(m, phi_a) + (eps p/p') sum m log m, with the same smoothed
// penalty as the dual.
double entropic_primal(const Grid& grid, const SimplexWeights& m,
                       const PotentialSet& potentials,
                       const DualSettings& settings);

struct AnnealSchedule {
  double eps_start = 1.0;
  double factor = 0.5;
  double eps_floor = 1e-3;
  // Stage ends when sup |gradient| / p falls below this.
  double tolerance = 1e-6;
  int max_iterations = 2000;
  // When set, eps is a multiple of the primal value at the start of the
  // stage so that the schedule does not depend on the units of H_p.
  bool relative = true;

  void validate() const;
  std::vector<double> levels() const;
};

enum class AscentMethod { kNewton, kGradient };

struct SolveOptions {
  AnnealSchedule schedule;
  AscentMethod method = AscentMethod::kNewton;
  Convention convention = Convention::kConsistent;
  // Relative smoothing for p' < 2, scaled at each stage by the largest edge
  // difference of the starting potentials.
  double smoothing = 1e-3;
  // Amplitude of the seeded Gaussian start, relative to the same scale.
  // Zero means phi = 0.
  double init_noise = 0.0;
  std::uint64_t seed = 0;
  InnerOptions inner;
};

struct StageRecord {
  double eps_level = 0.0;  // schedule value
  double eps = 0.0;        // absolute eps used
  double delta = 0.0;      // absolute smoothing used
  double dual = 0.0;
  double dual_offset = 0.0;  // dual + (eps p/p') log |Z|
  double gradient_norm = 0.0;
  double primal = 0.0;           // H_p(m)
  double entropic_primal = 0.0;  // at (m(phi), phi)
  double gap = 0.0;              // |dual - entropic_primal|
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
};

struct SolveDiagnostics {
  std::vector<StageRecord> stages;
  bool converged = true;
  std::vector<std::string> warnings;
};

struct SolveResult {
  SimplexWeights m;
  PotentialSet potentials;
  SolveDiagnostics diagnostics;
};

// Anneals eps through the schedule, maximizing the dual at each level from
// the previous potentials. Stage failures are recorded as warnings.
SolveResult solve(const Grid& grid, const std::vector<NodePair>& pairs,
                  const PExponent& exponent, const SolveOptions& options = {});

double total_variation(const SimplexWeights& a, const SimplexWeights& b);

}  // namespace mailnet

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

#include "mailnet/wasserstein.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "laplacian.hpp"
#include "mailnet/error.hpp"
#include "mailnet/parallel.hpp"
#include "mailnet/simd/kernels.hpp"
#include "mailnet/stencil.hpp"

namespace mailnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConductanceFloor = 1e-13;

using Solver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                     Eigen::AMDOrdering<int>>;

void check_weights(const Grid& grid, const SimplexWeights& m) {
  if (m.size() != grid.node_count()) {
    throw InputError("weights have " + std::to_string(m.size()) +
                     " entries for a grid of " +
                     std::to_string(grid.node_count()) + " nodes");
  }
}

void check_pair(const Grid& grid, const NodePair& pair) {
  if (!grid.contains(pair.source) || !grid.contains(pair.sink)) {
    throw InputError("pair endpoint is not a grid node");
  }
}

// Smoothed penalized functional and its derivatives for one pair with fixed
// conductances k.
struct PairFunctional {
  const Grid& grid;
  std::span<const double> k;
  NodePair pair;
  PExponent exponent;
  simd::PenaltyParams params;

  std::vector<double> g, dg, d2g, kdg;

  PairFunctional(const Grid& grid_, std::span<const double> k_, NodePair pair_,
                 PExponent exponent_, double delta)
      : grid(grid_), k(k_), pair(pair_), exponent(exponent_),
        params{exponent_.conjugate(), delta} {
    const std::size_t ne = grid.edge_count();
    g.resize(ne);
    dg.resize(ne);
    d2g.resize(ne);
    kdg.resize(ne);
  }

  double value(std::span<const double> phi) {
    stencil::edge_penalty(grid, phi, params, g.data(), nullptr, nullptr);
    const double penalty = simd::kernels().dot(k.data(), g.data(), g.size());
    return exponent.p() * (phi[pair.source] - phi[pair.sink]) -
           exponent.penalty_factor() * penalty;
  }

  // Gradient over all nodes; also leaves g'' in d2g.
  void gradient(std::span<const double> phi, std::span<double> grad,
                bool with_curvature) {
    stencil::edge_penalty(grid, phi, params, nullptr, dg.data(),
                          with_curvature ? d2g.data() : nullptr);
    std::fill(grad.begin(), grad.end(), 0.0);
    stencil::difference_adjoint(grid, -exponent.penalty_factor(), k, dg, grad);
    grad[pair.source] += exponent.p();
    grad[pair.sink] -= exponent.p();
  }
};

double reduced_sup(std::span<const double> v, const detail::ReducedIndex& idx) {
  double s = 0.0;
  for (NodeIndex z : idx.nodes) s = std::max(s, std::abs(v[z]));
  return s;
}

}  // namespace

PExponent::PExponent(double p) : p_(p), conjugate_(p / (p - 1.0)) {}

PExponent PExponent::from_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InputError("p must exceed 1");
  return PExponent(p);
}

PExponent PExponent::from_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw InputError("sigma must lie in (0, 1)");
  }
  return PExponent(1.0 / sigma);
}

double path_wpp(std::span<const PathSegment> path, const PExponent& exponent) {
  if (path.empty()) throw InputError("path has no segments");
  double total = 0.0;
  for (const PathSegment& s : path) {
    if (!(s.length > 0.0)) throw InputError("segment length must be positive");
    if (!(s.density >= 0.0)) throw InputError("segment density must be >= 0");
    if (s.density == 0.0) return kInf;
    total += s.length * std::pow(s.density, 1.0 - exponent.p());
  }
  return total;
}

double parallel_wpp(std::span<const double> orbit_integrals,
                    const PExponent& exponent) {
  if (orbit_integrals.empty()) throw InputError("no orbits given");
  const double inv = 1.0 / (1.0 - exponent.p());
  double total = 0.0;
  for (double integral : orbit_integrals) {
    if (!(integral > 0.0)) throw InputError("orbit integrals must be positive");
    total += std::pow(integral, inv);
  }
  if (orbit_integrals.size() == 1) return orbit_integrals[0];
  return std::pow(total, 1.0 - exponent.p());
}

std::vector<double> dphi(const Grid& grid, std::span<const double> phi,
                         double conjugate, double delta) {
  if (phi.size() != grid.node_count()) {
    throw InputError("potential size does not match the grid");
  }
  std::vector<double> g(grid.edge_count());
  stencil::edge_penalty(grid, phi, {conjugate, delta}, g.data(), nullptr,
                        nullptr);
  std::vector<double> d(grid.node_count(), 0.0);
  stencil::scatter_add(grid, 1.0, g, d);
  const auto inv = grid.inv_degrees();
  for (std::size_t z = 0; z < d.size(); ++z) d[z] *= inv[z];
  return d;
}

double discrete_wp(const Grid& grid, const SimplexWeights& m,
                   std::span<const double> phi, const NodePair& pair,
                   const PExponent& exponent) {
  check_weights(grid, m);
  check_pair(grid, pair);
  const std::vector<double> d = dphi(grid, phi, exponent.conjugate());
  const double energy =
      simd::kernels().dot(m.values().data(), d.data(), d.size());
  return -exponent.penalty_factor() * energy +
         exponent.p() * (phi[pair.source] - phi[pair.sink]);
}

Potential inner_max(const Grid& grid, const SimplexWeights& m,
                    const NodePair& pair, const PExponent& exponent,
                    const InnerOptions& options) {
  check_weights(grid, m);
  check_pair(grid, pair);
  const std::size_t n = grid.node_count();
  Potential out;
  out.pair = pair;
  out.phi.assign(n, 0.0);
  if (pair.source == pair.sink) return out;

  std::vector<double> k(grid.edge_count());
  stencil::conductances(grid, m.values(), k);
  const std::vector<int> labels = detail::positive_edge_components(grid, k);
  if (labels[pair.source] != labels[pair.sink]) {
    out.disconnected = true;
    out.value = kInf;
    return out;
  }
  const detail::ReducedIndex idx =
      detail::reduce_component(labels, labels[pair.sink], pair.sink);
  // Conductances that are positive but tiny (weights near underflow) are
  // lifted to a floor so the factorizations stay finite.
  {
    const double floor =
        kConductanceFloor * simd::kernels().max(k.data(), k.size());
    for (double& v : k) {
      if (v > 0.0 && v < floor) v = floor;
    }
  }

  // Quadratic problem: L psi = e_x with L the k-weighted Laplacian.
  Solver solver;
  {
    const Eigen::SparseMatrix<double> lap =
        detail::assemble_laplacian(grid, idx, k, 0.0);
    solver.compute(lap);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("weighted Laplacian factorization failed");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(idx.size()));
    rhs[idx.of_node[pair.source]] = 1.0;
    const Eigen::VectorXd psi = solver.solve(rhs);
    for (std::size_t i = 0; i < idx.size(); ++i) out.phi[idx.nodes[i]] = psi[i];
  }

  const double q = exponent.conjugate();
  const double p = exponent.p();
  std::vector<double> grad(n);
  if (q == 2.0) {
    PairFunctional f(grid, k, pair, exponent, 0.0);
    out.value = out.phi[pair.source];
    f.gradient(out.phi, grad, false);
    out.gradient_norm = reduced_sup(grad, idx) / p;
    out.iterations = 1;
    return out;
  }

  // Rescale the quadratic potential along its ray: for phi = t psi the
  // functional is p t B - (p/p') t^q A, maximized at t = (B/A)^(p-1).
  {
    std::vector<double> g(grid.edge_count());
    stencil::edge_penalty(grid, out.phi, {q, 0.0}, g.data(), nullptr, nullptr);
    const double a = simd::kernels().dot(k.data(), g.data(), g.size());
    const double b = out.phi[pair.source];
    const double t = std::pow(b / a, p - 1.0);
    for (double& v : out.phi) v *= t;
  }
  double delta = 0.0;
  if (q < 2.0) {
    double largest = 0.0;
    const auto edges = grid.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (k[e] > 0.0) {
        largest = std::max(largest, std::abs(out.phi[edges[e].lo] - out.phi[edges[e].hi]));
      }
    }
    delta = options.smoothing * largest;
  }
  out.delta = delta;

  PairFunctional f(grid, k, pair, exponent, delta);
  std::vector<double> h(grid.edge_count());
  std::vector<double> trial(n);
  double value = f.value(out.phi);
  bool pattern_ready = false;
  out.converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    f.gradient(out.phi, grad, true);
    out.gradient_norm = reduced_sup(grad, idx) / p;
    out.iterations = it;
    if (out.gradient_norm < options.tolerance) {
      out.converged = true;
      break;
    }
    double max_h = 0.0;
    for (std::size_t e = 0; e < h.size(); ++e) {
      h[e] = exponent.penalty_factor() * k[e] * f.d2g[e];
      max_h = std::max(max_h, h[e]);
    }
    const Eigen::SparseMatrix<double> hess =
        detail::assemble_laplacian(grid, idx, h, 1e-14 * max_h);
    if (!pattern_ready) {
      solver.analyzePattern(hess);
      pattern_ready = true;
    }
    solver.factorize(hess);
    if (solver.info() != Eigen::Success) break;
    Eigen::VectorXd rhs(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) rhs[i] = grad[idx.nodes[i]];
    const Eigen::VectorXd step = solver.solve(rhs);
    const double slope = rhs.dot(step);
    if (!(slope > 0.0)) break;

    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
      trial = out.phi;
      for (std::size_t i = 0; i < idx.size(); ++i) trial[idx.nodes[i]] += s * step[i];
      const double tv = f.value(trial);
      const bool armijo = tv >= value + 1e-4 * s * slope;
      // Near the optimum the ascent is below the rounding of the value.
      const bool flat = std::abs(tv - value) <= 1e-13 * std::abs(value) && s == 1.0;
      if (armijo || flat) {
        out.phi.swap(trial);
        value = tv;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!out.converged) {
    f.gradient(out.phi, grad, false);
    out.gradient_norm = reduced_sup(grad, idx) / p;
    out.converged = out.gradient_norm < options.tolerance;
  }
  out.value = value;
  return out;
}

PrimalEvaluation evaluate_primal(const Grid& grid, const SimplexWeights& m,
                                 std::span<const NodePair> pairs,
                                 const PExponent& exponent,
                                 const InnerOptions& options) {
  check_weights(grid, m);
  PrimalEvaluation out;
  out.potentials.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    out.potentials[i] = inner_max(grid, m, pairs[i], exponent, options);
  });
  out.gradient.assign(grid.node_count(), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Potential& pot = out.potentials[i];
    out.converged = out.converged && pot.converged;
    if (pot.disconnected) {
      out.value = kInf;
      continue;
    }
    out.value += pairs[i].mass * pot.value;
    const std::vector<double> d =
        dphi(grid, pot.phi, exponent.conjugate(), pot.delta);
    simd::kernels().axpy(-exponent.penalty_factor() * pairs[i].mass, d.data(),
                         d.size(), out.gradient.data());
  }
  return out;
}

double primal_objective(const Grid& grid, const SimplexWeights& m,
                        std::span<const NodePair> pairs,
                        const PExponent& exponent,
                        const InnerOptions& options) {
  return evaluate_primal(grid, m, pairs, exponent, options).value;
}

}  // namespace mailnet

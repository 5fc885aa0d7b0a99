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

#include "mailnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "mailnet/error.hpp"

namespace mailnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> flat_dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> v(n);
  for (double& x : v) x = draw(rng);
  return v;
}

// Euclidean projection onto {u >= 0, sum u = 1}.
std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

}  // namespace

OracleResult primal_min_direct(const Grid& grid, std::span<const NodePair> pairs,
                               const PExponent& exponent, int steps,
                               double eta0) {
  if (steps < 1) throw InputError("oracle needs at least one step");
  if (grid.node_count() > 64) throw InputError("primal oracle is limited to 64 nodes");
  const std::size_t n = grid.node_count();
  OracleResult out;
  out.method = "primal_min_direct";
  std::vector<double> log_m(n, 0.0), m(n, 1.0 / n), average(n, 0.0);
  double weight_sum = 0.0;
  double best = kInf;
  std::vector<double> best_m = m;
  for (int t = 1; t <= steps; ++t) {
    const SimplexWeights w = SimplexWeights::normalized(m);
    const PrimalEvaluation ev = evaluate_primal(grid, w, pairs, exponent);
    out.converged = out.converged && ev.converged;
    if (ev.value < best) {
      best = ev.value;
      best_m = m;
    }
    const double eta = eta0 / std::sqrt(static_cast<double>(t));
    for (std::size_t z = 0; z < n; ++z) average[z] += eta * m[z];
    weight_sum += eta;
    double scale = 0.0;
    for (double g : ev.gradient) scale = std::max(scale, std::abs(g));
    if (!(scale > 0.0)) break;
    for (std::size_t z = 0; z < n; ++z) log_m[z] -= eta * ev.gradient[z] / scale;
    const double top = *std::max_element(log_m.begin(), log_m.end());
    double sum = 0.0;
    for (std::size_t z = 0; z < n; ++z) sum += m[z] = std::exp(log_m[z] - top);
    for (double& v : m) v /= sum;
    out.count = t;
  }
  for (double& v : average) v /= weight_sum;
  const double averaged =
      primal_objective(grid, SimplexWeights::normalized(average), pairs, exponent);
  if (averaged <= best) {
    out.value = averaged;
    out.argument = std::move(average);
  } else {
    out.value = best;
    out.argument = std::move(best_m);
  }
  out.infinite = std::isinf(out.value);
  return out;
}

EmbeddedTree star_tree(const Grid& grid, const TerminalSet& terminals,
                       NodeIndex center) {
  if (!grid.contains(center)) throw InputError("center is not a grid node");
  std::map<NodeIndex, std::size_t> vertex_of;
  std::vector<Point> vertices;
  auto vertex = [&](NodeIndex z) {
    auto [it, inserted] = vertex_of.emplace(z, vertices.size());
    if (inserted) vertices.push_back(grid.position(z));
    return it->second;
  };
  const std::size_t c = vertex(center);
  std::vector<std::size_t> sources, sinks;
  for (NodeIndex z : terminals.sources()) sources.push_back(vertex(z));
  for (NodeIndex z : terminals.sinks()) sinks.push_back(vertex(z));
  std::vector<TreeEdge> edges;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (v != c) edges.push_back({c, v});
  }
  return EmbeddedTree::create(grid.dimension(), std::move(vertices),
                              std::move(edges), std::move(sources),
                              std::move(sinks));
}

OracleResult branch_point_search(const Grid& grid, const TerminalSet& terminals,
                                 const MailingPlan& plan, double sigma) {
  OracleResult out;
  out.method = "branch_point_search";
  out.value = kInf;
  for (NodeIndex v = 0; v < static_cast<NodeIndex>(grid.node_count()); ++v) {
    const double cost = gilbert_cost(star_tree(grid, terminals, v), plan, sigma);
    ++out.count;
    if (cost < out.value) {
      out.value = cost;
      out.node = v;
    }
  }
  const Point p = grid.position(out.node);
  out.argument.assign(p.begin(), p.begin() + grid.dimension());
  return out;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, double step) {
  if (!(step > 0.0)) throw InputError("finite-difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double up = f(x);
    x[i] = keep - step;
    const double down = f(x);
    x[i] = keep;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

ConvexityReport convexity_probe(const Grid& grid, std::span<const NodePair> pairs,
                                const PExponent& exponent, int trials,
                                std::uint64_t seed, double tolerance) {
  ConvexityReport out;
  out.seed = seed;
  out.worst_margin = -kInf;
  std::mt19937_64 rng(seed);
  const std::size_t n = grid.node_count();
  for (int t = 0; t < trials; ++t) {
    const SimplexWeights a = SimplexWeights::normalized(flat_dirichlet(rng, n));
    const SimplexWeights b = SimplexWeights::normalized(flat_dirichlet(rng, n));
    const double fa = primal_objective(grid, a, pairs, exponent);
    const double fb = primal_objective(grid, b, pairs, exponent);
    for (double lambda : {0.25, 0.5, 0.75}) {
      std::vector<double> mix(n);
      for (std::size_t z = 0; z < n; ++z) mix[z] = lambda * a[z] + (1.0 - lambda) * b[z];
      const double fm = primal_objective(grid, SimplexWeights::normalized(mix), pairs, exponent);
      out.worst_margin = std::max(out.worst_margin, fm - (lambda * fa + (1.0 - lambda) * fb));
    }
    ++out.trials;
  }
  out.passed = out.worst_margin <= tolerance;
  return out;
}

OracleResult budget_min_direct(const EmbeddedTree& tree, const MailingPlan& plan,
                               double alpha, int steps) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (steps < 1) throw InputError("oracle needs at least one step");
  const EdgeFlow flows = compute_edge_flows(tree, plan);
  const auto lengths = tree.lengths();
  std::vector<std::size_t> used;
  std::vector<double> coef;  // w |e|^(1+alpha), so H = sum coef u^-alpha
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    if (flows.flow[e] > 0.0) {
      used.push_back(e);
      coef.push_back(flows.flow[e] * std::pow(lengths[e], 1.0 + alpha));
    }
  }
  if (used.empty()) throw InputError("every edge flow is zero");
  const std::size_t k = used.size();
  auto objective = [&](const std::vector<double>& u) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(u[i] > 0.0)) return kInf;
      total += coef[i] * std::pow(u[i], -alpha);
    }
    return total;
  };

  OracleResult out;
  out.method = "budget_min_direct";
  std::vector<double> u(k, 1.0 / k), grad(k);
  double value = objective(u);
  double eta = 0.0;
  out.converged = false;
  for (int it = 0; it < steps; ++it) {
    double gmax = 0.0, gmin = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      grad[i] = -alpha * coef[i] * std::pow(u[i], -alpha - 1.0);
      gmax = std::max(gmax, std::abs(grad[i]));
      gmin = std::min(gmin, std::abs(grad[i]));
    }
    out.count = it;
    // Stationary on the simplex interior: all partial derivatives agree.
    if (gmax - gmin <= 1e-12 * gmax) {
      out.converged = true;
      break;
    }
    if (eta == 0.0) eta = 0.1 / gmax;
    bool accepted = false;
    for (int ls = 0; ls < 100; ++ls, eta *= 0.5) {
      std::vector<double> trial(k);
      for (std::size_t i = 0; i < k; ++i) trial[i] = u[i] - eta * grad[i];
      trial = project_simplex(std::move(trial));
      const double tv = objective(trial);
      double decrease = 0.0;
      for (std::size_t i = 0; i < k; ++i) decrease += grad[i] * (trial[i] - u[i]);
      if (tv <= value + 1e-4 * decrease) {
        const bool stalled = tv >= value;
        u = std::move(trial);
        value = tv;
        accepted = !stalled;
        break;
      }
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    eta *= 2.0;
  }
  CostBudget budget{std::vector<double>(tree.edge_count(), 0.0), alpha};
  for (std::size_t i = 0; i < k; ++i) budget.s[used[i]] = u[i] / lengths[used[i]];
  out.value = transport_cost(tree, budget, flows);
  out.argument = std::move(budget.s);
  return out;
}

OracleResult entropic_simplex_min(std::span<const double> c, double eps, int steps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (c.empty()) throw InputError("empty energy vector");
  const std::size_t n = c.size();
  auto objective = [&](const std::vector<double>& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += -m[i] * c[i] + eps * m[i] * std::log(m[i]);
    return total;
  };
  OracleResult out;
  out.method = "entropic_simplex_min";
  out.converged = false;
  std::vector<double> m(n, 1.0 / n), g(n), dm(n), trial(n);
  double value = objective(m);
  double c_scale = 1.0;
  for (double v : c) c_scale = std::max(c_scale, std::abs(v));
  for (int it = 0; it < steps; ++it) {
    out.count = it;
    for (std::size_t i = 0; i < n; ++i) g[i] = -c[i] + eps * (std::log(m[i]) + 1.0);
    double nu = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nu += m[i] * g[i];
      mass += m[i];
    }
    nu /= mass;
    double decrement = 0.0, tau = 1.0, residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dm[i] = -(m[i] / eps) * (g[i] - nu);
      decrement += (m[i] / eps) * (g[i] - nu) * (g[i] - nu);
      residual = std::max(residual, m[i] * std::abs(g[i] - nu));
      if (dm[i] < 0.0) tau = std::min(tau, 0.99 * m[i] / -dm[i]);
    }
    // Weighted stationarity: m_i |g_i - nu| bounds the Newton change of m_i.
    if (residual <= 1e-12 * c_scale) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, tau *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = m[i] + tau * dm[i];
      const double tv = objective(trial);
      if (tv <= value - 1e-4 * tau * decrement) {
        m.swap(trial);
        value = tv;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  double sum = 0.0;
  for (double v : m) sum += v;
  for (double& v : m) v /= sum;
  out.value = objective(m);
  out.argument = std::move(m);
  return out;
}

}  // namespace mailnet

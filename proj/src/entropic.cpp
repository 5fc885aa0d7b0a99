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

#include "mailnet/entropic.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mailnet/error.hpp"
#include "mailnet/parallel.hpp"
#include "mailnet/simd/kernels.hpp"
#include "mailnet/stencil.hpp"

namespace mailnet {
namespace {

using Solver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                     Eigen::AMDOrdering<int>>;
using Triplet = Eigen::Triplet<double>;

// Newton damping, relative to the largest diagonal entry.
constexpr double kDampingMin = 1e-8;
constexpr double kDampingMax = 1e4;
constexpr double kDampingCut = 0.5;  // raise when the accepted step is shorter

// The dual is -a * gamma * lse(c / gamma) + p sum pi (phi(x) - phi(y)).
struct Scaling {
  double a;
  double gamma;
};

Scaling scaling(const DualSettings& s) {
  if (!(s.eps > 0.0)) throw InputError("eps must be positive");
  if (s.convention == Convention::kPrinted) return {0.5, 2.0 * s.eps};
  return {s.exponent.penalty_factor(), s.eps};
}

void check_potentials(const Grid& grid, const PotentialSet& pot) {
  if (pot.phi.size() != pot.pairs.size()) {
    throw InputError("potential set has mismatched pair and potential counts");
  }
  for (std::size_t a = 0; a < pot.size(); ++a) {
    if (pot.phi[a].size() != grid.node_count()) {
      throw InputError("potential " + std::to_string(a) +
                       " does not match the grid");
    }
    if (!grid.contains(pot.pairs[a].source) || !grid.contains(pot.pairs[a].sink)) {
      throw InputError("pair endpoint is not a grid node");
    }
  }
}

double linear_term(const PotentialSet& pot, double p) {
  double total = 0.0;
  for (std::size_t a = 0; a < pot.size(); ++a) {
    const NodePair& q = pot.pairs[a];
    total += q.mass * (pot.phi[a][q.source] - pot.phi[a][q.sink]);
  }
  return p * total;
}

struct Evaluation {
  std::vector<std::vector<double>> g, dg, d2g;  // per pair, per edge
  std::vector<double> c;
  std::vector<double> m;
  double value = 0.0;
};

// order 0: value; 1: also g'; 2: also g''.
void evaluate(const Grid& grid, const PotentialSet& pot,
              const DualSettings& settings, int order, Evaluation& ev) {
  const Scaling sc = scaling(settings);
  const std::size_t n = grid.node_count();
  const std::size_t ne = grid.edge_count();
  const std::size_t np = pot.size();
  ev.g.resize(np);
  ev.dg.resize(np);
  ev.d2g.resize(np);
  const simd::PenaltyParams params{settings.exponent.conjugate(), settings.delta};
  parallel_for(np, [&](std::size_t a) {
    ev.g[a].resize(ne);
    if (order >= 1) ev.dg[a].resize(ne);
    if (order >= 2) ev.d2g[a].resize(ne);
    stencil::edge_penalty(grid, pot.phi[a], params, ev.g[a].data(),
                          order >= 1 ? ev.dg[a].data() : nullptr,
                          order >= 2 ? ev.d2g[a].data() : nullptr);
  });
  ev.c.assign(n, 0.0);
  for (std::size_t a = 0; a < np; ++a) {
    stencil::scatter_add(grid, pot.pairs[a].mass, ev.g[a], ev.c);
  }
  const auto inv = grid.inv_degrees();
  for (std::size_t z = 0; z < n; ++z) ev.c[z] *= inv[z];

  const simd::KernelTable& k = simd::kernels();
  ev.m.resize(n);
  const double top = k.max(ev.c.data(), n);
  const double sum = k.exp_shifted(ev.c.data(), n, top, 1.0 / sc.gamma, ev.m.data());
  const double lse = top / sc.gamma + std::log(sum);
  for (double& v : ev.m) v /= sum;
  ev.value = -sc.a * sc.gamma * lse + linear_term(pot, settings.exponent.p());
}

void fill_gradient(const Grid& grid, const PotentialSet& pot,
                   const DualSettings& settings, const Evaluation& ev,
                   std::vector<double>& k,
                   std::vector<std::vector<double>>& grad) {
  const Scaling sc = scaling(settings);
  const double p = settings.exponent.p();
  k.resize(grid.edge_count());
  stencil::conductances(grid, ev.m, k);
  grad.resize(pot.size());
  parallel_for(pot.size(), [&](std::size_t a) {
    const NodePair& q = pot.pairs[a];
    grad[a].assign(grid.node_count(), 0.0);
    stencil::difference_adjoint(grid, -sc.a * q.mass, k, ev.dg[a], grad[a]);
    grad[a][q.source] += p * q.mass;
    grad[a][q.sink] -= p * q.mass;
  });
}

double sup_norm(const std::vector<std::vector<double>>& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, simd::kernels().max_abs(x.data(), x.size()));
  return s;
}

// Newton system over the potentials with each pair's sink removed.
class NewtonSystem {
 public:
  NewtonSystem(const Grid& grid, const std::vector<NodePair>& pairs)
      : grid_(grid), pairs_(pairs), n_(grid.node_count()) {
    // CSR slot -> edge id.
    const auto edges = grid.edges();
    slot_edge_.assign(2 * edges.size(), -1);
    std::vector<std::size_t> offset(n_ + 1, 0);
    for (std::size_t z = 0; z < n_; ++z) offset[z + 1] = offset[z] + grid.degree(z);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      for (NodeIndex end : {edges[e].lo, edges[e].hi}) {
        const NodeIndex other = end == edges[e].lo ? edges[e].hi : edges[e].lo;
        const auto nb = grid.neighbors(end);
        for (std::size_t s = 0; s < nb.size(); ++s) {
          if (nb[s] == other) slot_edge_[offset[end] + s] = static_cast<int>(e);
        }
      }
    }
    slot_offset_ = std::move(offset);
  }

  std::size_t size() const { return pairs_.size() * (n_ - 1); }

  int index(std::size_t a, NodeIndex z) const {
    const NodeIndex y = pairs_[a].sink;
    if (z == y) return -1;
    return static_cast<int>(a * (n_ - 1)) + (z < y ? z : z - 1);
  }

  // Solves (-Hessian + damping * max diag * I) d = grad. Returns false if
  // factorization fails.
  bool direction(const DualSettings& settings, const Evaluation& ev,
                 std::span<const double> k,
                 const std::vector<std::vector<double>>& grad, double damping,
                 Eigen::VectorXd& d) {
    const Scaling sc = scaling(settings);
    const std::size_t np = pairs_.size();
    const int dim = static_cast<int>(size());
    triplets_.clear();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);

    // Block Laplacians a * pi * k * g''.
    const auto edges = grid_.edges();
    for (std::size_t a = 0; a < np; ++a) {
      const double scale = sc.a * pairs_[a].mass;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = scale * k[e] * ev.d2g[a][e];
        const int i = index(a, edges[e].lo), j = index(a, edges[e].hi);
        if (i >= 0) diag[i] += w;
        if (j >= 0) diag[j] += w;
        if (i >= 0 && j >= 0) triplets_.emplace_back(std::max(i, j), std::min(i, j), -w);
      }
    }

    // Covariance of the energy gradients under m: rank-one pieces per node
    // here, the mean term through Sherman-Morrison below.
    std::vector<int> idx;
    std::vector<double> val;
    for (std::size_t z = 0; z < n_; ++z) {
      idx.clear();
      val.clear();
      const auto nb = grid_.neighbors(static_cast<NodeIndex>(z));
      const double inv_deg = 1.0 / static_cast<double>(nb.size());
      for (std::size_t a = 0; a < np; ++a) {
        const double scale = pairs_[a].mass * inv_deg;
        double self = 0.0;
        const int iz = index(a, static_cast<NodeIndex>(z));
        for (std::size_t s = 0; s < nb.size(); ++s) {
          const double gp = scale * ev.dg[a][slot_edge_[slot_offset_[z] + s]];
          // d t_e / d phi(lo) = +1, d t_e / d phi(hi) = -1.
          const bool z_is_lo = static_cast<NodeIndex>(z) < nb[s];
          self += z_is_lo ? gp : -gp;
          const int iw = index(a, nb[s]);
          if (iw >= 0) {
            idx.push_back(iw);
            val.push_back(z_is_lo ? -gp : gp);
          }
        }
        if (iz >= 0) {
          idx.push_back(iz);
          val.push_back(self);
        }
      }
      const double weight = sc.a * ev.m[z] / sc.gamma;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        mu[idx[r]] += ev.m[z] * val[r];
        diag[idx[r]] += weight * val[r] * val[r];
        for (std::size_t s = 0; s < idx.size(); ++s) {
          if (idx[s] < idx[r]) {
            triplets_.emplace_back(idx[r], idx[s], weight * val[r] * val[s]);
          }
        }
      }
    }
    const double ridge = (1e-13 + damping) * std::max(diag.maxCoeff(), 1e-300);
    for (int i = 0; i < dim; ++i) triplets_.emplace_back(i, i, diag[i] + ridge);

    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(triplets_.begin(), triplets_.end());
    if (!pattern_ready_) {
      solver_.analyzePattern(h);
      pattern_ready_ = true;
    }
    solver_.factorize(h);
    if (solver_.info() != Eigen::Success) return false;

    Eigen::VectorXd rhs(dim);
    for (std::size_t a = 0; a < np; ++a) {
      for (std::size_t z = 0; z < n_; ++z) {
        const int i = index(a, static_cast<NodeIndex>(z));
        if (i >= 0) rhs[i] = grad[a][z];
      }
    }
    const Eigen::VectorXd u = std::sqrt(sc.a / sc.gamma) * mu;
    const Eigen::VectorXd x = solver_.solve(rhs);
    const Eigen::VectorXd w = solver_.solve(u);
    const double denom = 1.0 - u.dot(w);
    d = x;
    if (denom > 1e-14) d += w * (u.dot(x) / denom);
    return d.allFinite();
  }

  void unpack(const Eigen::VectorXd& d, std::vector<std::vector<double>>& out) const {
    out.resize(pairs_.size());
    for (std::size_t a = 0; a < pairs_.size(); ++a) {
      out[a].assign(n_, 0.0);
      for (std::size_t z = 0; z < n_; ++z) {
        const int i = index(a, static_cast<NodeIndex>(z));
        if (i >= 0) out[a][z] = d[i];
      }
    }
  }

 private:
  const Grid& grid_;
  const std::vector<NodePair>& pairs_;
  std::size_t n_;
  std::vector<int> slot_edge_;
  std::vector<std::size_t> slot_offset_;
  std::vector<Triplet> triplets_;
  Solver solver_;
  bool pattern_ready_ = false;
};

double dot(const std::vector<std::vector<double>>& x,
           const std::vector<std::vector<double>>& y) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    s += simd::kernels().dot(x[a].data(), y[a].data(), x[a].size());
  }
  return s;
}

struct StageOutcome {
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  bool monotone = true;
};

// Maximizes the dual for one eps level in place.
StageOutcome ascend(const Grid& grid, PotentialSet& pot,
                    const DualSettings& settings, const AnnealSchedule& schedule,
                    AscentMethod method, NewtonSystem& newton, Evaluation& ev) {
  StageOutcome out;
  const double p = settings.exponent.p();
  const int order = method == AscentMethod::kNewton ? 2 : 1;
  std::vector<double> k;
  std::vector<std::vector<double>> grad, step;
  Eigen::VectorXd d;
  PotentialSet trial = pot;
  Evaluation trial_ev;
  double gradient_step = 1.0;
  // Levenberg-Marquardt damping of the Newton system, raised while the line
  // search has to cut steps and dropped again once full steps are accepted.
  double damping = 0.0;
  // Previous accepted gradient move, for the Barzilai-Borwein trial step.
  std::vector<std::vector<double>> last_move, last_grad;

  evaluate(grid, pot, settings, order, ev);
  for (int it = 0;; ++it) {
    fill_gradient(grid, pot, settings, ev, k, grad);
    out.gradient_norm = sup_norm(grad) / p;
    out.iterations = it;
    if (out.gradient_norm < schedule.tolerance) {
      out.converged = true;
      break;
    }
    if (it >= schedule.max_iterations) break;

    double s = 1.0;
    bool newton_step = false;
    if (method == AscentMethod::kNewton && newton.direction(settings, ev, k, grad, damping, d)) {
      newton.unpack(d, step);
      newton_step = dot(grad, step) > 0.0;
    }
    if (!newton_step) {
      if (!last_move.empty()) {
        double ss = 0.0, sy = 0.0;
        for (std::size_t a = 0; a < grad.size(); ++a) {
          for (std::size_t z = 0; z < grad[a].size(); ++z) {
            const double y = grad[a][z] - last_grad[a][z];
            ss += last_move[a][z] * last_move[a][z];
            sy += last_move[a][z] * y;
          }
        }
        if (sy < 0.0) gradient_step = ss / -sy;
      }
      step = grad;
      s = gradient_step;
    }
    const double slope = dot(grad, step);
    const double roundoff =
        1e-13 * (std::abs(ev.value) + std::abs(linear_term(pot, p)));

    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
      for (std::size_t a = 0; a < pot.size(); ++a) {
        trial.phi[a] = pot.phi[a];
        simd::kernels().axpy(s, step[a].data(), step[a].size(), trial.phi[a].data());
      }
      evaluate(grid, trial, settings, 0, trial_ev);
      const bool armijo = trial_ev.value >= ev.value + 1e-4 * s * slope;
      const bool flat = newton_step && s == 1.0 &&
                        std::abs(trial_ev.value - ev.value) <= roundoff;
      if (armijo || flat) {
        if (trial_ev.value < ev.value - roundoff) out.monotone = false;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (newton_step) {
      if (s < kDampingCut) {
        damping = std::min(std::max(10.0 * damping, kDampingMin), kDampingMax);
      } else if (s == 1.0) {
        damping = damping > kDampingMin ? 0.1 * damping : 0.0;
      }
    } else {
      gradient_step = 2.0 * s;
      last_grad = grad;
      last_move = step;
      for (auto& v : last_move) {
        for (double& x : v) x *= s;
      }
    }
    std::swap(pot.phi, trial.phi);
    pot.gauge();
    evaluate(grid, pot, settings, order, ev);
  }
  return out;
}

double largest_edge_difference(const Grid& grid, const PotentialSet& pot) {
  double largest = 0.0;
  for (const auto& phi : pot.phi) {
    for (const Edge& e : grid.edges()) {
      largest = std::max(largest, std::abs(phi[e.lo] - phi[e.hi]));
    }
  }
  return largest;
}

std::string describe_stage(std::size_t i, const StageRecord& r) {
  std::ostringstream os;
  os << "stage " << i << " (eps level " << r.eps_level << ")";
  return os.str();
}

}  // namespace

PotentialSet PotentialSet::zeros(const Grid& grid, std::vector<NodePair> pairs) {
  PotentialSet out;
  out.phi.assign(pairs.size(), std::vector<double>(grid.node_count(), 0.0));
  out.pairs = std::move(pairs);
  return out;
}

void PotentialSet::gauge() {
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const double shift = phi[a][pairs[a].sink];
    if (shift != 0.0) {
      for (double& v : phi[a]) v -= shift;
    }
  }
}

std::vector<double> aggregate_energy(const Grid& grid,
                                     const PotentialSet& potentials,
                                     double conjugate, double delta) {
  check_potentials(grid, potentials);
  std::vector<double> c(grid.node_count(), 0.0);
  for (std::size_t a = 0; a < potentials.size(); ++a) {
    const std::vector<double> d = dphi(grid, potentials.phi[a], conjugate, delta);
    simd::kernels().axpy(potentials.pairs[a].mass, d.data(), d.size(), c.data());
  }
  return c;
}

SimplexWeights entropic_weights(std::span<const double> c, double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (c.empty()) throw InputError("empty energy vector");
  const simd::KernelTable& k = simd::kernels();
  std::vector<double> m(c.size());
  const double top = k.max(c.data(), c.size());
  const double sum = k.exp_shifted(c.data(), c.size(), top, 1.0 / eps, m.data());
  for (double& v : m) v /= sum;
  return SimplexWeights::normalized(std::move(m));
}

double dual_objective(const Grid& grid, const PotentialSet& potentials,
                      const DualSettings& settings) {
  check_potentials(grid, potentials);
  Evaluation ev;
  evaluate(grid, potentials, settings, 0, ev);
  return ev.value;
}

std::vector<std::vector<double>> dual_gradient(const Grid& grid,
                                               const PotentialSet& potentials,
                                               const DualSettings& settings) {
  check_potentials(grid, potentials);
  Evaluation ev;
  evaluate(grid, potentials, settings, 1, ev);
  std::vector<double> k;
  std::vector<std::vector<double>> grad;
  fill_gradient(grid, potentials, settings, ev, k, grad);
  return grad;
}

double entropic_primal(const Grid& grid, const SimplexWeights& m,
                       const PotentialSet& potentials,
                       const DualSettings& settings) {
  check_potentials(grid, potentials);
  if (m.size() != grid.node_count()) throw InputError("weights do not match the grid");
  const PExponent& e = settings.exponent;
  const std::vector<double> c =
      aggregate_energy(grid, potentials, e.conjugate(), settings.delta);
  const double energy = simd::kernels().dot(m.values().data(), c.data(), c.size());
  double entropy = 0.0;
  for (double v : m.values()) {
    if (v > 0.0) entropy += v * std::log(v);
  }
  return -e.penalty_factor() * energy + linear_term(potentials, e.p()) +
         settings.eps * e.penalty_factor() * entropy;
}

void AnnealSchedule::validate() const {
  if (!(eps_start > 0.0) || !(eps_floor > 0.0)) {
    throw InputError("schedule eps values must be positive");
  }
  if (eps_start < eps_floor) throw InputError("eps_start must be >= eps_floor");
  if (!(factor > 0.0 && factor < 1.0)) throw InputError("decay factor must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw InputError("schedule tolerance must be positive");
  if (max_iterations < 1) throw InputError("max_iterations must be positive");
}

std::vector<double> AnnealSchedule::levels() const {
  validate();
  std::vector<double> out;
  for (double eps = eps_start; eps > eps_floor * (1.0 + 1e-12); eps *= factor) {
    out.push_back(eps);
  }
  out.push_back(eps_floor);
  return out;
}

SolveResult solve(const Grid& grid, const std::vector<NodePair>& pairs,
                  const PExponent& exponent, const SolveOptions& options) {
  const std::vector<double> levels = options.schedule.levels();
  if (pairs.empty()) throw InputError("no active pairs to solve for");
  if (!(options.smoothing >= 0.0)) throw InputError("smoothing must be >= 0");
  if (!(options.init_noise >= 0.0)) throw InputError("init_noise must be >= 0");
  for (const NodePair& q : pairs) {
    if (!grid.contains(q.source) || !grid.contains(q.sink)) {
      throw InputError("pair endpoint is not a grid node");
    }
    if (!(q.mass > 0.0)) throw InputError("active pairs need positive mass");
  }

  SolveResult out;
  out.potentials = PotentialSet::zeros(grid, pairs);
  PotentialSet& pot = out.potentials;

  // Uniform m supplies the scale of eps, of the smoothing and of the noise.
  PrimalEvaluation reference =
      evaluate_primal(grid, uniform_weights(grid), pairs, exponent, options.inner);
  double scale = reference.value;
  PotentialSet reference_pot = PotentialSet::zeros(grid, pairs);
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    reference_pot.phi[a] = reference.potentials[a].phi;
  }
  if (options.init_noise > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      const auto& ref = reference_pot.phi[a];
      const double amp = options.init_noise *
                         simd::kernels().max_abs(ref.data(), ref.size());
      for (double& v : pot.phi[a]) v = amp * normal(rng);
    }
    pot.gauge();
  }

  NewtonSystem newton(grid, pot.pairs);
  Evaluation ev;
  const double q = exponent.conjugate();
  const double log_n = std::log(static_cast<double>(grid.node_count()));
  out.diagnostics.converged = true;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    StageRecord rec;
    rec.eps_level = levels[i];
    rec.eps = options.schedule.relative ? levels[i] * scale : levels[i];
    if (q < 2.0) {
      const double spread = largest_edge_difference(grid, i == 0 ? reference_pot : pot);
      rec.delta = options.smoothing * spread;
    }
    const DualSettings settings{exponent, rec.eps, rec.delta, options.convention};
    const StageOutcome st = ascend(grid, pot, settings, options.schedule,
                                   options.method, newton, ev);
    rec.iterations = st.iterations;
    rec.gradient_norm = st.gradient_norm;
    rec.converged = st.converged;
    rec.monotone = st.monotone;
    rec.dual = ev.value;
    rec.dual_offset = ev.value + rec.eps * exponent.penalty_factor() * log_n;

    out.m = SimplexWeights::normalized(ev.m);
    rec.entropic_primal = entropic_primal(grid, out.m, pot, settings);
    rec.gap = std::abs(rec.dual - rec.entropic_primal);
    const PrimalEvaluation primal =
        evaluate_primal(grid, out.m, pairs, exponent, options.inner);
    rec.primal = primal.value;
    if (std::isfinite(primal.value) && primal.value > 0.0) scale = primal.value;

    if (!rec.converged) {
      out.diagnostics.converged = false;
      std::ostringstream os;
      os << describe_stage(i, rec) << " stopped at sup|grad|/p = "
         << rec.gradient_norm << " after " << rec.iterations << " iterations";
      out.diagnostics.warnings.push_back(os.str());
    }
    if (!rec.monotone) {
      out.diagnostics.warnings.push_back(describe_stage(i, rec) +
                                         " accepted a decreasing step");
    }
    if (options.convention == Convention::kConsistent &&
        rec.gap > 1e-8 * std::max(1.0, std::abs(rec.dual))) {
      std::ostringstream os;
      os << describe_stage(i, rec) << " has saddle gap " << rec.gap;
      out.diagnostics.warnings.push_back(os.str());
    }
    out.diagnostics.stages.push_back(rec);
  }
  return out;
}

double total_variation(const SimplexWeights& a, const SimplexWeights& b) {
  if (a.size() != b.size()) throw InputError("weights have different sizes");
  double s = 0.0;
  for (std::size_t z = 0; z < a.size(); ++z) s += std::abs(a[z] - b[z]);
  return 0.5 * s;
}

}  // namespace mailnet

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

#include "mailnet/run.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mailnet/error.hpp"

namespace mailnet::io {
namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

bool has_convergence_warning(const SolveDiagnostics& diagnostics) {
  return !diagnostics.converged || !diagnostics.warnings.empty();
}

RunResult run_solve(const RunConfig& config, const Problem& problem) {
  RunResult r;
  r.config = config;
  SolveResult solved = solve(problem.grid, problem.pairs, problem.exponent, config.solve);
  r.m = std::move(solved.m);
  r.potentials = std::move(solved.potentials);
  r.diagnostics = std::move(solved.diagnostics);
  r.primal = primal_objective(problem.grid, r.m, problem.pairs, problem.exponent,
                              config.solve.inner);

  const OracleResult star = branch_point_search(problem.grid, problem.terminals,
                                                problem.plan, problem.exponent.sigma());
  TreeifyResult treeify;
  r.extraction = extract(problem.grid, r.m, problem.terminals, problem.plan,
                         problem.exponent.sigma(), config.tau, star.value, &treeify);
  r.tree = std::move(treeify.tree);
  if (treeify.terminals_connected) {
    r.network = {std::move(treeify.nodes), std::move(treeify.edges)};
  } else {
    SupportGraph graph = support_graph(problem.grid, r.m, problem.terminals,
                                       problem.plan, config.tau);
    r.network = {std::move(graph.nodes), std::move(graph.edges)};
  }
  return r;
}

std::string solve_summary(const RunResult& r, const Problem& problem, double seconds) {
  std::ostringstream out;
  const auto dims = problem.grid.dims();
  out << "grid";
  for (int n : dims) out << ' ' << n;
  out << ", spacing " << problem.grid.spacing() << ", p " << problem.exponent.p()
      << " (sigma " << problem.exponent.sigma() << ")\n";
  for (const auto& t : problem.sources) {
    out << "source node " << t.node << " snapped by " << t.snap_distance << '\n';
  }
  for (const auto& t : problem.sinks) {
    out << "sink node " << t.node << " snapped by " << t.snap_distance << '\n';
  }
  out << "stages " << r.diagnostics.stages.size() << ", converged "
      << (r.diagnostics.converged ? "yes" : "no") << '\n';
  if (!r.diagnostics.stages.empty()) {
    const StageRecord& last = r.diagnostics.stages.back();
    out << "final eps " << last.eps << ", dual " << fmt("%.10g", last.dual)
        << ", saddle gap " << last.gap << '\n';
  }
  out << "primal H_p(m) " << fmt("%.12g", r.primal) << '\n';
  const ExtractionReport& e = r.extraction;
  out << "is_tree " << (e.is_tree ? "true" : "false") << ", components "
      << e.component_count << ", cycles " << e.cycle_count << ", pruned "
      << e.pruned << '\n';
  if (e.is_tree) {
    out << "branch vertices " << e.branch_vertices.size() << '\n';
    for (const BranchVertex& b : e.branch_vertices) {
      out << "  (" << b.position[0] << ", " << b.position[1] << ") degree " << b.degree << '\n';
    }
    out << "Gilbert cost " << fmt("%.8g", e.gilbert_cost) << " (grid path), "
        << fmt("%.8g", e.skeleton_gilbert_cost) << " (straight)\n";
    out << "length " << fmt("%.8g", e.length) << " (grid path), "
        << fmt("%.8g", e.skeleton_length) << " (straight)\n";
  }
  if (e.oracle_value) out << "star search minimum " << fmt("%.8g", *e.oracle_value) << '\n';
  if (e.oracle_gap) out << "gap to star search " << fmt("%+.4f", *e.oracle_gap) << '\n';
  for (const std::string& w : r.diagnostics.warnings) out << "warning: " << w << '\n';
  out << "runtime " << fmt("%.2f", seconds) << " s\n";
  return out.str();
}

EvalReport run_eval(const EmbeddedTree& tree, const MailingPlan& plan, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw InputError("sigma must lie in (0, 1)");
  EvalReport r;
  r.sigma = sigma;
  r.alpha = 1.0 / sigma - 1.0;
  r.flows = compute_edge_flows(tree, plan);
  r.kirchhoff = kirchhoff_residual(tree, plan, r.flows);
  r.gilbert = gilbert_cost(tree, r.flows, sigma);
  r.budget = optimal_budget(tree, plan, r.alpha);
  r.transport = transport_cost(tree, r.budget, r.flows);
  return r;
}

std::string format_eval(const EmbeddedTree& tree, const EvalReport& r) {
  std::ostringstream out;
  out << "sigma " << r.sigma << ", alpha " << r.alpha << '\n';
  out << "G = " << fmt("%.12g", r.gilbert) << '\n';
  out << "H = " << fmt("%.12g", r.transport) << '\n';
  out << "budget used " << fmt("%.12g", budget_used(tree, r.budget)) << '\n';
  out << "kirchhoff residual " << r.kirchhoff << '\n';
  out << "edge\ta\tb\tlength\tw\ts\n";
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    out << e << '\t' << tree.edges()[e].a << '\t' << tree.edges()[e].b << '\t'
        << fmt("%.10g", tree.lengths()[e]) << '\t' << fmt("%.10g", r.flows.flow[e])
        << '\t' << fmt("%.10g", r.budget.s[e]) << '\n';
  }
  return out.str();
}

Json run_oracle(const RunConfig& config, const Problem& problem, const std::string& method) {
  const double sigma = problem.exponent.sigma();
  if (method == "primal") {
    return oracle_to_json(primal_min_direct(problem.grid, problem.pairs,
                                            problem.exponent, config.oracle.steps));
  }
  if (method == "star") {
    return oracle_to_json(
        branch_point_search(problem.grid, problem.terminals, problem.plan, sigma));
  }
  if (method == "budget") {
    const OracleResult star =
        branch_point_search(problem.grid, problem.terminals, problem.plan, sigma);
    const EmbeddedTree tree = star_tree(problem.grid, problem.terminals, star.node);
    const double alpha = config.oracle.alpha.value_or(problem.exponent.p() - 1.0);
    Json out = oracle_to_json(budget_min_direct(tree, problem.plan, alpha, config.oracle.steps));
    out["alpha"] = alpha;
    out["closed_form"] = min_transport_cost(tree, problem.plan, alpha);
    out["tree"] = tree_to_json(tree);
    return out;
  }
  if (method == "convexity") {
    return convexity_to_json(convexity_probe(problem.grid, problem.pairs, problem.exponent,
                                             config.oracle.trials, config.solve.seed));
  }
  throw InputError("oracle method must be primal, star, budget or convexity");
}

}  // namespace mailnet::io

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

// The four subcommands as library calls: solve, eval, oracle and render.

#include <filesystem>
#include <string>
#include <vector>

#include "mailnet/io.hpp"

namespace mailnet::io {

// Solve, re-evaluate H_p(m), run the star search and extract the network.
RunResult run_solve(const RunConfig& config, const Problem& problem);
std::string solve_summary(const RunResult& result, const Problem& problem,
                          double seconds);
// True when the solve reported non-convergence or any warning.
bool has_convergence_warning(const SolveDiagnostics& diagnostics);

struct EvalReport {
  double sigma = 0.0;
  double alpha = 0.0;  // 1/sigma - 1
  EdgeFlow flows;
  double gilbert = 0.0;
  double transport = 0.0;  // H(T) at the optimal budget
  CostBudget budget;
  double kirchhoff = 0.0;
};

EvalReport run_eval(const EmbeddedTree& tree, const MailingPlan& plan, double sigma);
std::string format_eval(const EmbeddedTree& tree, const EvalReport& report);

// method is one of primal, star, budget, convexity.
Json run_oracle(const RunConfig& config, const Problem& problem,
                const std::string& method);

enum class RenderStyle { kHeatmap, kNetwork };

// Writes <stem>_<style>.svg and <stem>_m.csv into dir and returns both paths.
std::vector<std::filesystem::path> run_render(const RunResult& result,
                                              const Problem& problem,
                                              RenderStyle style,
                                              const std::filesystem::path& dir,
                                              const std::string& stem);

std::string render_svg(const RunResult& result, const Problem& problem,
                       RenderStyle style);
std::string render_csv(const RunResult& result, const Problem& problem);

}  // namespace mailnet::io

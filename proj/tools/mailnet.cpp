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

// mailnet: solve, evaluate, cross-check and render mailing Gilbert networks.
//
//   mailnet solve --config run.json [--out dir]
//   mailnet eval --tree tree.json --plan plan.json --sigma 0.5
//   mailnet oracle --config run.json --method primal|star|budget|convexity
//   mailnet render --result dir/result.json --style heatmap|network
//
// MAILNET_WORKERS caps the worker count. Exit status: 0 success, 1 input
// error, 2 convergence warning. Failures print one JSON error record on
// stderr.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mailnet/error.hpp"
#include "mailnet/io.hpp"
#include "mailnet/run.hpp"

namespace {

namespace fs = std::filesystem;
using mailnet::io::Json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kConvergenceWarning = 2;

int report_error(const char* kind, const std::string& message, int status) {
  const Json record = {{"error", {{"kind", kind}, {"message", message}, {"status", status}}}};
  std::cerr << record.dump() << '\n';
  return status;
}

int cmd_solve(const std::string& config_path, const std::string& out_override) {
  mailnet::io::RunConfig config = mailnet::io::load_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  const mailnet::io::Problem problem = mailnet::io::resolve(config);

  const auto start = std::chrono::steady_clock::now();
  const mailnet::io::RunResult result = mailnet::io::run_solve(config, problem);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(config.output_dir);
  mailnet::io::write_json(dir / "result.json", mailnet::io::result_to_json(result, problem));
  if (result.tree) mailnet::io::write_json(dir / "tree.json", mailnet::io::tree_to_json(*result.tree));
  mailnet::io::write_json(dir / "plan.json", mailnet::io::plan_to_json(problem.plan));
  const std::string summary = mailnet::io::solve_summary(result, problem, seconds);
  std::ofstream(dir / "summary.txt") << summary;
  std::cout << summary << "wrote " << (dir / "result.json").string() << '\n';
  return mailnet::io::has_convergence_warning(result.diagnostics) ? kConvergenceWarning : kOk;
}

int cmd_eval(const std::string& tree_path, const std::string& plan_path, double sigma) {
  const mailnet::EmbeddedTree tree = mailnet::io::tree_from_json(mailnet::io::read_json(tree_path));
  const mailnet::MailingPlan plan = mailnet::io::plan_from_json(mailnet::io::read_json(plan_path));
  const mailnet::io::EvalReport report = mailnet::io::run_eval(tree, plan, sigma);
  std::cout << mailnet::io::format_eval(tree, report);
  return kOk;
}

int cmd_oracle(const std::string& config_path, const std::string& method,
               const std::string& out_override) {
  mailnet::io::RunConfig config = mailnet::io::load_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  const mailnet::io::Problem problem = mailnet::io::resolve(config);
  const Json out = mailnet::io::run_oracle(config, problem, method);
  const fs::path path = fs::path(config.output_dir) / ("oracle_" + method + ".json");
  mailnet::io::write_json(path, out);
  std::cout << out.dump(1) << '\n';
  if (out.contains("converged") && !out["converged"].get<bool>()) return kConvergenceWarning;
  return kOk;
}

int cmd_render(const std::string& result_path, const std::string& style,
               const std::string& out_override) {
  const mailnet::io::RunResult result =
      mailnet::io::result_from_json(mailnet::io::read_json(result_path));
  const mailnet::io::Problem problem = mailnet::io::resolve(result.config);
  const fs::path dir = out_override.empty() ? fs::path(result_path).parent_path() : fs::path(out_override);
  const auto paths = mailnet::io::run_render(
      result, problem,
      style == "network" ? mailnet::io::RenderStyle::kNetwork : mailnet::io::RenderStyle::kHeatmap,
      dir.empty() ? fs::path(".") : dir, fs::path(result_path).stem().string());
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mailing Gilbert networks on grids via entropic conditional Wasserstein duals"};
  app.require_subcommand(1);

  std::string config_path, out_dir, tree_path, plan_path, method, result_path, style;
  double sigma = 0.5;

  CLI::App* solve = app.add_subcommand("solve", "Solve a configured instance and extract its network");
  solve->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "Output directory (overrides the config)");

  CLI::App* eval = app.add_subcommand("eval", "Print G, H and edge tables for a tree");
  eval->add_option("--tree", tree_path, "Tree document")->required()->check(CLI::ExistingFile);
  eval->add_option("--plan", plan_path, "Plan document")->required()->check(CLI::ExistingFile);
  eval->add_option("--sigma", sigma, "Gilbert exponent in (0, 1)")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "Run a brute-force reference");
  oracle->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  oracle->add_option("--method", method, "Reference method")
      ->required()
      ->check(CLI::IsMember({"primal", "star", "budget", "convexity"}));
  oracle->add_option("--out", out_dir, "Output directory (overrides the config)");

  CLI::App* render = app.add_subcommand("render", "Write an SVG and a CSV of m");
  render->add_option("--result", result_path, "Result document")->required()->check(CLI::ExistingFile);
  render->add_option("--style", style, "heatmap or network")
      ->required()
      ->check(CLI::IsMember({"heatmap", "network"}));
  render->add_option("--out", out_dir, "Output directory (default: next to the result)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kInputError);
  }

  try {
    if (*solve) return cmd_solve(config_path, out_dir);
    if (*eval) return cmd_eval(tree_path, plan_path, sigma);
    if (*oracle) return cmd_oracle(config_path, method, out_dir);
    if (*render) return cmd_render(result_path, style, out_dir);
  } catch (const mailnet::InputError& e) {
    return report_error("input", e.what(), kInputError);
  } catch (const mailnet::ConvergenceError& e) {
    return report_error("convergence", e.what(), kConvergenceWarning);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kInputError);
  }
  return kInputError;
}

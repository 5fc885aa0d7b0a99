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
#include <filesystem>
#include <fstream>
#include <string>

#include "mailnet/error.hpp"
#include "mailnet/io.hpp"
#include "mailnet/run.hpp"

namespace mailnet::io {
namespace {

namespace fs = std::filesystem;

Json minimal_config() {
  return Json::parse(R"({
    "schema": "mailnet.config/1",
    "grid": {"dims": [5, 5], "spacing": 0.25},
    "terminals": {"sources": [[0.0, 0.0]], "sinks": [[1.0, 1.0]]},
    "plan": [{"source": 0, "sink": 0, "mass": 1.0}],
    "sigma": 0.5
  })");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mailnet_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(LoadConfig, MinimalConfigGetsDefaults) {
  const RunConfig c = parse_config(minimal_config());
  EXPECT_EQ(c.dims, (std::vector<int>{5, 5}));
  EXPECT_EQ(c.sigma, 0.5);
  EXPECT_FALSE(c.p.has_value());
  EXPECT_DOUBLE_EQ(c.tau, 0.05);
  EXPECT_EQ(c.solve.method, AscentMethod::kNewton);
  EXPECT_EQ(c.solve.convention, Convention::kConsistent);
  EXPECT_DOUBLE_EQ(c.solve.schedule.eps_floor, AnnealSchedule{}.eps_floor);
  EXPECT_EQ(c.solve.seed, 0u);
  EXPECT_EQ(c.output_dir, "out");

  const Json echo = config_to_json(c);
  EXPECT_TRUE(echo.contains("schedule"));
  EXPECT_TRUE(echo.contains("solver"));
  EXPECT_EQ(echo["extraction"]["tau"], 0.05);
  // The echo parses back to the same document.
  EXPECT_EQ(config_to_json(parse_config(echo)).dump(), echo.dump());
}

TEST(LoadConfig, DefaultSpacingSpansTheUnitBox) {
  Json doc = minimal_config();
  doc["grid"].erase("spacing");
  EXPECT_DOUBLE_EQ(parse_config(doc).spacing, 0.25);
}

TEST(LoadConfig, SigmaAndPAreExclusive) {
  Json both = minimal_config();
  both["p"] = 2.0;
  EXPECT_NE(error_of(both).find("exactly one"), std::string::npos);
  Json neither = minimal_config();
  neither.erase("sigma");
  EXPECT_NE(error_of(neither).find("exactly one"), std::string::npos);
}

TEST(LoadConfig, ErrorsCarryFieldPaths) {
  Json doc = minimal_config();
  doc["sigma"] = 1.0;
  EXPECT_EQ(error_of(doc), "config.sigma: expected a value in (0, 1)");

  doc = minimal_config();
  doc["grid"]["dims"][1] = 1;
  EXPECT_EQ(error_of(doc), "config.grid.dims[1]: expected an integer >= 2");

  doc = minimal_config();
  doc["plan"][0]["sink"] = 3;
  EXPECT_EQ(error_of(doc), "config.plan[0].sink: index out of range");

  doc = minimal_config();
  doc["schedule"] = {{"factor", 1.5}};
  EXPECT_EQ(error_of(doc).rfind("config.schedule:", 0), 0u);

  doc = minimal_config();
  doc["extraction"] = {{"threshold", 0.1}};
  EXPECT_EQ(error_of(doc), "config.extraction: unknown field \"threshold\"");

  doc = minimal_config();
  doc.erase("terminals");
  EXPECT_EQ(error_of(doc), "config.terminals: required field is missing");

  doc = minimal_config();
  doc["schema"] = "mailnet.config/0";
  EXPECT_NE(error_of(doc).find("config.schema"), std::string::npos);
}

TEST(Resolve, SnapsToNearestNodeAndReportsDistance) {
  Json doc = minimal_config();
  doc["grid"] = {{"dims", {3, 3}}, {"spacing", 0.5}};
  doc["terminals"]["sources"] = {{0.49, 0.51}};
  const Problem problem = resolve(parse_config(doc));
  ASSERT_EQ(problem.sources.size(), 1u);
  EXPECT_EQ(problem.sources[0].node, 4);
  EXPECT_NEAR(problem.sources[0].snap_distance, std::hypot(0.01, 0.01), 1e-15);
  EXPECT_EQ(problem.sinks[0].node, 8);
  EXPECT_DOUBLE_EQ(problem.sinks[0].snap_distance, 0.0);
}

TEST(Resolve, RejectsTerminalsSnappingTogether) {
  Json doc = minimal_config();
  doc["terminals"]["sinks"] = {{1.0, 1.0}, {0.99, 0.98}};
  doc["plan"] = {{{"source", 0}, {"sink", 0}, {"mass", 0.5}},
                 {{"source", 0}, {"sink", 1}, {"mass", 0.5}}};
  EXPECT_THROW(resolve(parse_config(doc)), InputError);
}

TEST(TreeDocument, RoundTrips) {
  const EmbeddedTree tree = EmbeddedTree::create(
      2, {{0, 0, 0}, {0, 2, 0}, {1, 1, 0}, {3, 1, 0}}, {{0, 2}, {1, 2}, {2, 3}}, {0, 1}, {3});
  const Json doc = tree_to_json(tree);
  EXPECT_EQ(doc["schema"], kTreeSchema);
  const EmbeddedTree back = tree_from_json(doc);
  EXPECT_EQ(back.vertex_count(), 4u);
  EXPECT_EQ(tree_to_json(back).dump(), doc.dump());
  Json bad = doc;
  bad["edges"][0][1] = 9;
  EXPECT_THROW(tree_from_json(bad), InputError);
}

TEST(Eval, StarTreeCostsFour) {
  const fs::path dir = scratch_dir("eval");
  const EmbeddedTree tree = EmbeddedTree::create(
      2, {{0, 0, 0}, {0, 2, 0}, {1, 1, 0}, {3, 1, 0}}, {{0, 2}, {1, 2}, {2, 3}}, {0, 1}, {3});
  const MailingPlan plan = MailingPlan::create(2, 1, {{0, 0, 0.5}, {1, 0, 0.5}});
  write_json(dir / "tree.json", tree_to_json(tree));
  write_json(dir / "plan.json", plan_to_json(plan));

  const EmbeddedTree t = tree_from_json(read_json(dir / "tree.json"));
  const MailingPlan p = plan_from_json(read_json(dir / "plan.json"));
  const EvalReport r = run_eval(t, p, 0.5);
  EXPECT_NEAR(r.gilbert, 4.0, 1e-12);
  EXPECT_NEAR(r.transport, 16.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
  const std::string text = format_eval(t, r);
  EXPECT_NE(text.find("G = 4\n"), std::string::npos);
  EXPECT_NE(text.find("H = 16\n"), std::string::npos);
}

class SolvedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Json doc = minimal_config();
    doc["terminals"] = {{"sources", {{0.0, 0.25}, {0.0, 0.75}}}, {"sinks", {{1.0, 0.5}}}};
    doc["plan"] = {{{"source", 0}, {"sink", 0}, {"mass", 0.5}},
                   {{"source", 1}, {"sink", 0}, {"mass", 0.5}}};
    doc["seed"] = 7;
    doc["solver"] = {{"init_noise", 0.1}};
    config_ = new RunConfig(parse_config(doc));
    problem_ = new Problem(resolve(*config_));
    result_ = new RunResult(run_solve(*config_, *problem_));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete problem_;
    delete config_;
  }

  static RunConfig* config_;
  static Problem* problem_;
  static RunResult* result_;
};

RunConfig* SolvedRun::config_ = nullptr;
Problem* SolvedRun::problem_ = nullptr;
RunResult* SolvedRun::result_ = nullptr;

TEST_F(SolvedRun, SaveLoadReproducesThePrimal) {
  const fs::path dir = scratch_dir("roundtrip");
  write_json(dir / "result.json", result_to_json(*result_, *problem_));
  const RunResult back = result_from_json(read_json(dir / "result.json"));
  const Problem problem = resolve(back.config);
  const double again =
      primal_objective(problem.grid, back.m, problem.pairs, problem.exponent, back.config.solve.inner);
  EXPECT_NEAR(again, back.primal, 1e-10 * std::abs(back.primal));
  EXPECT_EQ(back.primal, result_->primal);
  EXPECT_EQ(back.potentials.size(), 2u);
  EXPECT_EQ(back.network.edges.size(), result_->network.edges.size());
}

TEST_F(SolvedRun, SameConfigAndSeedGiveIdenticalPayload) {
  const RunResult again = run_solve(*config_, *problem_);
  EXPECT_EQ(result_to_json(again, *problem_).dump(), result_to_json(*result_, *problem_).dump());
}

TEST_F(SolvedRun, RenderWritesOneSvgAndOneCsv) {
  const fs::path dir = scratch_dir("render");
  for (RenderStyle style : {RenderStyle::kHeatmap, RenderStyle::kNetwork}) {
    const auto paths = run_render(*result_, *problem_, style, dir, "result");
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0].extension(), ".svg");
    EXPECT_EQ(paths[1].extension(), ".csv");
    std::ifstream svg(paths[0]);
    std::string head;
    std::getline(svg, head);
    EXPECT_EQ(head.rfind("<svg", 0), 0u);
  }
  std::ifstream csv(dir / "result_m.csv");
  std::string line;
  int rows = -1;
  double total = 0.0;
  while (std::getline(csv, line)) {
    if (++rows == 0) continue;
    total += std::stod(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 25);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST_F(SolvedRun, OracleMethods) {
  const Json star = run_oracle(*config_, *problem_, "star");
  EXPECT_EQ(star["method"], "branch_point_search");
  EXPECT_TRUE(star["value"].is_number());
  const Json budget = run_oracle(*config_, *problem_, "budget");
  EXPECT_NEAR(budget["value"].get<double>(), budget["closed_form"].get<double>(),
              1e-6 * budget["closed_form"].get<double>());
  RunConfig few = *config_;
  few.oracle.trials = 5;
  const Json convexity = run_oracle(few, *problem_, "convexity");
  EXPECT_TRUE(convexity["passed"].get<bool>());
  EXPECT_THROW(run_oracle(*config_, *problem_, "simplex"), InputError);
}

}  // namespace
}  // namespace mailnet::io

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

// Run configuration, result persistence and the tree and plan exchange
// documents. Everything is JSON with a "schema" tag.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mailnet/entropic.hpp"
#include "mailnet/extraction.hpp"
#include "mailnet/grid.hpp"
#include "mailnet/oracle.hpp"
#include "mailnet/tree.hpp"
#include "mailnet/wasserstein.hpp"

namespace mailnet::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "mailnet.config/1";
inline constexpr const char* kResultSchema = "mailnet.result/1";
inline constexpr const char* kTreeSchema = "mailnet.tree/1";
inline constexpr const char* kPlanSchema = "mailnet.plan/1";
inline constexpr const char* kOracleSchema = "mailnet.oracle/1";

struct OracleConfig {
  int steps = 2000;    // mirror descent or projected descent iterations
  int trials = 100;    // convexity probes
  std::optional<double> alpha;  // budget exponent; unset means p - 1
};

struct RunConfig {
  std::vector<int> dims;
  double spacing = 0.0;  // 0 means 1 / (max dim - 1)
  std::vector<Point> sources;  // physical coordinates
  std::vector<Point> sinks;
  std::vector<PlanEntry> plan;
  std::optional<double> sigma;
  std::optional<double> p;
  SolveOptions solve;
  double tau = 0.05;
  OracleConfig oracle;
  std::string output_dir = "out";

  PExponent exponent() const;
};

struct SnappedTerminal {
  Point requested{};
  NodeIndex node = 0;
  Point position{};
  double snap_distance = 0.0;
};

// A config resolved against its grid.
struct Problem {
  Grid grid;
  TerminalSet terminals;
  MailingPlan plan;
  PExponent exponent;
  std::vector<SnappedTerminal> sources;
  std::vector<SnappedTerminal> sinks;
  std::vector<NodePair> pairs;
};

// Both throw InputError naming the offending field, e.g.
// "config.grid.dims[1]: expected an integer >= 2".
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);
// The config with every default filled in.
Json config_to_json(const RunConfig& config);
Problem resolve(const RunConfig& config);

Json tree_to_json(const EmbeddedTree& tree);
EmbeddedTree tree_from_json(const Json& doc);
Json plan_to_json(const MailingPlan& plan);
MailingPlan plan_from_json(const Json& doc);

Json oracle_to_json(const OracleResult& result);
Json convexity_to_json(const ConvexityReport& report);
Json diagnostics_to_json(const SolveDiagnostics& diagnostics);
Json extraction_to_json(const ExtractionReport& report);

// The network drawn by render: the tree when one was extracted, otherwise
// the pruned terminal component or, failing that, the whole support graph.
struct Network {
  std::vector<NodeIndex> nodes;
  std::vector<Edge> edges;
};

struct RunResult {
  RunConfig config;
  SimplexWeights m;
  PotentialSet potentials;
  SolveDiagnostics diagnostics;
  double primal = 0.0;  // H_p(m) re-evaluated with the configured inner options
  ExtractionReport extraction;
  std::optional<EmbeddedTree> tree;
  Network network;
};

Json result_to_json(const RunResult& result, const Problem& problem);
// Restores config, m, potentials, primal and the network. Diagnostics and
// the extraction report are kept only as raw JSON in the document.
RunResult result_from_json(const Json& doc);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace mailnet::io

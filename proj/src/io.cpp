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

#include "mailnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "mailnet/error.hpp"

namespace mailnet::io {
namespace {

// Cursor into a JSON document that remembers its path for error messages.
class Field {
 public:
  Field(const Json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const Json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(path_ + ": " + what);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, unused] : value_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* k) { return key == k; })) {
        fail("unknown field \"" + key + "\"");
      }
    }
  }

  bool has(const char* key) const { return value_.contains(key); }

  Field operator[](const char* key) const {
    if (!value_.contains(key)) {
      throw InputError(path_ + "." + key + ": required field is missing");
    }
    return Field(value_.at(key), path_ + "." + key);
  }

  Field at(std::size_t i) const {
    return Field(value_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  double number_or(const char* key, double fallback) const {
    return has(key) ? (*this)[key].number() : fallback;
  }
  long long integer_or(const char* key, long long fallback) const {
    return has(key) ? (*this)[key].integer() : fallback;
  }

 private:
  const Json& value_;
  std::string path_;
};

void check_schema(const Field& doc, const char* expected) {
  const std::string tag = doc["schema"].string();
  if (tag != expected) {
    doc["schema"].fail("expected \"" + std::string(expected) + "\", got \"" + tag + "\"");
  }
}

Point point_from(const Field& f, int dimension) {
  const std::size_t n = f.array_size();
  if (n != static_cast<std::size_t>(dimension)) {
    f.fail("expected " + std::to_string(dimension) + " coordinates");
  }
  Point p{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < n; ++a) p[a] = f.at(a).number();
  return p;
}

Json point_json(const Point& p, int dimension) {
  Json out = Json::array();
  for (int a = 0; a < dimension; ++a) out.push_back(p[a]);
  return out;
}

std::vector<Point> points_from(const Field& f, int dimension) {
  std::vector<Point> out;
  const std::size_t n = f.array_size();
  if (n == 0) f.fail("expected at least one point");
  for (std::size_t i = 0; i < n; ++i) out.push_back(point_from(f.at(i), dimension));
  return out;
}

const char* method_name(AscentMethod m) {
  return m == AscentMethod::kNewton ? "newton" : "gradient";
}
const char* convention_name(Convention c) {
  return c == Convention::kConsistent ? "consistent" : "printed";
}

std::vector<PlanEntry> entries_from(const Field& f) {
  std::vector<PlanEntry> out;
  const std::size_t n = f.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    const Field e = f.at(i);
    e.expect_object({"source", "sink", "mass"});
    const long long s = e["source"].integer();
    const long long t = e["sink"].integer();
    if (s < 0) e["source"].fail("expected a nonnegative index");
    if (t < 0) e["sink"].fail("expected a nonnegative index");
    out.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(t),
                   e["mass"].number()});
  }
  return out;
}

Json entries_json(std::span<const PlanEntry> entries) {
  Json out = Json::array();
  for (const PlanEntry& e : entries) {
    out.push_back({{"source", e.source}, {"sink", e.sink}, {"mass", e.mass}});
  }
  return out;
}

Json doubles(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

std::vector<double> doubles_from(const Field& f) {
  const std::size_t n = f.array_size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f.at(i).number();
  return out;
}

Json snapped_json(const SnappedTerminal& t, int dimension) {
  return {{"requested", point_json(t.requested, dimension)},
          {"node", t.node},
          {"position", point_json(t.position, dimension)},
          {"snap_distance", t.snap_distance}};
}

}  // namespace

PExponent RunConfig::exponent() const {
  if (sigma.has_value() == p.has_value()) {
    throw InputError("config: give exactly one of \"sigma\" and \"p\"");
  }
  return sigma ? PExponent::from_sigma(*sigma) : PExponent::from_p(*p);
}

RunConfig parse_config(const Json& doc) {
  const Field root(doc, "config");
  root.expect_object({"schema", "grid", "terminals", "plan", "sigma", "p",
                      "schedule", "solver", "extraction", "oracle", "seed",
                      "output_dir"});
  check_schema(root, kConfigSchema);
  RunConfig c;

  const Field grid = root["grid"];
  grid.expect_object({"dims", "spacing"});
  const Field dims = grid["dims"];
  const std::size_t d = dims.array_size();
  if (d < 1 || d > 3) dims.fail("expected 1 to 3 entries");
  for (std::size_t a = 0; a < d; ++a) {
    const long long n = dims.at(a).integer();
    if (n < 2 || n > 100000) dims.at(a).fail("expected an integer >= 2");
    c.dims.push_back(static_cast<int>(n));
  }
  if (grid.has("spacing")) {
    c.spacing = grid["spacing"].number();
    if (!(c.spacing > 0.0)) grid["spacing"].fail("expected a positive number");
  } else {
    c.spacing = 1.0 / (*std::max_element(c.dims.begin(), c.dims.end()) - 1);
  }

  const Field terminals = root["terminals"];
  terminals.expect_object({"sources", "sinks"});
  const int dim = static_cast<int>(d);
  c.sources = points_from(terminals["sources"], dim);
  c.sinks = points_from(terminals["sinks"], dim);

  const Field plan = root["plan"];
  c.plan = entries_from(plan);
  for (std::size_t i = 0; i < c.plan.size(); ++i) {
    if (c.plan[i].source >= c.sources.size()) {
      plan.at(i)["source"].fail("index out of range");
    }
    if (c.plan[i].sink >= c.sinks.size()) {
      plan.at(i)["sink"].fail("index out of range");
    }
  }

  if (root.has("sigma") == root.has("p")) {
    root.fail("give exactly one of \"sigma\" and \"p\"");
  }
  if (root.has("sigma")) {
    c.sigma = root["sigma"].number();
    if (!(*c.sigma > 0.0 && *c.sigma < 1.0)) root["sigma"].fail("expected a value in (0, 1)");
  } else {
    c.p = root["p"].number();
    if (!(*c.p > 1.0)) root["p"].fail("expected a value > 1");
  }

  AnnealSchedule& s = c.solve.schedule;
  if (root.has("schedule")) {
    const Field f = root["schedule"];
    f.expect_object({"eps_start", "factor", "eps_floor", "tolerance",
                     "max_iterations", "relative"});
    s.eps_start = f.number_or("eps_start", s.eps_start);
    s.factor = f.number_or("factor", s.factor);
    s.eps_floor = f.number_or("eps_floor", s.eps_floor);
    s.tolerance = f.number_or("tolerance", s.tolerance);
    s.max_iterations = static_cast<int>(f.integer_or("max_iterations", s.max_iterations));
    if (f.has("relative")) s.relative = f["relative"].boolean();
    try {
      s.validate();
    } catch (const InputError& e) {
      f.fail(e.what());
    }
  }

  if (root.has("solver")) {
    const Field f = root["solver"];
    f.expect_object({"method", "convention", "smoothing", "init_noise",
                     "inner_tolerance", "inner_max_iterations"});
    if (f.has("method")) {
      const std::string m = f["method"].string();
      if (m == "newton") c.solve.method = AscentMethod::kNewton;
      else if (m == "gradient") c.solve.method = AscentMethod::kGradient;
      else f["method"].fail("expected \"newton\" or \"gradient\"");
    }
    if (f.has("convention")) {
      const std::string m = f["convention"].string();
      if (m == "consistent") c.solve.convention = Convention::kConsistent;
      else if (m == "printed") c.solve.convention = Convention::kPrinted;
      else f["convention"].fail("expected \"consistent\" or \"printed\"");
    }
    c.solve.smoothing = f.number_or("smoothing", c.solve.smoothing);
    if (!(c.solve.smoothing >= 0.0)) f["smoothing"].fail("expected a nonnegative number");
    c.solve.init_noise = f.number_or("init_noise", c.solve.init_noise);
    if (!(c.solve.init_noise >= 0.0)) f["init_noise"].fail("expected a nonnegative number");
    c.solve.inner.tolerance = f.number_or("inner_tolerance", c.solve.inner.tolerance);
    if (!(c.solve.inner.tolerance > 0.0)) f["inner_tolerance"].fail("expected a positive number");
    c.solve.inner.max_iterations = static_cast<int>(
        f.integer_or("inner_max_iterations", c.solve.inner.max_iterations));
    if (c.solve.inner.max_iterations < 1) f["inner_max_iterations"].fail("expected a positive integer");
  }
  c.solve.inner.smoothing = c.solve.smoothing;

  if (root.has("extraction")) {
    const Field f = root["extraction"];
    f.expect_object({"tau"});
    c.tau = f.number_or("tau", c.tau);
    if (!(c.tau > 0.0 && c.tau <= 1.0)) f["tau"].fail("expected a value in (0, 1]");
  }

  if (root.has("oracle")) {
    const Field f = root["oracle"];
    f.expect_object({"steps", "trials", "alpha"});
    c.oracle.steps = static_cast<int>(f.integer_or("steps", c.oracle.steps));
    if (c.oracle.steps < 1) f["steps"].fail("expected a positive integer");
    c.oracle.trials = static_cast<int>(f.integer_or("trials", c.oracle.trials));
    if (c.oracle.trials < 1) f["trials"].fail("expected a positive integer");
    if (f.has("alpha")) {
      c.oracle.alpha = f["alpha"].number();
      if (!(*c.oracle.alpha > 0.0)) f["alpha"].fail("expected a positive number");
    }
  }

  if (root.has("seed")) {
    const long long seed = root["seed"].integer();
    if (seed < 0) root["seed"].fail("expected a nonnegative integer");
    c.solve.seed = static_cast<std::uint64_t>(seed);
  }
  if (root.has("output_dir")) c.output_dir = root["output_dir"].string();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json(path));
}

Json config_to_json(const RunConfig& c) {
  const int dim = static_cast<int>(c.dims.size());
  Json out;
  out["schema"] = kConfigSchema;
  out["grid"] = {{"dims", c.dims}, {"spacing", c.spacing}};
  Json sources = Json::array();
  Json sinks = Json::array();
  for (const Point& p : c.sources) sources.push_back(point_json(p, dim));
  for (const Point& p : c.sinks) sinks.push_back(point_json(p, dim));
  out["terminals"] = {{"sources", sources}, {"sinks", sinks}};
  out["plan"] = entries_json(c.plan);
  if (c.sigma) out["sigma"] = *c.sigma;
  if (c.p) out["p"] = *c.p;
  const AnnealSchedule& s = c.solve.schedule;
  out["schedule"] = {{"eps_start", s.eps_start},     {"factor", s.factor},
                     {"eps_floor", s.eps_floor},     {"tolerance", s.tolerance},
                     {"max_iterations", s.max_iterations}, {"relative", s.relative}};
  out["solver"] = {{"method", method_name(c.solve.method)},
                   {"convention", convention_name(c.solve.convention)},
                   {"smoothing", c.solve.smoothing},
                   {"init_noise", c.solve.init_noise},
                   {"inner_tolerance", c.solve.inner.tolerance},
                   {"inner_max_iterations", c.solve.inner.max_iterations}};
  out["extraction"] = {{"tau", c.tau}};
  out["oracle"] = {{"steps", c.oracle.steps}, {"trials", c.oracle.trials}};
  if (c.oracle.alpha) out["oracle"]["alpha"] = *c.oracle.alpha;
  out["seed"] = c.solve.seed;
  out["output_dir"] = c.output_dir;
  return out;
}

Problem resolve(const RunConfig& c) {
  Grid grid = Grid::build(c.dims, c.spacing);
  auto snap = [&](const std::vector<Point>& points, const char* what) {
    std::vector<SnappedTerminal> out;
    std::set<NodeIndex> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      SnappedTerminal t;
      t.requested = points[i];
      t.node = grid.nearest_node(std::span<const double>(points[i].data(), 3), &t.snap_distance);
      t.position = grid.position(t.node);
      if (!seen.insert(t.node).second) {
        throw InputError("config.terminals." + std::string(what) + "[" +
                         std::to_string(i) + "]: snaps onto the same node as an earlier entry");
      }
      out.push_back(t);
    }
    return out;
  };
  std::vector<SnappedTerminal> sources = snap(c.sources, "sources");
  std::vector<SnappedTerminal> sinks = snap(c.sinks, "sinks");
  std::vector<NodeIndex> a, b;
  for (const auto& t : sources) a.push_back(t.node);
  for (const auto& t : sinks) b.push_back(t.node);
  TerminalSet terminals = TerminalSet::create(grid, a, b);
  MailingPlan plan = MailingPlan::create(sources.size(), sinks.size(), c.plan);
  std::vector<NodePair> pairs = resolve_pairs(terminals, plan);
  return Problem{std::move(grid), std::move(terminals), std::move(plan),
                 c.exponent(),    std::move(sources),   std::move(sinks),
                 std::move(pairs)};
}

Json tree_to_json(const EmbeddedTree& tree) {
  Json vertices = Json::array();
  for (const Point& p : tree.vertices()) vertices.push_back(point_json(p, tree.dimension()));
  Json edges = Json::array();
  for (const TreeEdge& e : tree.edges()) edges.push_back({e.a, e.b});
  return {{"schema", kTreeSchema},
          {"dimension", tree.dimension()},
          {"vertices", vertices},
          {"edges", edges},
          {"sources", std::vector<std::size_t>(tree.sources().begin(), tree.sources().end())},
          {"sinks", std::vector<std::size_t>(tree.sinks().begin(), tree.sinks().end())}};
}

EmbeddedTree tree_from_json(const Json& doc) {
  const Field root(doc, "tree");
  root.expect_object({"schema", "dimension", "vertices", "edges", "sources", "sinks"});
  check_schema(root, kTreeSchema);
  const long long dim = root["dimension"].integer();
  if (dim < 1 || dim > 3) root["dimension"].fail("expected 1, 2 or 3");
  std::vector<Point> vertices = points_from(root["vertices"], static_cast<int>(dim));
  auto index = [&](const Field& f) {
    const long long v = f.integer();
    if (v < 0 || static_cast<std::size_t>(v) >= vertices.size()) {
      f.fail("vertex index out of range");
    }
    return static_cast<std::size_t>(v);
  };
  std::vector<TreeEdge> edges;
  const Field e = root["edges"];
  for (std::size_t i = 0; i < e.array_size(); ++i) {
    const Field pair = e.at(i);
    if (pair.array_size() != 2) pair.fail("expected two vertex indices");
    edges.push_back({index(pair.at(0)), index(pair.at(1))});
  }
  auto list = [&](const Field& f) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < f.array_size(); ++i) out.push_back(index(f.at(i)));
    return out;
  };
  return EmbeddedTree::create(static_cast<int>(dim), std::move(vertices), std::move(edges),
                              list(root["sources"]), list(root["sinks"]));
}

Json plan_to_json(const MailingPlan& plan) {
  return {{"schema", kPlanSchema},
          {"sources", plan.source_count()},
          {"sinks", plan.sink_count()},
          {"entries", entries_json(plan.entries())}};
}

MailingPlan plan_from_json(const Json& doc) {
  const Field root(doc, "plan");
  root.expect_object({"schema", "sources", "sinks", "entries"});
  check_schema(root, kPlanSchema);
  const long long s = root["sources"].integer();
  const long long t = root["sinks"].integer();
  if (s < 1) root["sources"].fail("expected a positive count");
  if (t < 1) root["sinks"].fail("expected a positive count");
  return MailingPlan::create(static_cast<std::size_t>(s), static_cast<std::size_t>(t),
                             entries_from(root["entries"]));
}

Json oracle_to_json(const OracleResult& r) {
  Json out;
  out["schema"] = kOracleSchema;
  out["method"] = r.method;
  if (r.infinite) out["value"] = nullptr;
  else out["value"] = r.value;
  out["infinite"] = r.infinite;
  out["node"] = r.node;
  out["count"] = r.count;
  out["converged"] = r.converged;
  out["seed"] = r.seed;
  out["argument"] = doubles(r.argument);
  return out;
}

Json convexity_to_json(const ConvexityReport& r) {
  return {{"schema", kOracleSchema}, {"method", "convexity"},
          {"trials", r.trials},      {"worst_margin", r.worst_margin},
          {"passed", r.passed},      {"seed", r.seed}};
}

Json diagnostics_to_json(const SolveDiagnostics& d) {
  Json stages = Json::array();
  for (const StageRecord& s : d.stages) {
    stages.push_back({{"eps_level", s.eps_level},
                      {"eps", s.eps},
                      {"delta", s.delta},
                      {"dual", s.dual},
                      {"dual_offset", s.dual_offset},
                      {"gradient_norm", s.gradient_norm},
                      {"primal", s.primal},
                      {"entropic_primal", s.entropic_primal},
                      {"gap", s.gap},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"monotone", s.monotone}});
  }
  return {{"converged", d.converged}, {"warnings", d.warnings}, {"stages", stages}};
}

Json extraction_to_json(const ExtractionReport& r) {
  Json branches = Json::array();
  for (const BranchVertex& b : r.branch_vertices) {
    branches.push_back({{"position", point_json(b.position, 3)}, {"degree", b.degree}});
  }
  Json out = {{"is_tree", r.is_tree},
              {"component_count", r.component_count},
              {"cycle_count", r.cycle_count},
              {"pruned", r.pruned},
              {"orbit_lengths", r.orbit_lengths},
              {"branch_vertices", branches},
              {"gilbert_cost", r.gilbert_cost},
              {"skeleton_gilbert_cost", r.skeleton_gilbert_cost},
              {"length", r.length},
              {"skeleton_length", r.skeleton_length}};
  out["oracle_value"] = r.oracle_value ? Json(*r.oracle_value) : Json(nullptr);
  out["oracle_gap"] = r.oracle_gap ? Json(*r.oracle_gap) : Json(nullptr);
  return out;
}

Json result_to_json(const RunResult& r, const Problem& problem) {
  const int dim = problem.grid.dimension();
  Json out;
  out["schema"] = kResultSchema;
  out["config"] = config_to_json(r.config);
  Json sources = Json::array();
  Json sinks = Json::array();
  for (const auto& t : problem.sources) sources.push_back(snapped_json(t, dim));
  for (const auto& t : problem.sinks) sinks.push_back(snapped_json(t, dim));
  out["terminals"] = {{"sources", sources}, {"sinks", sinks}};
  out["exponent"] = {{"p", problem.exponent.p()}, {"sigma", problem.exponent.sigma()}};
  out["primal"] = r.primal;
  out["m"] = doubles(r.m.values());
  Json potentials = Json::array();
  for (std::size_t a = 0; a < r.potentials.size(); ++a) {
    const NodePair& pair = r.potentials.pairs[a];
    potentials.push_back({{"source", pair.source},
                          {"sink", pair.sink},
                          {"mass", pair.mass},
                          {"phi", doubles(r.potentials.phi[a])}});
  }
  out["potentials"] = potentials;
  out["diagnostics"] = diagnostics_to_json(r.diagnostics);
  out["extraction"] = extraction_to_json(r.extraction);
  out["tree"] = r.tree ? tree_to_json(*r.tree) : Json(nullptr);
  Json edges = Json::array();
  for (const Edge& e : r.network.edges) edges.push_back({e.lo, e.hi});
  out["network"] = {{"nodes", r.network.nodes}, {"edges", edges}};
  return out;
}

RunResult result_from_json(const Json& doc) {
  const Field root(doc, "result");
  if (!doc.is_object()) root.fail("expected an object");
  check_schema(root, kResultSchema);
  RunResult r;
  r.config = parse_config(root["config"].value());
  r.m = SimplexWeights::from_values(doubles_from(root["m"]));
  r.primal = root["primal"].number();
  const Field pots = root["potentials"];
  for (std::size_t a = 0; a < pots.array_size(); ++a) {
    const Field f = pots.at(a);
    const long long s = f["source"].integer();
    const long long t = f["sink"].integer();
    r.potentials.pairs.push_back({static_cast<NodeIndex>(s), static_cast<NodeIndex>(t),
                                  f["mass"].number()});
    r.potentials.phi.push_back(doubles_from(f["phi"]));
  }
  if (!root["tree"].value().is_null()) r.tree = tree_from_json(root["tree"].value());
  const Field net = root["network"];
  for (std::size_t i = 0; i < net["nodes"].array_size(); ++i) {
    r.network.nodes.push_back(static_cast<NodeIndex>(net["nodes"].at(i).integer()));
  }
  for (std::size_t i = 0; i < net["edges"].array_size(); ++i) {
    const Field e = net["edges"].at(i);
    if (e.array_size() != 2) e.fail("expected two node indices");
    r.network.edges.push_back({static_cast<NodeIndex>(e.at(0).integer()),
                               static_cast<NodeIndex>(e.at(1).integer())});
  }
  return r;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << doc.dump(1) << '\n';
}

}  // namespace mailnet::io

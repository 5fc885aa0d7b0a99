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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mailnet/error.hpp"
#include "mailnet/run.hpp"

namespace mailnet::io {
namespace {

constexpr double kDecades = 6.0;  // heatmap range below max m

// Piecewise-linear ramp through a few viridis stops.
std::string ramp(double t) {
  static constexpr std::array<std::array<double, 3>, 5> kStops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), kStops.size() - 2);
  const double f = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(kStops[i][0] + f * (kStops[i + 1][0] - kStops[i][0]))),
                static_cast<int>(std::lround(kStops[i][1] + f * (kStops[i + 1][1] - kStops[i][1]))),
                static_cast<int>(std::lround(kStops[i][2] + f * (kStops[i + 1][2] - kStops[i][2]))));
  return buf;
}

// Planar view of the grid: axes 0 and 1, the middle layer of axis 2.
struct View {
  int nx = 1;
  int ny = 1;
  int layer = 0;
  double cell = 10.0;
  double margin = 20.0;

  explicit View(const Grid& grid) {
    const auto dims = grid.dims();
    nx = dims[0];
    ny = grid.dimension() > 1 ? dims[1] : 1;
    layer = grid.dimension() > 2 ? dims[2] / 2 : 0;
    cell = std::clamp(640.0 / std::max(nx, ny), 4.0, 40.0);
  }

  bool visible(const Grid& grid, NodeIndex z) const {
    return grid.dimension() < 3 || grid.multi_index(z)[2] == layer;
  }
  // Center of node z in SVG coordinates; axis 1 points up.
  std::array<double, 2> center(const Grid& grid, NodeIndex z) const {
    const auto idx = grid.multi_index(z);
    return {margin + (idx[0] + 0.5) * cell, margin + (ny - idx[1] - 0.5) * cell};
  }
  double width() const { return 2 * margin + nx * cell; }
  double height() const { return 2 * margin + ny * cell; }
};

}  // namespace

std::string render_svg(const RunResult& result, const Problem& problem, RenderStyle style) {
  const Grid& grid = problem.grid;
  if (result.m.size() != grid.node_count()) throw InputError("result does not match its grid");
  const View view(grid);
  const auto m = result.m.values();
  const double peak = *std::max_element(m.begin(), m.end());

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << view.width()
      << "\" height=\"" << view.height() << "\" viewBox=\"0 0 " << view.width() << ' '
      << view.height() << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  if (style == RenderStyle::kHeatmap) {
    svg << "<g shape-rendering=\"crispEdges\">\n";
    for (NodeIndex z = 0; z < static_cast<NodeIndex>(grid.node_count()); ++z) {
      if (!view.visible(grid, z)) continue;
      const double level =
          m[z] > 0.0 ? 1.0 + std::log10(m[z] / peak) / kDecades : 0.0;
      const auto c = view.center(grid, z);
      svg << "<rect x=\"" << c[0] - view.cell / 2 << "\" y=\"" << c[1] - view.cell / 2
          << "\" width=\"" << view.cell << "\" height=\"" << view.cell << "\" fill=\""
          << ramp(level) << "\"/>\n";
    }
    svg << "</g>\n";
  } else {
    svg << "<rect x=\"" << view.margin << "\" y=\"" << view.margin << "\" width=\""
        << view.nx * view.cell << "\" height=\"" << view.ny * view.cell
        << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
  }

  const double stroke = std::max(1.5, view.cell * 0.3);
  const char* colour = style == RenderStyle::kHeatmap ? "#ffffff" : "#202020";
  svg << "<g stroke=\"" << colour << "\" stroke-width=\"" << stroke
      << "\" stroke-linecap=\"round\" fill=\"none\">\n";
  for (const Edge& e : result.network.edges) {
    if (!grid.contains(e.lo) || !grid.contains(e.hi)) {
      throw InputError("network edge refers to a node outside the grid");
    }
    if (!view.visible(grid, e.lo) || !view.visible(grid, e.hi)) continue;
    const auto a = view.center(grid, e.lo);
    const auto b = view.center(grid, e.hi);
    svg << "<line x1=\"" << a[0] << "\" y1=\"" << a[1] << "\" x2=\"" << b[0] << "\" y2=\""
        << b[1] << "\"/>\n";
  }
  svg << "</g>\n";

  const double r = std::max(4.0, view.cell * 0.6);
  for (const auto& t : problem.sources) {
    if (!view.visible(grid, t.node)) continue;
    const auto c = view.center(grid, t.node);
    svg << "<circle cx=\"" << c[0] << "\" cy=\"" << c[1] << "\" r=\"" << r
        << "\" fill=\"#d62728\" stroke=\"#000000\"/>\n";
  }
  for (const auto& t : problem.sinks) {
    if (!view.visible(grid, t.node)) continue;
    const auto c = view.center(grid, t.node);
    svg << "<rect x=\"" << c[0] - r << "\" y=\"" << c[1] - r << "\" width=\"" << 2 * r
        << "\" height=\"" << 2 * r << "\" fill=\"#1f77b4\" stroke=\"#000000\"/>\n";
  }
  for (const BranchVertex& b : result.extraction.branch_vertices) {
    const NodeIndex z = grid.nearest_node(std::span<const double>(b.position.data(), 3));
    if (!view.visible(grid, z)) continue;
    const auto c = view.center(grid, z);
    svg << "<circle cx=\"" << c[0] << "\" cy=\"" << c[1] << "\" r=\"" << r * 0.6
        << "\" fill=\"#ff7f0e\" stroke=\"#000000\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_csv(const RunResult& result, const Problem& problem) {
  const Grid& grid = problem.grid;
  if (result.m.size() != grid.node_count()) throw InputError("result does not match its grid");
  std::ostringstream csv;
  csv << "node,i,j,k,x,y,z,m\n";
  char buf[32];
  for (NodeIndex z = 0; z < static_cast<NodeIndex>(grid.node_count()); ++z) {
    const auto idx = grid.multi_index(z);
    const auto pos = grid.position(z);
    csv << z << ',' << idx[0] << ',' << idx[1] << ',' << idx[2];
    for (double v : pos) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      csv << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", result.m[z]);
    csv << buf;
  }
  return csv.str();
}

std::vector<std::filesystem::path> run_render(const RunResult& result, const Problem& problem,
                                              RenderStyle style,
                                              const std::filesystem::path& dir,
                                              const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path svg_path =
      dir / (stem + (style == RenderStyle::kHeatmap ? "_heatmap.svg" : "_network.svg"));
  const std::filesystem::path csv_path = dir / (stem + "_m.csv");
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError(path.string() + ": cannot write file");
    out << text;
  };
  write(svg_path, render_svg(result, problem, style));
  write(csv_path, render_csv(result, problem));
  return {svg_path, csv_path};
}

}  // namespace mailnet::io

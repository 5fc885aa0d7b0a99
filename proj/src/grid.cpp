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

#include "mailnet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "mailnet/error.hpp"

namespace mailnet {

Grid Grid::build(std::span<const int> dims, double spacing) {
  if (dims.empty() || dims.size() > 3) {
    throw InputError("grid must have 1 to 3 axes");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InputError("grid spacing must be positive");
  }
  std::size_t count = 1;
  for (int d : dims) {
    if (d < 2) throw InputError("every grid axis needs at least 2 nodes");
    count *= static_cast<std::size_t>(d);
  }
  if (count > static_cast<std::size_t>(INT32_MAX) / 2) {
    throw InputError("grid too large");
  }

  Grid g;
  g.dims_.assign(dims.begin(), dims.end());
  g.spacing_ = spacing;
  NodeIndex stride = 1;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    g.strides_[a] = stride;
    stride *= dims[a];
  }

  // Edge runs, axis by axis. Along axis a the low endpoints of one run are
  // stride_a * (d_a - 1) consecutive indices inside each outer block.
  for (std::size_t a = 0; a < dims.size(); ++a) {
    const NodeIndex sa = g.strides_[a];
    const NodeIndex block = sa * dims[a];
    const NodeIndex outer = static_cast<NodeIndex>(count) / block;
    for (NodeIndex o = 0; o < outer; ++o) {
      EdgeRun run;
      run.axis = static_cast<int>(a);
      run.first_edge = g.edges_.size();
      run.first_lo = o * block;
      run.count = static_cast<std::size_t>(sa) * (dims[a] - 1);
      run.stride = sa;
      for (std::size_t k = 0; k < run.count; ++k) {
        const NodeIndex lo = run.first_lo + static_cast<NodeIndex>(k);
        g.edges_.push_back({lo, lo + sa});
      }
      g.runs_.push_back(run);
    }
  }

  std::vector<std::vector<NodeIndex>> adj(count);
  for (const Edge& e : g.edges_) {
    adj[e.lo].push_back(e.hi);
    adj[e.hi].push_back(e.lo);
  }
  g.offsets_.assign(count + 1, 0);
  g.inv_degree_.resize(count);
  for (std::size_t z = 0; z < count; ++z) {
    std::sort(adj[z].begin(), adj[z].end());
    g.offsets_[z + 1] = g.offsets_[z] + adj[z].size();
    g.inv_degree_[z] = 1.0 / static_cast<double>(adj[z].size());
  }
  g.adjacency_.reserve(g.offsets_.back());
  for (auto& list : adj) {
    g.adjacency_.insert(g.adjacency_.end(), list.begin(), list.end());
  }
  return g;
}

std::array<int, 3> Grid::multi_index(NodeIndex z) const {
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    idx[a] = z % dims_[a];
    z /= dims_[a];
  }
  return idx;
}

NodeIndex Grid::node_at(std::span<const int> index) const {
  NodeIndex z = 0;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    z += static_cast<NodeIndex>(index[a]) * strides_[a];
  }
  return z;
}

std::array<double, 3> Grid::position(NodeIndex z) const {
  const auto idx = multi_index(z);
  return {idx[0] * spacing_, idx[1] * spacing_, idx[2] * spacing_};
}

NodeIndex Grid::nearest_node(std::span<const double> point,
                             double* snap_distance) const {
  if (point.size() < dims_.size()) {
    throw InputError("point has fewer coordinates than the grid dimension");
  }
  std::array<int, 3> idx{0, 0, 0};
  double dist2 = 0.0;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    const double t = std::round(point[a] / spacing_);
    idx[a] = static_cast<int>(std::clamp(t, 0.0, double(dims_[a] - 1)));
    const double d = point[a] - idx[a] * spacing_;
    dist2 += d * d;
  }
  if (snap_distance != nullptr) *snap_distance = std::sqrt(dist2);
  return node_at(idx);
}

TerminalSet TerminalSet::create(const Grid& grid, std::vector<NodeIndex> sources,
                                std::vector<NodeIndex> sinks) {
  auto check = [&](const std::vector<NodeIndex>& list, const char* what) {
    if (list.empty()) throw InputError(std::string(what) + " list is empty");
    std::set<NodeIndex> seen;
    for (NodeIndex z : list) {
      if (!grid.contains(z)) {
        throw InputError(std::string(what) + " node " + std::to_string(z) +
                         " is not a grid node");
      }
      if (!seen.insert(z).second) {
        throw InputError(std::string(what) + " node " + std::to_string(z) +
                         " listed twice");
      }
    }
  };
  check(sources, "source");
  check(sinks, "sink");
  TerminalSet t;
  t.sources_ = std::move(sources);
  t.sinks_ = std::move(sinks);
  return t;
}

MailingPlan MailingPlan::create(std::size_t source_count, std::size_t sink_count,
                                std::vector<PlanEntry> entries) {
  if (entries.empty()) throw InputError("mailing plan has no entries");
  std::set<std::pair<std::size_t, std::size_t>> keys;
  double total = 0.0;
  for (const PlanEntry& e : entries) {
    if (e.source >= source_count || e.sink >= sink_count) {
      throw InputError("plan entry (" + std::to_string(e.source) + ", " +
                       std::to_string(e.sink) + ") is out of range");
    }
    if (!(e.mass > 0.0) || !std::isfinite(e.mass)) {
      throw InputError("plan masses must be positive");
    }
    if (!keys.insert({e.source, e.sink}).second) {
      throw InputError("duplicate plan entry (" + std::to_string(e.source) +
                       ", " + std::to_string(e.sink) + ")");
    }
    total += e.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InputError("plan masses sum to " + std::to_string(total) +
                     ", expected 1");
  }
  MailingPlan plan;
  plan.source_count_ = source_count;
  plan.sink_count_ = sink_count;
  plan.entries_ = std::move(entries);
  return plan;
}

Marginals plan_marginals(const MailingPlan& plan) {
  Marginals m;
  m.source.assign(plan.source_count(), 0.0);
  m.sink.assign(plan.sink_count(), 0.0);
  for (const PlanEntry& e : plan.entries()) {
    m.source[e.source] += e.mass;
    m.sink[e.sink] += e.mass;
  }
  return m;
}

std::vector<NodePair> resolve_pairs(const TerminalSet& terminals,
                                    const MailingPlan& plan) {
  if (plan.source_count() != terminals.sources().size() ||
      plan.sink_count() != terminals.sinks().size()) {
    throw InputError("plan dimensions do not match the terminal set");
  }
  std::vector<NodePair> pairs;
  pairs.reserve(plan.entries().size());
  for (const PlanEntry& e : plan.entries()) {
    pairs.push_back({terminals.sources()[e.source], terminals.sinks()[e.sink],
                     e.mass});
  }
  return pairs;
}

SimplexWeights SimplexWeights::from_values(std::vector<double> values) {
  if (values.empty()) throw InputError("simplex weights are empty");
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("simplex weights must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw InputError("simplex weights sum to " + std::to_string(total));
  }
  SimplexWeights w;
  w.values_ = std::move(values);
  return w;
}

SimplexWeights SimplexWeights::normalized(std::vector<double> values) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("simplex weights must be finite and nonnegative");
    }
    total += v;
  }
  if (!(total > 0.0)) throw InputError("simplex weights have zero total");
  for (double& v : values) v /= total;
  return from_values(std::move(values));
}

SimplexWeights uniform_weights(const Grid& grid) {
  return SimplexWeights::from_values(
      std::vector<double>(grid.node_count(), 1.0 / grid.node_count()));
}

}  // namespace mailnet

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

#include "mailnet/stencil.hpp"

namespace mailnet::stencil {

void edge_penalty(const Grid& grid, std::span<const double> phi,
                  simd::PenaltyParams params, double* g, double* dg,
                  double* d2g) {
  const simd::KernelTable& kt = simd::kernels();
  for (const EdgeRun& run : grid.edge_runs()) {
    const double* lo = phi.data() + run.first_lo;
    const double* hi = lo + run.stride;
    const std::size_t off = run.first_edge;
    kt.penalty(lo, hi, run.count, params, g ? g + off : nullptr,
               dg ? dg + off : nullptr, d2g ? d2g + off : nullptr);
  }
}

void conductances(const Grid& grid, std::span<const double> m,
                  std::span<double> k) {
  const simd::KernelTable& kt = simd::kernels();
  const double* inv = grid.inv_degrees().data();
  for (const EdgeRun& run : grid.edge_runs()) {
    const std::size_t lo = run.first_lo;
    const std::size_t hi = lo + run.stride;
    kt.weighted_pair_sum(m.data() + lo, inv + lo, m.data() + hi, inv + hi,
                         run.count, k.data() + run.first_edge);
  }
}

void scatter_add(const Grid& grid, double alpha,
                 std::span<const double> edge_values,
                 std::span<double> node_values) {
  const simd::KernelTable& kt = simd::kernels();
  for (const EdgeRun& run : grid.edge_runs()) {
    const double* v = edge_values.data() + run.first_edge;
    kt.axpy(alpha, v, run.count, node_values.data() + run.first_lo);
    kt.axpy(alpha, v, run.count, node_values.data() + run.first_lo + run.stride);
  }
}

void difference_adjoint(const Grid& grid, double alpha,
                        std::span<const double> w, std::span<const double> v,
                        std::span<double> node_values) {
  const simd::KernelTable& kt = simd::kernels();
  for (const EdgeRun& run : grid.edge_runs()) {
    const double* we = w.data() + run.first_edge;
    const double* ve = v.data() + run.first_edge;
    kt.axpy_product(alpha, we, ve, run.count, node_values.data() + run.first_lo);
    kt.axpy_product(-alpha, we, ve, run.count,
                    node_values.data() + run.first_lo + run.stride);
  }
}

}  // namespace mailnet::stencil

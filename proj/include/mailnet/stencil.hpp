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

// Edge-wise evaluation of the neighbor stencil on a Grid. Edge values are
// indexed like Grid::edges(); the difference on edge e is
// t_e = phi(lo) - phi(hi).

#include <span>

#include "mailnet/grid.hpp"
#include "mailnet/simd/kernels.hpp"

namespace mailnet::stencil {

// Penalty g(t_e) and its first two derivatives; null outputs are skipped.
void edge_penalty(const Grid& grid, std::span<const double> phi,
                  simd::PenaltyParams params, double* g, double* dg,
                  double* d2g);

// k_e = m(lo)/|N(lo)| + m(hi)/|N(hi)|: the weight edge e carries in
// sum_z m(z) D(z).
void conductances(const Grid& grid, std::span<const double> m,
                  std::span<double> k);

// node[lo] += alpha * v_e and node[hi] += alpha * v_e.
void scatter_add(const Grid& grid, double alpha, std::span<const double> edge_values,
                 std::span<double> node_values);

// Adjoint of the difference map: node[lo] += alpha * w_e * v_e,
// node[hi] -= alpha * w_e * v_e.
void difference_adjoint(const Grid& grid, double alpha,
                        std::span<const double> w, std::span<const double> v,
                        std::span<double> node_values);

}  // namespace mailnet::stencil

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

// Data-parallel inner loops shared by the solver modules. Every kernel has a
// scalar reference version and, where the CPU supports it, an AVX2/FMA version
// selected once at startup. Both are exercised by the equivalence tests.

#include <cstddef>
#include <string_view>

namespace mailnet::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Edge penalty g(t) = (t^2 + delta^2)^(q/2) - delta^q with t = a - b.
// delta == 0 gives |t|^q. q == 2 is evaluated without pow/log.
struct PenaltyParams {
  double exponent = 2.0;
  double delta = 0.0;
};

struct KernelTable {
  Isa isa = Isa::kScalar;

  // t = a[i] - b[i]; writes g(t), g'(t), g''(t). Any output may be null.
  void (*penalty)(const double* a, const double* b, std::size_t n,
                  PenaltyParams params, double* g, double* dg, double* d2g);

  // out[i] = a[i] * wa[i] + b[i] * wb[i]
  void (*weighted_pair_sum)(const double* a, const double* wa, const double* b,
                            const double* wb, std::size_t n, double* out);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, std::size_t n, double* y);

  // y[i] += alpha * x[i] * z[i]
  void (*axpy_product)(double alpha, const double* x, const double* z,
                       std::size_t n, double* y);

  double (*dot)(const double* x, const double* y, std::size_t n);

  // sum_i x[i] * y[i] * z[i]
  double (*dot3)(const double* x, const double* y, const double* z,
                 std::size_t n);

  double (*max)(const double* x, std::size_t n);

  double (*max_abs)(const double* x, std::size_t n);

  // out[i] = exp((x[i] - shift) * scale); returns the sum of out.
  double (*exp_shifted)(const double* x, std::size_t n, double shift,
                        double scale, double* out);

  void (*exp)(const double* x, std::size_t n, double* out);
  void (*log)(const double* x, std::size_t n, double* out);
};

const KernelTable& scalar_kernels();

// Null when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The table chosen at first use: AVX2 when available, unless the environment
// variable MAILNET_SIMD is set to "scalar".
const KernelTable& kernels();

}  // namespace mailnet::simd

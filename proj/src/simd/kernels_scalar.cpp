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
#include <cmath>
#include <limits>

#include "mailnet/simd/kernels.hpp"

namespace mailnet::simd {
namespace {

void penalty_scalar(const double* a, const double* b, std::size_t n,
                    PenaltyParams params, double* g, double* dg, double* d2g) {
  const double q = params.exponent;
  const double delta = params.delta;
  if (q == 2.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = a[i] - b[i];
      if (g) g[i] = t * t;
      if (dg) dg[i] = 2.0 * t;
      if (d2g) d2g[i] = 2.0;
    }
    return;
  }
  const double delta_q = delta > 0.0 ? std::pow(delta, q) : 0.0;
  const double d2 = delta * delta;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    const double r = t * t + d2;
    if (r == 0.0) {
      if (g) g[i] = 0.0;
      if (dg) dg[i] = 0.0;
      if (d2g) d2g[i] = q > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
      continue;
    }
    const double lr = std::log(r);
    if (g) g[i] = std::exp(0.5 * q * lr) - delta_q;
    if (dg) dg[i] = q * t * std::exp((0.5 * q - 1.0) * lr);
    if (d2g) d2g[i] = q * std::exp((0.5 * q - 2.0) * lr) * ((q - 1.0) * t * t + d2);
  }
}

void weighted_pair_sum_scalar(const double* a, const double* wa,
                              const double* b, const double* wb, std::size_t n,
                              double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * wa[i] + b[i] * wb[i];
}

void axpy_scalar(double alpha, const double* x, std::size_t n, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_product_scalar(double alpha, const double* x, const double* z,
                         std::size_t n, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i] * z[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot3_scalar(const double* x, const double* y, const double* z,
                   std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i] * z[i];
  return s;
}

double max_scalar(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double exp_shifted_scalar(const double* x, std::size_t n, double shift,
                          double scale, double* out) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp((x[i] - shift) * scale);
    s += out[i];
  }
  return s;
}

void exp_scalar(const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void log_scalar(const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::kScalar,     penalty_scalar,     weighted_pair_sum_scalar,
      axpy_scalar,      axpy_product_scalar, dot_scalar,
      dot3_scalar,      max_scalar,         max_abs_scalar,
      exp_shifted_scalar, exp_scalar,       log_scalar,
  };
  return table;
}

}  // namespace mailnet::simd

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

// Compiled with -mavx2 -mfma. Nothing in this file may run before the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "mailnet/simd/kernels.hpp"

namespace mailnet::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

// 2^k for integer k in [-1022, 1023].
inline __m256d pow2_int(__m128i k) {
  const __m256i biased =
      _mm256_add_epi64(_mm256_cvtepi32_epi64(k), _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
}

// Cephes-style exp: x = n ln2 + r, |r| <= ln2/2, rational approximation on r.
inline __m256d exp_pd(__m256d x) {
  const __m256d kHi = _mm256_set1_pd(709.782712893384);
  const __m256d kLo = _mm256_set1_pd(-745.2);
  const __m256d overflow = _mm256_cmp_pd(x, kHi, _CMP_GT_OQ);
  const __m256d underflow = _mm256_cmp_pd(x, kLo, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(kHi, _mm256_max_pd(kLo, x));

  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634073599)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), xc);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), rr,
                               _mm256_set1_pd(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), rr,
                               _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // Split the scaling so that n down to -1075 still lands in the normal range
  // of each factor and gradual underflow happens in the final product.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  __m256d res = _mm256_mul_pd(_mm256_mul_pd(e, pow2_int(n1)), pow2_int(n2));

  res = _mm256_blendv_pd(
      res, _mm256_set1_pd(std::numeric_limits<double>::infinity()), overflow);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), underflow);
  return res;
}

// Cephes-style natural log on the mantissa in [sqrt(1/2), sqrt(2)).
inline __m256d log_pd(__m256d x) {
  const __m256d kMinNormal = _mm256_set1_pd(std::numeric_limits<double>::min());
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_neg = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
  const __m256d is_inf = _mm256_cmp_pd(
      x, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ);
  const __m256d is_nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

  // Lift subnormals into the normal range.
  const __m256d subnormal = _mm256_and_pd(_mm256_cmp_pd(x, kMinNormal, _CMP_LT_OQ),
                                          _mm256_cmp_pd(x, zero, _CMP_GT_OQ));
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(18014398509481984.0)),
                       subnormal);  // 2^54
  const __m256d exp_adjust =
      _mm256_and_pd(subnormal, _mm256_set1_pd(-54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  // Exponent field converted to double through the 2^52 magic constant.
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_field, _mm256_castpd_si256(magic))),
      magic);
  e = _mm256_add_pd(_mm256_sub_pd(e, _mm256_set1_pd(1022.0)), exp_adjust);

  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
      _mm256_set1_epi64x(0x3fe0000000000000LL)));

  const __m256d below =
      _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, _mm256_set1_pd(1.0)));
  m = _mm256_add_pd(m, _mm256_and_pd(below, m));
  m = _mm256_sub_pd(m, _mm256_set1_pd(1.0));

  const __m256d z = _mm256_mul_pd(m, m);
  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(7.70838733755885391666E0));
  __m256d q = _mm256_add_pd(m, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(m, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d res = _mm256_add_pd(m, y);
  res = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), res);

  res = _mm256_blendv_pd(
      res, _mm256_set1_pd(-std::numeric_limits<double>::infinity()), is_zero);
  res = _mm256_blendv_pd(
      res, _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN()), is_neg);
  res = _mm256_blendv_pd(res, x, _mm256_or_pd(is_inf, is_nan));
  return res;
}

void penalty_avx2(const double* a, const double* b, std::size_t n,
                  PenaltyParams params, double* g, double* dg, double* d2g) {
  const double q = params.exponent;
  const double delta = params.delta;
  std::size_t i = 0;
  if (q == 2.0) {
    const __m256d two = _mm256_set1_pd(2.0);
    for (; i + 4 <= n; i += 4) {
      const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
      if (g) _mm256_storeu_pd(g + i, _mm256_mul_pd(t, t));
      if (dg) _mm256_storeu_pd(dg + i, _mm256_mul_pd(two, t));
      if (d2g) _mm256_storeu_pd(d2g + i, two);
    }
    for (; i < n; ++i) {
      const double t = a[i] - b[i];
      if (g) g[i] = t * t;
      if (dg) dg[i] = 2.0 * t;
      if (d2g) d2g[i] = 2.0;
    }
    return;
  }

  const double delta_q = delta > 0.0 ? std::pow(delta, q) : 0.0;
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vd2 = _mm256_set1_pd(delta * delta);
  const __m256d vdq = _mm256_set1_pd(delta_q);
  const __m256d half_q = _mm256_set1_pd(0.5 * q);
  const __m256d half_q_m1 = _mm256_set1_pd(0.5 * q - 1.0);
  const __m256d half_q_m2 = _mm256_set1_pd(0.5 * q - 2.0);
  const __m256d q_m1 = _mm256_set1_pd(q - 1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d d2g_at_zero = _mm256_set1_pd(
      q > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d tt = _mm256_mul_pd(t, t);
    const __m256d r = _mm256_add_pd(tt, vd2);
    const __m256d r_zero = _mm256_cmp_pd(r, zero, _CMP_EQ_OQ);
    const __m256d lr = log_pd(r);
    if (g) {
      __m256d v = _mm256_sub_pd(exp_pd(_mm256_mul_pd(half_q, lr)), vdq);
      _mm256_storeu_pd(g + i, _mm256_blendv_pd(v, zero, r_zero));
    }
    if (dg) {
      __m256d v = _mm256_mul_pd(_mm256_mul_pd(vq, t),
                                exp_pd(_mm256_mul_pd(half_q_m1, lr)));
      _mm256_storeu_pd(dg + i, _mm256_blendv_pd(v, zero, r_zero));
    }
    if (d2g) {
      __m256d v = _mm256_mul_pd(
          _mm256_mul_pd(vq, exp_pd(_mm256_mul_pd(half_q_m2, lr))),
          _mm256_fmadd_pd(q_m1, tt, vd2));
      _mm256_storeu_pd(d2g + i, _mm256_blendv_pd(v, d2g_at_zero, r_zero));
    }
  }
  if (i < n) {
    scalar_kernels().penalty(a + i, b + i, n - i, params, g ? g + i : nullptr,
                             dg ? dg + i : nullptr, d2g ? d2g + i : nullptr);
  }
}

void weighted_pair_sum_avx2(const double* a, const double* wa, const double* b,
                            const double* wb, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_fmadd_pd(
        _mm256_loadu_pd(a + i), _mm256_loadu_pd(wa + i),
        _mm256_mul_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(wb + i)));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = a[i] * wa[i] + b[i] * wb[i];
}

void axpy_avx2(double alpha, const double* x, std::size_t n, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_product_avx2(double alpha, const double* x, const double* z,
                       std::size_t n, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xz = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, xz, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i] * z[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot3_avx2(const double* x, const double* y, const double* z,
                 std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(xy, _mm256_loadu_pd(z + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i] * z[i];
  return s;
}

double max_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  double m = hmax(acc);
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::abs(x[i]) > m ? std::abs(x[i]) : m;
  return m;
}

double exp_shifted_avx2(const double* x, std::size_t n, double shift,
                        double scale, double* out) {
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vc = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v =
        exp_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vs), vc));
    _mm256_storeu_pd(out + i, v);
    acc = _mm256_add_pd(acc, v);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    out[i] = std::exp((x[i] - shift) * scale);
    s += out[i];
  }
  return s;
}

void exp_avx2(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::exp(x[i]);
}

void log_avx2(const double* x, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, log_pd(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{
      Isa::kAvx2,     penalty_avx2,     weighted_pair_sum_avx2,
      axpy_avx2,      axpy_product_avx2, dot_avx2,
      dot3_avx2,      max_avx2,         max_abs_avx2,
      exp_shifted_avx2, exp_avx2,       log_avx2,
  };
  return table;
}

}  // namespace mailnet::simd

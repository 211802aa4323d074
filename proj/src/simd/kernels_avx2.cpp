// Copyright 2026 The spikelasso Authors
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

// Built with -mavx2 -mfma. Only reached after a CPUID check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "spikelasso/simd/kernels.hpp"

namespace spikelasso::simd {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// 16 outputs per block keep four accumulators live across the lag loop.
void correlate_avx2(double* out, const double* w, int t, const double* x, std::size_t len) {
  std::size_t j = 0;
  for (; j + 16 <= len; j += 16) {
    __m256d a0 = _mm256_loadu_pd(out + j);
    __m256d a1 = _mm256_loadu_pd(out + j + 4);
    __m256d a2 = _mm256_loadu_pd(out + j + 8);
    __m256d a3 = _mm256_loadu_pd(out + j + 12);
    const double* xj = x + j;
    for (int l = 0; l < t; ++l) {
      const __m256d wl = _mm256_broadcast_sd(w + l);
      a0 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(xj + l), a0);
      a1 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(xj + l + 4), a1);
      a2 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(xj + l + 8), a2);
      a3 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(xj + l + 12), a3);
    }
    _mm256_storeu_pd(out + j, a0);
    _mm256_storeu_pd(out + j + 4, a1);
    _mm256_storeu_pd(out + j + 8, a2);
    _mm256_storeu_pd(out + j + 12, a3);
  }
  for (; j + 4 <= len; j += 4) {
    __m256d a0 = _mm256_loadu_pd(out + j);
    const double* xj = x + j;
    for (int l = 0; l < t; ++l) {
      a0 = _mm256_fmadd_pd(_mm256_broadcast_sd(w + l), _mm256_loadu_pd(xj + l), a0);
    }
    _mm256_storeu_pd(out + j, a0);
  }
  for (; j < len; ++j) {
    double acc = out[j];
    for (int l = 0; l < t; ++l) acc = std::fma(w[l], x[j + l], acc);
    out[j] = acc;
  }
}

void convolve_avx2(double* out, const double* w, int t, const double* a, std::size_t len) {
  const std::size_t head = std::min<std::size_t>(len, static_cast<std::size_t>(t) - 1);
  for (std::size_t i = 0; i < head; ++i) {
    double acc = out[i];
    for (std::size_t l = 0; l <= i; ++l) acc = std::fma(w[l], a[i - l], acc);
    out[i] = acc;
  }
  std::size_t i = head;
  for (; i + 16 <= len; i += 16) {
    __m256d a0 = _mm256_loadu_pd(out + i);
    __m256d a1 = _mm256_loadu_pd(out + i + 4);
    __m256d a2 = _mm256_loadu_pd(out + i + 8);
    __m256d a3 = _mm256_loadu_pd(out + i + 12);
    for (int l = 0; l < t; ++l) {
      const __m256d wl = _mm256_broadcast_sd(w + l);
      const double* src = a + i - l;
      a0 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(src), a0);
      a1 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(src + 4), a1);
      a2 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(src + 8), a2);
      a3 = _mm256_fmadd_pd(wl, _mm256_loadu_pd(src + 12), a3);
    }
    _mm256_storeu_pd(out + i, a0);
    _mm256_storeu_pd(out + i + 4, a1);
    _mm256_storeu_pd(out + i + 8, a2);
    _mm256_storeu_pd(out + i + 12, a3);
  }
  for (; i + 4 <= len; i += 4) {
    __m256d a0 = _mm256_loadu_pd(out + i);
    for (int l = 0; l < t; ++l) {
      a0 = _mm256_fmadd_pd(_mm256_broadcast_sd(w + l), _mm256_loadu_pd(a + i - l), a0);
    }
    _mm256_storeu_pd(out + i, a0);
  }
  for (; i < len; ++i) {
    double acc = out[i];
    for (int l = 0; l < t; ++l) acc = std::fma(w[l], a[i - l], acc);
    out[i] = acc;
  }
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t len) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < len; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double dot_avx2(const double* x, const double* y, std::size_t len) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= len; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  }
  double acc = horizontal_sum(_mm256_add_pd(s0, s1));
  for (; i < len; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

void soft_threshold_avx2(double* out, const double* v, double tau, std::size_t len) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d tv = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d sign = _mm256_and_pd(x, sign_mask);
    const __m256d mag = _mm256_max_pd(_mm256_sub_pd(_mm256_andnot_pd(sign_mask, x), tv), zero);
    _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
  }
  for (; i < len; ++i) out[i] = std::copysign(std::max(std::abs(v[i]) - tau, 0.0), v[i]);
}

constexpr KernelTable kAvx2{
    Isa::avx2,  "avx2",    &correlate_avx2,      &convolve_avx2,
    &axpy_avx2, &dot_avx2, &soft_threshold_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace spikelasso::simd

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

#include <algorithm>
#include <cmath>

#include "spikelasso/simd/kernels.hpp"

namespace spikelasso::simd {
namespace {

void correlate_scalar(double* out, const double* w, int t, const double* x, std::size_t len) {
  for (std::size_t j = 0; j < len; ++j) {
    double acc = out[j];
    const double* xj = x + j;
    for (int l = 0; l < t; ++l) acc += w[l] * xj[l];
    out[j] = acc;
  }
}

void convolve_scalar(double* out, const double* w, int t, const double* a, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t taps = std::min<std::size_t>(static_cast<std::size_t>(t), i + 1);
    double acc = out[i];
    for (std::size_t l = 0; l < taps; ++l) acc += w[l] * a[i - l];
    out[i] = acc;
  }
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void soft_threshold_scalar(double* out, const double* v, double tau, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = std::copysign(std::max(std::abs(v[i]) - tau, 0.0), v[i]);
  }
}

constexpr KernelTable kScalar{
    Isa::scalar,        "scalar",    &correlate_scalar,     &convolve_scalar,
    &axpy_scalar,       &dot_scalar, &soft_threshold_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace spikelasso::simd

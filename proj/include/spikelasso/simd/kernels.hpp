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

#pragma once

#include <cstddef>

// Inner loops of the dictionary operator and the proximal solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant compiled in its own translation unit. The variant is picked
// once at runtime from CPUID; SPIKELASSO_KERNELS=scalar|avx2 overrides it.
// Variants differ only by floating-point rounding (FMA contraction, blocked
// reductions); tests/simd_equivalence_test.cpp pins the allowed difference.

namespace spikelasso::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // out[j] += sum_{l < t} w[l] * x[j + l]  for j in [0, len).
  // x must be readable on [0, len + t - 1).
  void (*correlate)(double* out, const double* w, int t, const double* x, std::size_t len);

  // out[i] += sum_{l <= min(t - 1, i)} w[l] * a[i - l]  for i in [0, len).
  // Causal convolution truncated to the input length.
  void (*convolve)(double* out, const double* w, int t, const double* a, std::size_t len);

  // y += alpha * x
  void (*axpy)(double* y, double alpha, const double* x, std::size_t len);

  double (*dot)(const double* x, const double* y, std::size_t len);

  // out = sign(v) * max(|v| - tau, 0)
  void (*soft_threshold)(double* out, const double* v, double tau, std::size_t len);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 translation unit was not built for this target.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

/// Kernel table used by the library. Resolved on first use.
const KernelTable& active();

/// Forces a kernel family for the whole process. Throws if unsupported.
void select(Isa isa);

const char* isa_name(Isa isa);
Isa parse_isa(const char* name);

}  // namespace spikelasso::simd

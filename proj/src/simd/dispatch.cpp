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

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "spikelasso/simd/kernels.hpp"
#include "spikelasso/types.hpp"

namespace spikelasso::simd {

#ifndef SPIKELASSO_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
      return cpu_supports(Isa::avx2) ? avx2_kernels() : nullptr;
  }
  return nullptr;
}

const KernelTable* resolve() {
  if (const char* env = std::getenv("SPIKELASSO_KERNELS"); env != nullptr && *env != '\0') {
    const KernelTable* forced = table_for(parse_isa(env));
    if (forced == nullptr) {
      throw InvalidInput(std::string("SPIKELASSO_KERNELS=") + env + " is not supported on this CPU");
    }
    return forced;
  }
  if (const KernelTable* avx2 = table_for(Isa::avx2)) return avx2;
  return &scalar_kernels();
}

}  // namespace

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SPIKELASSO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    const KernelTable* resolved = resolve();
    g_active.compare_exchange_strong(table, resolved, std::memory_order_acq_rel);
    table = g_active.load(std::memory_order_acquire);
  }
  return *table;
}

void select(Isa isa) {
  const KernelTable* table = table_for(isa);
  if (table == nullptr) {
    throw InvalidInput(std::string("kernel family '") + isa_name(isa) + "' is not available");
  }
  g_active.store(table, std::memory_order_release);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(const char* name) {
  if (std::strcmp(name, "scalar") == 0) return Isa::scalar;
  if (std::strcmp(name, "avx2") == 0) return Isa::avx2;
  throw InvalidInput(std::string("unknown kernel family '") + name + "'");
}

}  // namespace spikelasso::simd

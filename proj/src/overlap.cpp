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

#include "spikelasso/overlap.hpp"

#include <algorithm>
#include <cmath>

namespace spikelasso {
namespace {

template <class Samples>
OverlapStats chain_stats(const Samples& samples, Index t) {
  OverlapStats stats;
  std::int64_t current = 0;
  Index previous = 0;
  auto close = [&] {
    if (current == 0) return;
    ++stats.group_count;
    ++stats.size_histogram[current];
    stats.max_size = std::max(stats.max_size, current);
  };
  std::int64_t total = 0;
  for (Index j : samples) {
    if (current > 0 && j - previous > t) {
      close();
      current = 0;
    }
    ++current;
    ++total;
    previous = j;
  }
  close();
  stats.mean_size = stats.group_count > 0 ? static_cast<double>(total) / stats.group_count : 0.0;
  return stats;
}

}  // namespace

double overlap_bound(double mu_total, Index t) {
  const double x = mu_total * static_cast<double>(t);
  return x * std::exp(x);
}

OverlapStats empirical_overlaps(const ActivationSet& acts, Index t) {
  std::vector<Index> samples;
  samples.reserve(acts.size());
  for (const auto& a : acts.entries()) samples.push_back(a.sample);
  return chain_stats(samples, t);
}

std::vector<OverlapStats> empirical_overlaps_per_neuron(const ActivationSet& acts, Index t) {
  std::vector<std::vector<Index>> per(static_cast<std::size_t>(acts.neurons()));
  for (const auto& a : acts.entries()) per[static_cast<std::size_t>(a.neuron)].push_back(a.sample);
  std::vector<OverlapStats> out;
  out.reserve(per.size());
  for (const auto& samples : per) out.push_back(chain_stats(samples, t));
  return out;
}

}  // namespace spikelasso

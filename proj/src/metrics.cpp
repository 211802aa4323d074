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

#include "spikelasso/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace spikelasso {

F1Result f1_score(const ActivationSet& truth, const ActivationSet& est, const MatchConfig& cfg) {
  if (cfg.tol < 0) throw InvalidInput("match tolerance must be nonnegative");
  const int k = std::max(truth.neurons(), est.neurons());
  const std::size_t pools = cfg.require_same_neuron ? static_cast<std::size_t>(std::max(k, 1)) : 1;

  // Unmatched true spikes per pool, keyed by sample; value counts duplicates
  // across neurons when pooled.
  std::vector<std::map<Index, int>> unmatched(pools);
  for (const auto& a : truth.entries()) {
    ++unmatched[cfg.require_same_neuron ? static_cast<std::size_t>(a.neuron) : 0][a.sample];
  }

  std::int64_t tp = 0;
  for (const auto& e : est.entries()) {
    auto& pool = unmatched[cfg.require_same_neuron ? static_cast<std::size_t>(e.neuron) : 0];
    if (pool.empty()) continue;
    auto right = pool.lower_bound(e.sample);
    auto best = pool.end();
    Index best_gap = cfg.tol + 1;
    if (right != pool.begin()) {
      auto left = std::prev(right);
      const Index gap = e.sample - left->first;
      if (gap <= cfg.tol) {
        best = left;
        best_gap = gap;
      }
    }
    if (right != pool.end()) {
      const Index gap = right->first - e.sample;
      if (gap <= cfg.tol && gap < best_gap) best = right;
    }
    if (best == pool.end()) continue;
    ++tp;
    if (--best->second == 0) pool.erase(best);
  }

  F1Result out;
  out.true_positives = tp;
  out.precision = est.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(est.size());
  out.recall = truth.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(truth.size());
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

CPConfig CPConfig::for_shape_length(Index t) {
  Index w = std::max<Index>(1, t / 2);
  if (w % 2 == 0) w += 1;
  return {w, false};
}

CPResult cp_score(const ActivationSet& truth, const ActivationSet& est, const CPConfig& cfg) {
  if (cfg.kernel_width < 1 || cfg.kernel_width % 2 == 0) {
    throw InvalidInput("CP kernel width must be odd and >= 1, got " + std::to_string(cfg.kernel_width));
  }
  const Index half = cfg.kernel_width / 2;
  auto amp = [&](double a) { return cfg.binarize ? 1.0 : a; };

  double mass = 0.0;
  std::map<std::pair<int, Index>, double> diff;
  for (const auto& a : truth.entries()) {
    mass += std::abs(amp(a.amplitude));
    diff[{a.neuron, a.sample}] += amp(a.amplitude);
  }
  for (const auto& a : est.entries()) {
    mass += std::abs(amp(a.amplitude));
    diff[{a.neuron, a.sample}] -= amp(a.amplitude);
  }
  if (mass == 0.0) return {1.0, true};

  // K * (x - y) is piecewise constant per neuron: a spike of weight v at j
  // contributes v / width on [j - half, j + half]. Sweep the breakpoints.
  const double inv_width = 1.0 / static_cast<double>(cfg.kernel_width);
  double l1 = 0.0;
  std::vector<std::pair<Index, double>> events;
  auto flush = [&] {
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double level = 0.0;
    for (std::size_t i = 0; i < events.size();) {
      const Index at = events[i].first;
      while (i < events.size() && events[i].first == at) level += events[i++].second;
      if (i < events.size()) l1 += std::abs(level) * inv_width * static_cast<double>(events[i].first - at);
    }
    events.clear();
  };
  int neuron = -1;
  for (const auto& [key, value] : diff) {
    if (key.first != neuron) {
      flush();
      neuron = key.first;
    }
    if (value == 0.0) continue;
    events.emplace_back(key.second - half, value);
    events.emplace_back(key.second + half + 1, -value);
  }
  flush();
  return {1.0 - l1 / mass, false};
}

}  // namespace spikelasso

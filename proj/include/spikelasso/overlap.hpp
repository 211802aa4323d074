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

#include <cstdint>
#include <map>
#include <vector>

#include "spikelasso/types.hpp"

namespace spikelasso {

struct OverlapStats {
  std::int64_t group_count = 0;
  double mean_size = 0.0;
  std::int64_t max_size = 0;
  /// size -> number of groups of that size
  std::map<std::int64_t, std::int64_t> size_histogram;
};

/// Upper bound mu t exp(mu t) on the mean overlap size when activations of
/// all neurons pooled form a Poisson process of intensity mu per sample.
double overlap_bound(double mu_total, Index t);

/// Pools all neurons and splits the onsets into maximal chains whose
/// consecutive gaps are <= t. Single pass over the sorted entries.
OverlapStats empirical_overlaps(const ActivationSet& acts, Index t);

/// Same statistics computed for each neuron's train on its own.
std::vector<OverlapStats> empirical_overlaps_per_neuron(const ActivationSet& acts, Index t);

}  // namespace spikelasso

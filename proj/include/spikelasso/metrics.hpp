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

#include <limits>

#include "spikelasso/types.hpp"

namespace spikelasso {

struct MatchConfig {
  /// Largest |time difference| for a match, in samples.
  Index tol = 0;
  bool require_same_neuron = true;

  static constexpr Index kUnbounded = std::numeric_limits<Index>::max() / 4;
};

struct F1Result {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::int64_t true_positives = 0;
};

/// Greedy one-to-one matching: estimated spikes, in time order, each take
/// the nearest unmatched true spike within tol (earlier one on ties).
/// Empty estimate gives precision 1; empty truth gives recall 1; f1 is 0
/// when precision + recall is 0. Amplitudes are ignored.
F1Result f1_score(const ActivationSet& truth, const ActivationSet& est, const MatchConfig& cfg = {});

struct CPConfig {
  /// Support of the normalized rectangular kernel; odd.
  Index kernel_width = 1;
  /// Replace amplitudes by 1 before comparing.
  bool binarize = false;

  /// t / 2 rounded to an odd width.
  static CPConfig for_shape_length(Index t);
};

struct CPResult {
  double value = 1.0;
  /// Both trains empty; value is 1 by convention.
  bool both_empty = false;
};

/// 1 - sum_r ||K * (x_r - y_r)||_1 / sum_r (||x_r||_1 + ||y_r||_1), with K
/// the centered box of width kernel_width and total mass 1, evaluated over
/// the full convolution support.
CPResult cp_score(const ActivationSet& truth, const ActivationSet& est, const CPConfig& cfg);

}  // namespace spikelasso

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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spikelasso/active_set.hpp"
#include "spikelasso/metrics.hpp"
#include "spikelasso/simulate.hpp"

namespace spikelasso {

/// Absolute value, or a multiple of lambda_max when `relative`.
struct LambdaSpec {
  double value = 0.1;
  bool relative = true;

  double resolve(double lambda_max) const { return relative ? value * lambda_max : value; }
  std::string to_string() const;
  /// "0.3" is absolute, "rel:0.3" is relative.
  static LambdaSpec parse(const std::string& text);
};

struct SweepPlan {
  std::vector<LambdaSpec> lambdas;
  /// None is the noiseless column.
  std::vector<std::optional<double>> snrs_db;
  int draws = 5;
  int k = 2;
  int d = 4;
  int t = 30;
  Index n = 500;
  double rate_hz = 50.0;
  double sample_rate_hz = 10'000.0;
  bool jitter = true;
  std::uint64_t seed = 1;
  Solver solver = Solver::as_window;
  MatchConfig match{};
  /// 0 selects the default width for t.
  Index cp_width = 0;
  int parallel = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

struct SweepCell {
  LambdaSpec lambda;
  std::optional<double> snr_db;
  int draws = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double mean_cp = 0.0;
  double mean_truth_size = 0.0;
  double mean_support_size = 0.0;
  int uncertified = 0;
  int timeouts = 0;
};

struct SweepResult {
  /// Lambda-major, in plan order.
  std::vector<SweepCell> cells;

  const SweepCell& at(std::size_t lambda_index, std::size_t snr_index, std::size_t snr_count) const {
    return cells[lambda_index * snr_count + snr_index];
  }
  std::string to_csv() const;
};

/// Draw `draw` of the sweep at the given SNR. Shapes and spike trains depend
/// on (seed, draw) only; the noise realization on (seed, draw) as well, scaled
/// to the SNR. A draw without any spike is redrawn with the next attempt.
Dataset sweep_dataset(const SweepPlan& plan, int draw, std::optional<double> snr_db);

SweepResult run_sweep(const SweepPlan& plan);

}  // namespace spikelasso

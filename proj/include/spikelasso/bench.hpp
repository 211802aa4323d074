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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spikelasso/active_set.hpp"
#include "spikelasso/simulate.hpp"

namespace spikelasso {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares on (log n, log time). Needs >= 3 positive pairs with at
/// least two distinct n.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs);

struct BenchPlan {
  std::vector<Solver> solvers{Solver::as_window, Solver::as_group};
  std::vector<Index> sizes{10'000, 30'000, 100'000, 300'000, 1'000'000};
  int repetitions = 5;
  int k = 5;
  int d = 4;
  int t = 60;
  double rate_hz = 10.0;
  double sample_rate_hz = 30'000.0;
  double lambda_rel = 0.1;
  double time_limit_seconds = 60.0;
  std::uint64_t seed = 1;
  /// Worker threads; cells (solver, n) run concurrently when > 1.
  int parallel = 1;
  /// After a timeout, the remaining runs of that solver at this and larger
  /// n are recorded as skipped timeouts instead of being attempted.
  bool skip_after_timeout = true;

  void validate() const;
  nlohmann::json to_json() const;
  static BenchPlan from_json(const nlohmann::json& j);
};

struct BenchRun {
  Solver solver = Solver::as_window;
  Index n = 0;
  int rep = 0;
  double seconds = 0.0;
  std::int64_t iterations = 0;
  bool certified = false;
  bool timed_out = false;
  bool skipped = false;
  std::int64_t support_size = 0;
  std::int64_t truth_size = 0;
  double objective = 0.0;
};

struct BenchCell {
  Solver solver = Solver::as_window;
  Index n = 0;
  int runs = 0;
  int certified = 0;
  int timeouts = 0;
  /// Over completed runs only.
  double mean_seconds = 0.0;
  double stddev_seconds = 0.0;
  double mean_iterations = 0.0;
};

struct BenchResult {
  std::vector<BenchRun> runs;
  std::vector<BenchCell> cells;
  std::map<Solver, std::optional<SlopeFit>> slopes;

  std::string runs_csv() const;
  /// Everything in runs except wall times; identical across reruns.
  std::string solutions_csv() const;
  nlohmann::json summary() const;
};

/// The dataset used for run (n, rep): shapes fixed by the seed, a fresh
/// activation draw per (n, rep), noiseless.
Dataset bench_dataset(const BenchPlan& plan, Index n, int rep);

BenchResult run_bench(const BenchPlan& plan);

/// Aggregates cells and slopes from runs. A cell enters the fit only when
/// all of its runs completed certified.
void summarize_bench(BenchResult& result);

}  // namespace spikelasso

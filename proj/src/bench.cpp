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

#include "spikelasso/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "spikelasso/dictionary.hpp"
#include "spikelasso/io.hpp"

namespace spikelasso {
namespace {

constexpr std::uint64_t kBenchShapes = 0xbe0c'0001;
constexpr std::uint64_t kBenchActivations = 0xbe0c'0002;

using Clock = std::chrono::steady_clock;

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw InvalidInput("slope fit needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, time] : pairs) {
    if (!(n > 0.0) || !(time > 0.0) || !std::isfinite(n) || !std::isfinite(time)) {
      throw InvalidInput("slope fit needs positive finite pairs");
    }
    sx += std::log(n);
    sy += std::log(time);
  }
  const double m = static_cast<double>(pairs.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, time] : pairs) {
    const double x = std::log(n) - mx;
    const double y = std::log(time) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (sxx <= 1e-24) throw InvalidInput("slope fit is degenerate: all n are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

void BenchPlan::validate() const {
  if (solvers.empty()) throw InvalidInput("bench plan needs at least one solver");
  if (sizes.empty()) throw InvalidInput("bench plan needs at least one n");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < t) throw InvalidInput("bench n values must be >= t");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidInput("bench n values must be strictly increasing");
  }
  if (repetitions < 1) throw InvalidInput("bench repetitions must be >= 1");
  if (k < 1 || d < 1 || t < 1) throw InvalidInput("bench k, d, t must be >= 1");
  if (!(rate_hz > 0.0) || !(sample_rate_hz > rate_hz)) throw InvalidInput("bench rates must satisfy 0 < rate < sample rate");
  if (!(lambda_rel > 0.0)) throw InvalidInput("bench lambda_rel must be positive");
  if (!(time_limit_seconds > 0.0)) throw InvalidInput("bench time limit must be positive");
  if (parallel < 1) throw InvalidInput("bench parallel must be >= 1");
}

nlohmann::json BenchPlan::to_json() const {
  std::vector<std::string> names;
  for (auto s : solvers) names.emplace_back(solver_name(s));
  return {{"solvers", names},         {"n", sizes},
          {"repetitions", repetitions}, {"k", k},
          {"d", d},                   {"t", t},
          {"rate_hz", rate_hz},       {"sample_rate_hz", sample_rate_hz},
          {"lambda_rel", lambda_rel}, {"time_limit_s", time_limit_seconds},
          {"seed", seed},             {"parallel", parallel},
          {"skip_after_timeout", skip_after_timeout}};
}

BenchPlan BenchPlan::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("bench plan must be a JSON object");
  static const std::vector<std::string> known{"solvers", "n", "repetitions", "k", "d", "t", "rate_hz",
                                               "sample_rate_hz", "lambda_rel", "time_limit_s", "seed",
                                               "parallel", "skip_after_timeout"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidInput("unknown bench plan field '" + key + "'");
    }
  }
  BenchPlan plan;
  try {
    if (j.contains("solvers")) {
      plan.solvers.clear();
      for (const auto& s : j["solvers"]) plan.solvers.push_back(parse_solver(s.get<std::string>()));
    }
    if (j.contains("n")) {
      plan.sizes.clear();
      for (const auto& v : j["n"]) plan.sizes.push_back(static_cast<Index>(v.get<double>()));
    }
    plan.repetitions = j.value("repetitions", plan.repetitions);
    plan.k = j.value("k", plan.k);
    plan.d = j.value("d", plan.d);
    plan.t = j.value("t", plan.t);
    plan.rate_hz = j.value("rate_hz", plan.rate_hz);
    plan.sample_rate_hz = j.value("sample_rate_hz", plan.sample_rate_hz);
    plan.lambda_rel = j.value("lambda_rel", plan.lambda_rel);
    plan.time_limit_seconds = j.value("time_limit_s", plan.time_limit_seconds);
    plan.seed = j.value("seed", plan.seed);
    plan.parallel = j.value("parallel", plan.parallel);
    plan.skip_after_timeout = j.value("skip_after_timeout", plan.skip_after_timeout);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed bench plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

Dataset bench_dataset(const BenchPlan& plan, Index n, int rep) {
  DatasetSpec spec;
  spec.k = plan.k;
  spec.d = plan.d;
  spec.t = plan.t;
  spec.n = n;
  spec.rate_hz = plan.rate_hz;
  spec.sample_rate_hz = plan.sample_rate_hz;
  spec.shape_seed = derive_seed(plan.seed, kBenchShapes);
  spec.activation_seed =
      derive_seed(plan.seed, kBenchActivations, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
  return simulate_dataset(spec);
}

BenchResult run_bench(const BenchPlan& plan) {
  plan.validate();
  struct Task {
    std::size_t solver;
    std::size_t size;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < plan.solvers.size(); ++s) {
    for (std::size_t i = 0; i < plan.sizes.size(); ++i) tasks.push_back({s, i});
  }
  const auto reps = static_cast<std::size_t>(plan.repetitions);
  std::vector<BenchRun> runs(tasks.size() * reps);
  // Smallest size index at which each solver timed out.
  std::vector<std::atomic<std::size_t>> timed_out_at(plan.solvers.size());
  for (auto& v : timed_out_at) v = plan.sizes.size();

  auto run_task = [&](std::size_t task_index) {
    const auto [s, i] = tasks[task_index];
    const Solver solver = plan.solvers[s];
    const Index n = plan.sizes[i];
    for (std::size_t rep = 0; rep < reps; ++rep) {
      BenchRun& run = runs[task_index * reps + rep];
      run.solver = solver;
      run.n = n;
      run.rep = static_cast<int>(rep);
      if (plan.skip_after_timeout && timed_out_at[s].load() <= i) {
        run.timed_out = true;
        run.skipped = true;
        continue;
      }
      const Dataset ds = bench_dataset(plan, n, static_cast<int>(rep));
      SolverSettings settings;
      settings.mode = solver;
      settings.lasso.lambda = plan.lambda_rel * lambda_max(ds.shapes, ds.observed);
      run.truth_size = static_cast<std::int64_t>(ds.truth.size());

      const auto start = Clock::now();
      settings.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(plan.time_limit_seconds));
      const SolveResult result = solve(ds.shapes, ds.observed, settings);
      run.seconds = std::chrono::duration<double>(Clock::now() - start).count();

      run.iterations = result.report.iterations;
      run.certified = result.report.certified;
      run.timed_out = result.report.timed_out;
      run.support_size = static_cast<std::int64_t>(result.solution.size());
      run.objective = result.report.objective;
      if (run.timed_out) {
        std::size_t cur = timed_out_at[s].load();
        while (i < cur && !timed_out_at[s].compare_exchange_weak(cur, i)) {
        }
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(plan.parallel), tasks.size());
  if (workers <= 1) {
    for (std::size_t task = 0; task < tasks.size(); ++task) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t task = next++; task < tasks.size(); task = next++) {
          try {
            run_task(task);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  BenchResult result;
  result.runs = std::move(runs);
  summarize_bench(result);
  return result;
}

void summarize_bench(BenchResult& result) {
  result.cells.clear();
  result.slopes.clear();
  std::map<std::pair<Solver, Index>, std::vector<const BenchRun*>> grouped;
  std::vector<Solver> order;
  for (const auto& run : result.runs) {
    if (std::find(order.begin(), order.end(), run.solver) == order.end()) order.push_back(run.solver);
    grouped[{run.solver, run.n}].push_back(&run);
  }
  std::map<Solver, std::vector<std::pair<double, double>>> points;
  for (const auto& [key, list] : grouped) {
    BenchCell cell;
    cell.solver = key.first;
    cell.n = key.second;
    cell.runs = static_cast<int>(list.size());
    double sum = 0.0, sum_iter = 0.0;
    int completed = 0;
    for (const auto* run : list) {
      if (run->certified) ++cell.certified;
      if (run->timed_out) {
        ++cell.timeouts;
        continue;
      }
      ++completed;
      sum += run->seconds;
      sum_iter += static_cast<double>(run->iterations);
    }
    if (completed > 0) {
      cell.mean_seconds = sum / completed;
      cell.mean_iterations = sum_iter / completed;
      double var = 0.0;
      for (const auto* run : list) {
        if (!run->timed_out) var += (run->seconds - cell.mean_seconds) * (run->seconds - cell.mean_seconds);
      }
      cell.stddev_seconds = completed > 1 ? std::sqrt(var / (completed - 1)) : 0.0;
    }
    if (cell.timeouts == 0 && cell.certified == cell.runs && cell.mean_seconds > 0.0) {
      points[cell.solver].emplace_back(static_cast<double>(cell.n), cell.mean_seconds);
    }
    result.cells.push_back(cell);
  }
  for (Solver s : order) {
    const auto& pts = points[s];
    result.slopes[s] = pts.size() >= 3 ? std::optional<SlopeFit>(fit_loglog_slope(pts)) : std::nullopt;
  }
}

std::string BenchResult::runs_csv() const {
  std::string out = "solver,n,rep,seconds,iterations,certified\n";
  for (const auto& run : runs) {
    out += std::string(solver_name(run.solver)) + "," + std::to_string(run.n) + "," + std::to_string(run.rep) + "," +
           (run.timed_out ? std::string("timeout") : io::format_double(run.seconds)) + "," +
           std::to_string(run.iterations) + "," + (run.certified ? "1" : "0") + "\n";
  }
  return out;
}

std::string BenchResult::solutions_csv() const {
  std::string out = "solver,n,rep,truth_size,support_size,objective,iterations,certified,timed_out\n";
  for (const auto& run : runs) {
    out += std::string(solver_name(run.solver)) + "," + std::to_string(run.n) + "," + std::to_string(run.rep) + "," +
           std::to_string(run.truth_size) + "," + std::to_string(run.support_size) + "," +
           io::format_double(run.objective) + "," + std::to_string(run.iterations) + "," +
           (run.certified ? "1" : "0") + "," + (run.timed_out ? "1" : "0") + "\n";
  }
  return out;
}

nlohmann::json BenchResult::summary() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    cells_json.push_back({{"solver", solver_name(c.solver)},
                          {"n", c.n},
                          {"runs", c.runs},
                          {"certified", c.certified},
                          {"timeouts", c.timeouts},
                          {"mean_seconds", c.mean_seconds},
                          {"stddev_seconds", c.stddev_seconds},
                          {"mean_iterations", c.mean_iterations}});
  }
  nlohmann::json slopes_json = nlohmann::json::object();
  for (const auto& [solver, fit] : slopes) {
    if (fit) {
      slopes_json[solver_name(solver)] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2}};
    } else {
      slopes_json[solver_name(solver)] = nullptr;
    }
  }
  return {{"cells", cells_json}, {"slopes", slopes_json}};
}

}  // namespace spikelasso

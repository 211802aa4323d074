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

#include "spikelasso/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <thread>

#include "spikelasso/dictionary.hpp"
#include "spikelasso/io.hpp"

namespace spikelasso {
namespace {

constexpr std::uint64_t kSweepShapes = 0x5eeb'0001;
constexpr std::uint64_t kSweepActivations = 0x5eeb'0002;
constexpr std::uint64_t kSweepNoise = 0x5eeb'0003;
constexpr int kMaxAttempts = 1000;

}  // namespace

std::string LambdaSpec::to_string() const {
  return relative ? "rel:" + io::format_double(value) : io::format_double(value);
}

LambdaSpec LambdaSpec::parse(const std::string& text) {
  LambdaSpec out;
  std::string_view body = text;
  out.relative = body.starts_with("rel:");
  if (out.relative) body.remove_prefix(4);
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out.value);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty()) {
    throw InvalidInput("cannot parse lambda '" + text + "' (expected a number or rel:<number>)");
  }
  if (!(out.value > 0.0) || !std::isfinite(out.value)) throw InvalidInput("lambda must be positive: '" + text + "'");
  return out;
}

void SweepPlan::validate() const {
  if (lambdas.empty() || snrs_db.empty()) throw InvalidInput("sweep grid must be nonempty");
  if (draws < 1) throw InvalidInput("sweep draws must be >= 1");
  if (k < 1 || d < 1 || t < 1 || n < t) throw InvalidInput("sweep needs k, d, t >= 1 and n >= t");
  if (!(rate_hz > 0.0) || !(sample_rate_hz > rate_hz)) throw InvalidInput("sweep rates must satisfy 0 < rate < sample rate");
  if (match.tol < 0) throw InvalidInput("match tolerance must be nonnegative");
  if (cp_width < 0 || (cp_width > 0 && cp_width % 2 == 0)) throw InvalidInput("CP width must be odd");
  if (parallel < 1) throw InvalidInput("sweep parallel must be >= 1");
  for (const auto& s : snrs_db) {
    if (s && !std::isfinite(*s)) throw InvalidInput("SNR values must be finite");
  }
}

nlohmann::json SweepPlan::to_json() const {
  std::vector<std::string> lam;
  for (const auto& l : lambdas) lam.push_back(l.to_string());
  nlohmann::json snr = nlohmann::json::array();
  for (const auto& s : snrs_db) snr.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
  return {{"lambdas", lam},
          {"snrs_db", snr},
          {"draws", draws},
          {"k", k},
          {"d", d},
          {"t", t},
          {"n", n},
          {"rate_hz", rate_hz},
          {"sample_rate_hz", sample_rate_hz},
          {"jitter", jitter},
          {"seed", seed},
          {"solver", solver_name(solver)},
          {"tol", match.tol},
          {"cp_width", cp_width > 0 ? cp_width : CPConfig::for_shape_length(t).kernel_width}};
}

Dataset sweep_dataset(const SweepPlan& plan, int draw, std::optional<double> snr_db) {
  const auto d = static_cast<std::uint64_t>(draw);
  DatasetSpec spec;
  spec.k = plan.k;
  spec.d = plan.d;
  spec.t = plan.t;
  spec.n = plan.n;
  spec.rate_hz = plan.rate_hz;
  spec.sample_rate_hz = plan.sample_rate_hz;
  spec.jitter = plan.jitter;
  spec.shape_seed = derive_seed(plan.seed, kSweepShapes, d);
  spec.noise_seed = derive_seed(plan.seed, kSweepNoise, d);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    spec.activation_seed = derive_seed(plan.seed, kSweepActivations, d, static_cast<std::uint64_t>(attempt));
    Dataset ds = simulate_dataset(spec);
    if (ds.truth.empty()) continue;
    ds.observed = add_noise(ds.clean, ds.clean.squared_norm(), {snr_db, spec.noise_seed});
    return ds;
  }
  throw InvalidInput("sweep: no draw with at least one spike; raise the rate or n");
}

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  const std::size_t lambdas = plan.lambdas.size();
  const std::size_t snrs = plan.snrs_db.size();
  const CPConfig cp = plan.cp_width > 0 ? CPConfig{plan.cp_width, false} : CPConfig::for_shape_length(plan.t);

  SweepResult result;
  result.cells.resize(lambdas * snrs);
  for (std::size_t i = 0; i < lambdas; ++i) {
    for (std::size_t s = 0; s < snrs; ++s) {
      auto& cell = result.cells[i * snrs + s];
      cell.lambda = plan.lambdas[i];
      cell.snr_db = plan.snrs_db[s];
      cell.draws = plan.draws;
    }
  }

  // One task per (snr, draw): the dataset is shared by every lambda.
  auto run_task = [&](std::size_t task, std::vector<SweepCell>& acc) {
    const std::size_t s = task / static_cast<std::size_t>(plan.draws);
    const int draw = static_cast<int>(task % static_cast<std::size_t>(plan.draws));
    const Dataset ds = sweep_dataset(plan, draw, plan.snrs_db[s]);
    const double lmax = lambda_max(ds.shapes, ds.observed);
    for (std::size_t i = 0; i < lambdas; ++i) {
      SolverSettings settings;
      settings.mode = plan.solver;
      settings.lasso.lambda = plan.lambdas[i].resolve(lmax);
      const SolveResult r = solve(ds.shapes, ds.observed, settings);
      const F1Result f1 = f1_score(ds.truth, r.solution, plan.match);
      auto& cell = acc[i * snrs + s];
      cell.mean_precision += f1.precision;
      cell.mean_recall += f1.recall;
      cell.mean_f1 += f1.f1;
      cell.mean_cp += cp_score(ds.truth, r.solution, cp).value;
      cell.mean_truth_size += static_cast<double>(ds.truth.size());
      cell.mean_support_size += static_cast<double>(r.solution.size());
      if (!r.report.certified) ++cell.uncertified;
      if (r.report.timed_out) ++cell.timeouts;
    }
  };

  const std::size_t tasks = snrs * static_cast<std::size_t>(plan.draws);
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(plan.parallel), tasks);
  // Per-task partial sums, reduced in task order so the floating point
  // result does not depend on scheduling.
  std::vector<std::vector<SweepCell>> partial(tasks, std::vector<SweepCell>(lambdas * snrs));
  if (workers <= 1) {
    for (std::size_t task = 0; task < tasks; ++task) run_task(task, partial[task]);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t task = next++; task < tasks; task = next++) {
          try {
            run_task(task, partial[task]);
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

  const double inv = 1.0 / plan.draws;
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto& cell = result.cells[c];
    for (const auto& p : partial) {
      cell.mean_precision += p[c].mean_precision;
      cell.mean_recall += p[c].mean_recall;
      cell.mean_f1 += p[c].mean_f1;
      cell.mean_cp += p[c].mean_cp;
      cell.mean_truth_size += p[c].mean_truth_size;
      cell.mean_support_size += p[c].mean_support_size;
      cell.uncertified += p[c].uncertified;
      cell.timeouts += p[c].timeouts;
    }
    cell.mean_precision *= inv;
    cell.mean_recall *= inv;
    cell.mean_f1 *= inv;
    cell.mean_cp *= inv;
    cell.mean_truth_size *= inv;
    cell.mean_support_size *= inv;
  }
  return result;
}

std::string SweepResult::to_csv() const {
  std::string out =
      "lambda,snr_db,draws,mean_f1,mean_precision,mean_recall,mean_cp,mean_truth_size,mean_support_size,uncertified\n";
  for (const auto& c : cells) {
    out += c.lambda.to_string() + "," + (c.snr_db ? io::format_double(*c.snr_db) : std::string("inf")) + "," +
           std::to_string(c.draws) + "," + io::format_double(c.mean_f1) + "," + io::format_double(c.mean_precision) +
           "," + io::format_double(c.mean_recall) + "," + io::format_double(c.mean_cp) + "," +
           io::format_double(c.mean_truth_size) + "," + io::format_double(c.mean_support_size) + "," +
           std::to_string(c.uncertified) + "\n";
  }
  return out;
}

}  // namespace spikelasso

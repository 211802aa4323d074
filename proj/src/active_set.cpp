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

#include "spikelasso/active_set.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <string>

namespace spikelasso {
namespace {

using Clock = std::chrono::steady_clock;

bool past(const Deadline& deadline) { return deadline && Clock::now() >= *deadline; }

void validate_problem(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings) {
  settings.lasso.validate();
  if (shapes.electrodes() != y.electrodes()) {
    throw InvalidInput("electrode count mismatch: shapes have d=" + std::to_string(shapes.electrodes()) +
                       ", signal has d=" + std::to_string(y.electrodes()));
  }
  if (y.length() < shapes.length()) {
    throw InvalidInput("signal length " + std::to_string(y.length()) + " is shorter than t=" +
                       std::to_string(shapes.length()));
  }
  if (!(settings.resolved_kkt_tol() > 0.0)) throw InvalidInput("kkt_tol must be positive");
  if (settings.sub_max_iter < 1) throw InvalidInput("sub_max_iter must be at least 1");
}

LassoConfig sub_config(const SolverSettings& settings) {
  LassoConfig cfg = settings.lasso;
  cfg.max_iter = settings.sub_max_iter;
  return cfg;
}

std::int64_t iteration_cap(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& s) {
  return s.max_iterations > 0 ? s.max_iterations : static_cast<std::int64_t>(shapes.neurons()) * y.length();
}

void record_subproblem(SolveReport& report, const SubproblemResult& sub) {
  ++report.subproblems;
  report.subproblem_iterations += sub.iterations;
  report.max_subproblem_size = std::max<std::int64_t>(report.max_subproblem_size, sub.x.size());
}

void finish(SolveResult& result, const ActiveSetState& state, const SolverSettings& settings,
            const ActiveSetState::Scan& scan, Clock::time_point started) {
  auto& report = result.report;
  result.solution = state.solution();
  report.lambda = settings.lasso.lambda;
  report.kkt_tol = settings.resolved_kkt_tol();
  report.max_zero_correlation = scan.max_zero_correlation;
  report.certified = !report.timed_out && !report.iteration_cap_hit &&
                     scan.max_zero_correlation <= report.lambda + report.kkt_tol;
  report.objective = state.objective(settings.lasso.lambda);
  report.support_size = static_cast<std::int64_t>(result.solution.size());
  report.seconds = std::chrono::duration<double>(Clock::now() - started).count();
}

// Shared loop of the naive and group drivers: full-signal search, one
// insertion, one re-solve.
SolveResult full_scan_active_set(const ShapeBank& shapes, const MultiSignal& y,
                                 const SolverSettings& settings, bool whole_set) {
  validate_problem(shapes, y, settings);
  const auto started = Clock::now();
  SolveResult result;
  auto& report = result.report;
  report.solver = whole_set ? "as-naive" : "as-group";

  ActiveSetState state(shapes, y);
  const LassoConfig cfg = sub_config(settings);
  const double threshold = settings.lasso.lambda + settings.resolved_kkt_tol();
  const std::int64_t cap = iteration_cap(shapes, y, settings);
  const SampleRange everything{0, y.length()};

  while (true) {
    if (past(settings.deadline)) {
      report.timed_out = true;
      break;
    }
    const auto violation = state.max_violation(everything, threshold, &report.correlated_coordinates);
    if (!violation) break;
    if (report.iterations >= cap) {
      report.iteration_cap_hit = true;
      break;
    }
    const std::size_t group = state.insert_and_merge(violation->at);
    record_subproblem(report, whole_set ? state.solve_all(cfg) : state.solve_group(group, cfg));
    ++report.iterations;
  }
  const auto scan = state.full_scan(threshold, &report.correlated_coordinates);
  finish(result, state, settings, scan, started);
  return result;
}

}  // namespace

const char* solver_name(Solver solver) {
  switch (solver) {
    case Solver::fista_full:
      return "fista-full";
    case Solver::as_naive:
      return "as-naive";
    case Solver::as_group:
      return "as-group";
    case Solver::as_window:
      return "as-window";
  }
  return "?";
}

Solver parse_solver(const std::string& name) {
  if (name == "fista-full") return Solver::fista_full;
  if (name == "as-naive") return Solver::as_naive;
  if (name == "as-group") return Solver::as_group;
  if (name == "as-window") return Solver::as_window;
  throw InvalidInput("unknown solver '" + name + "' (expected fista-full, as-naive, as-group, as-window)");
}

ActiveSetState::ActiveSetState(const ShapeBank& shapes, const MultiSignal& y)
    : shapes_(&shapes),
      y_(&y),
      n_(y.length()),
      residual_(y),
      in_active_(static_cast<std::size_t>(shapes.neurons()) * static_cast<std::size_t>(y.length()), 0) {
  if (shapes.electrodes() != y.electrodes()) throw InvalidInput("electrode count mismatch");
}

std::optional<Violation> ActiveSetState::max_violation(SampleRange window, double threshold,
                                                       std::int64_t* work) const {
  if (window.empty()) return std::nullopt;
  const CorrelationMap corr = correlate(*shapes_, residual_, window);
  if (work != nullptr) *work += window.size() * shapes_->neurons();
  return find_max_violation(corr, [this](Coordinate c) { return contains(c); }, threshold);
}

std::size_t ActiveSetState::insert_and_merge(Coordinate c) {
  if (c.neuron < 0 || c.neuron >= shapes_->neurons() || c.sample < 0 || c.sample >= n_) {
    throw InvalidInput("coordinate (" + std::to_string(c.neuron) + ", " + std::to_string(c.sample) +
                       ") is out of range");
  }
  if (contains(c)) {
    throw InvalidInput("coordinate (" + std::to_string(c.neuron) + ", " + std::to_string(c.sample) +
                       ") is already active");
  }
  const Index t = shapes_->length();
  const std::size_t id = active_.size();
  active_.push_back({c, 0.0, column_correlation(*shapes_, *y_, c.neuron, c.sample)});
  in_active_[static_cast<std::size_t>(c.neuron) * n_ + c.sample] = 1;

  // Groups are disjoint and ordered, so both span ends are monotone.
  const auto first = std::partition_point(groups_.begin(), groups_.end(), [&](const OverlapGroup& g) {
    return g.span_max < c.sample - t;
  });
  const auto last = std::partition_point(first, groups_.end(), [&](const OverlapGroup& g) {
    return g.span_min <= c.sample + t;
  });

  OverlapGroup merged;
  merged.span_min = c.sample;
  merged.span_max = c.sample;
  merged.members.push_back(id);
  for (auto it = first; it != last; ++it) {
    merged.members.insert(merged.members.end(), it->members.begin(), it->members.end());
    merged.span_min = std::min(merged.span_min, it->span_min);
    merged.span_max = std::max(merged.span_max, it->span_max);
  }
  std::sort(merged.members.begin(), merged.members.end(),
            [this](std::size_t a, std::size_t b) { return active_[a].at < active_[b].at; });

  const auto index = static_cast<std::size_t>(first - groups_.begin());
  if (first == last) {
    groups_.insert(first, std::move(merged));
  } else {
    *first = std::move(merged);
    groups_.erase(first + 1, last);
  }
  return index;
}

SubproblemResult ActiveSetState::solve_group(std::size_t group_index, const LassoConfig& cfg) {
  const OverlapGroup& group = groups_.at(group_index);
  const auto m = static_cast<Eigen::Index>(group.members.size());
  QuadraticSubproblem sub;
  sub.gram.resize(m, m);
  sub.linear.resize(m);
  sub.columns.reserve(group.members.size());
  Eigen::VectorXd warm(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& a = active_[group.members[static_cast<std::size_t>(i)]];
    sub.columns.push_back(a.at);
    sub.linear[i] = a.y_corr;
    warm[i] = a.coeff;
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& b = active_[group.members[static_cast<std::size_t>(j)]];
      const double g = gram_entry(*shapes_, n_, a.at.neuron, a.at.sample, b.at.neuron, b.at.sample);
      sub.gram(i, j) = g;
      sub.gram(j, i) = g;
    }
  }
  SubproblemResult out = fista_sub(sub, cfg, warm);
  apply_coefficients(group.members, out.x);
  return out;
}

SubproblemResult ActiveSetState::solve_all(const LassoConfig& cfg) {
  const auto m = static_cast<Eigen::Index>(active_.size());
  const Eigen::Index grown = full_gram_.rows();
  if (grown < m) {
    full_gram_.conservativeResize(m, m);
    for (Eigen::Index i = grown; i < m; ++i) {
      const auto& a = active_[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j <= i; ++j) {
        const auto& b = active_[static_cast<std::size_t>(j)];
        const double g = gram_entry(*shapes_, n_, a.at.neuron, a.at.sample, b.at.neuron, b.at.sample);
        full_gram_(i, j) = g;
        full_gram_(j, i) = g;
      }
    }
  }
  QuadraticSubproblem sub;
  sub.gram = full_gram_;
  sub.linear.resize(m);
  Eigen::VectorXd warm(m);
  std::vector<std::size_t> ids(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& a = active_[static_cast<std::size_t>(i)];
    sub.columns.push_back(a.at);
    sub.linear[i] = a.y_corr;
    warm[i] = a.coeff;
    ids[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
  }
  SubproblemResult out = fista_sub(sub, cfg, warm);
  apply_coefficients(ids, out.x);
  return out;
}

void ActiveSetState::apply_coefficients(const std::vector<std::size_t>& ids, const Eigen::VectorXd& values) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& a = active_[ids[i]];
    const double next = values[static_cast<Eigen::Index>(i)];
    const double delta = next - a.coeff;
    if (delta != 0.0) add_column(residual_, *shapes_, a.at.neuron, a.at.sample, -delta);
    a.coeff = next;
  }
}

ActiveSetState::Scan ActiveSetState::full_scan(double threshold, std::int64_t* work) const {
  const int k = shapes_->neurons();
  const CorrelationMap corr = correlate(*shapes_, residual_, {0, n_});
  if (work != nullptr) *work += n_ * k;
  std::vector<char> nonzero(in_active_.size(), 0);
  for (const auto& a : active_) {
    if (std::abs(a.coeff) > kAmplitudeFloor) {
      nonzero[static_cast<std::size_t>(a.at.neuron) * n_ + a.at.sample] = 1;
    }
  }
  Scan scan;
  for (Index j = 0; j < n_; ++j) {
    for (int r = 0; r < k; ++r) {
      const auto flat = static_cast<std::size_t>(r) * n_ + j;
      if (nonzero[flat]) continue;
      const double g = std::abs(corr.at(r, j));
      scan.max_zero_correlation = std::max(scan.max_zero_correlation, g);
      if (g >= threshold && !in_active_[flat] && scan.earliest_violation < 0) scan.earliest_violation = j;
    }
  }
  return scan;
}

ActivationSet ActiveSetState::solution() const {
  std::vector<Activation> entries;
  for (const auto& a : active_) {
    if (std::abs(a.coeff) > kAmplitudeFloor) entries.push_back({a.at.neuron, a.at.sample, a.coeff});
  }
  return ActivationSet::from_entries(shapes_->neurons(), n_, std::move(entries));
}

double ActiveSetState::residual_drift() const {
  MultiSignal fresh = *y_;
  for (const auto& a : active_) {
    if (a.coeff != 0.0) add_column(fresh, *shapes_, a.at.neuron, a.at.sample, -a.coeff);
  }
  double drift = 0.0;
  const auto x = fresh.data();
  const auto r = residual_.data();
  for (std::size_t i = 0; i < x.size(); ++i) drift = std::max(drift, std::abs(x[i] - r[i]));
  return drift;
}

double ActiveSetState::objective(double lambda) const {
  double l1 = 0.0;
  for (const auto& a : active_) l1 += std::abs(a.coeff);
  return 0.5 * residual_.squared_norm() + lambda * l1;
}

SolveResult naive_active_set(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings) {
  return full_scan_active_set(shapes, y, settings, true);
}

SolveResult group_active_set(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings) {
  return full_scan_active_set(shapes, y, settings, false);
}

SolveResult windowed_active_set(const ShapeBank& shapes, const MultiSignal& y,
                                const SolverSettings& settings) {
  validate_problem(shapes, y, settings);
  const Index t = shapes.length();
  const Index w = settings.resolved_window(shapes.length());
  if (w <= t) {
    throw InvalidInput("window " + std::to_string(w) + " must exceed the shape length t=" + std::to_string(t));
  }
  const auto started = Clock::now();
  SolveResult result;
  auto& report = result.report;
  report.solver = "as-window";

  ActiveSetState state(shapes, y);
  const LassoConfig cfg = sub_config(settings);
  const double threshold = settings.lasso.lambda + settings.resolved_kkt_tol();
  const std::int64_t cap = iteration_cap(shapes, y, settings);
  const Index n = y.length();

  Index begin = 0;
  Index end = w;
  // Below this sample every group is closed; insertions must stay clear of it.
  [[maybe_unused]] Index closed_frontier = 0;
  ActiveSetState::Scan final_scan;
  bool scanned = false;

  while (true) {
    if (past(settings.deadline)) {
      report.timed_out = true;
      break;
    }
    const SampleRange window{begin, std::min(end, n)};
    if (const auto violation = state.max_violation(window, threshold, &report.correlated_coordinates)) {
      if (report.iterations >= cap) {
        report.iteration_cap_hit = true;
        break;
      }
      assert(violation->at.sample > closed_frontier - t);
      const std::size_t group = state.insert_and_merge(violation->at);
      record_subproblem(report, state.solve_group(group, cfg));
      ++report.iterations;
      continue;
    }

    if (end >= n) {
      final_scan = state.full_scan(threshold, &report.correlated_coordinates);
      scanned = true;
      if (final_scan.earliest_violation < 0) break;
      // A closed region was disturbed after the window left it: sweep again
      // from the earliest violation.
      ++report.certification_failures;
      begin = final_scan.earliest_violation;
      end = begin + w;
      closed_frontier = begin;
      scanned = false;
      continue;
    }

    const auto& groups = state.groups();
    const auto inside = std::partition_point(groups.begin(), groups.end(),
                                             [&](const OverlapGroup& g) { return g.span_min < end; });
    const OverlapGroup* rightmost = inside == groups.begin() ? nullptr : &*(inside - 1);
    if (rightmost != nullptr && rightmost->span_max >= end - t) {
      end += w;
      ++report.window_extensions;
      continue;
    }
    // Consecutive windows overlap by t samples: a correlation at j reads the
    // residual on [j, j + t).
    Index next = std::max(begin, end - t);
    if (rightmost != nullptr) next = std::max(next, rightmost->span_max + 1);
    begin = next;
    end = begin + w;
    closed_frontier = begin;
    ++report.window_advances;
  }
  if (!scanned) final_scan = state.full_scan(threshold, &report.correlated_coordinates);
  finish(result, state, settings, final_scan, started);
  return result;
}

SolveResult solve(const ShapeBank& shapes, const MultiSignal& y, const SolverSettings& settings) {
  switch (settings.mode) {
    case Solver::fista_full: {
      validate_problem(shapes, y, settings);
      return fista_full(shapes, y, settings.lasso, settings.resolved_kkt_tol(), settings.deadline);
    }
    case Solver::as_naive:
      return naive_active_set(shapes, y, settings);
    case Solver::as_group:
      return group_active_set(shapes, y, settings);
    case Solver::as_window:
      return windowed_active_set(shapes, y, settings);
  }
  throw InvalidInput("unknown solver mode");
}

}  // namespace spikelasso

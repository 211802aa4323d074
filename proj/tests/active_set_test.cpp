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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spikelasso/active_set.hpp"
#include "spikelasso/dictionary.hpp"
#include "test_support.hpp"

namespace spikelasso {
namespace {

using testing::Gen;

CorrelationMap single_row(std::vector<double> values, Index begin = 0) {
  CorrelationMap m(1, {begin, begin + static_cast<Index>(values.size())});
  std::copy(values.begin(), values.end(), m.row(0).begin());
  return m;
}

auto nothing_excluded = [](Coordinate) { return false; };

SolverSettings settings_for(Solver mode, double lambda) {
  SolverSettings s;
  s.mode = mode;
  s.lasso.lambda = lambda;
  return s;
}

std::vector<std::int64_t> sorted_samples(const ActiveSetState& state, const OverlapGroup& g) {
  std::vector<std::int64_t> out;
  for (auto id : g.members) out.push_back(state.coordinate(id).sample);
  std::sort(out.begin(), out.end());
  return out;
}

TEST(FindMaxViolation, Argmax) {
  const auto v = find_max_violation(single_row({0.5, 2.0, 0.9}), nothing_excluded, 1.0);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->at.sample, 1);
  EXPECT_EQ(v->value, 2.0);
}

TEST(FindMaxViolation, NoneBelowThreshold) {
  EXPECT_FALSE(find_max_violation(single_row({0.5, -0.99, 0.9}), nothing_excluded, 1.0).has_value());
}

TEST(FindMaxViolation, TieGoesToSmallerSample) {
  const auto v = find_max_violation(single_row({0.1, -3.0, 0.2, 3.0}, 10), nothing_excluded, 1.0);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->at.sample, 11);
}

TEST(FindMaxViolation, TieGoesToSmallerNeuron) {
  CorrelationMap m(3, {0, 2});
  m.row(0)[1] = 1.0;
  m.row(1)[1] = -5.0;
  m.row(2)[1] = 5.0;
  const auto v = find_max_violation(m, nothing_excluded, 1.0);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->at.neuron, 1);
}

TEST(FindMaxViolation, SkipsExcluded) {
  const auto v = find_max_violation(single_row({0.5, 2.0, 1.5}), [](Coordinate c) { return c.sample == 1; }, 1.0);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->at.sample, 2);
}

class MergeTest : public ::testing::Test {
 protected:
  MergeTest() : shapes_(1, 1, 3, {1.0, 2.0, 1.0}), y_(1, 40) {}
  ShapeBank shapes_;
  MultiSignal y_;
};

TEST_F(MergeTest, ChainExtends) {
  ActiveSetState state(shapes_, y_);
  state.insert_and_merge({0, 10});
  state.insert_and_merge({0, 12});
  ASSERT_EQ(state.groups().size(), 1u);
  const auto& g = insert_and_merge(state, {0, 14});
  EXPECT_EQ(state.groups().size(), 1u);
  EXPECT_EQ(sorted_samples(state, g), (std::vector<std::int64_t>{10, 12, 14}));
  EXPECT_EQ(g.span_min, 10);
  EXPECT_EQ(g.span_max, 14);
}

TEST_F(MergeTest, FarInsertionStartsGroup) {
  ActiveSetState state(shapes_, y_);
  state.insert_and_merge({0, 10});
  state.insert_and_merge({0, 12});
  const auto& g = insert_and_merge(state, {0, 20});
  EXPECT_EQ(state.groups().size(), 2u);
  EXPECT_EQ(sorted_samples(state, g), (std::vector<std::int64_t>{20}));
}

TEST_F(MergeTest, BridgingInsertionMergesBoth) {
  // Groups use the shape length as the chain distance, so t = 2 needs its own bank.
  const ShapeBank two(1, 1, 2, {1.0, 1.0});
  ActiveSetState state(two, y_);
  for (Index j : {0, 2, 4, 5, 9, 11, 12}) state.insert_and_merge({0, j});
  ASSERT_EQ(state.groups().size(), 2u);
  const auto& g = insert_and_merge(state, {0, 7});
  EXPECT_EQ(state.groups().size(), 1u);
  EXPECT_EQ(sorted_samples(state, g), (std::vector<std::int64_t>{0, 2, 4, 5, 7, 9, 11, 12}));
}

TEST_F(MergeTest, RejectsDuplicate) {
  ActiveSetState state(shapes_, y_);
  state.insert_and_merge({0, 10});
  EXPECT_THROW(state.insert_and_merge({0, 10}), InvalidInput);
}

// Random insertion sequences: groups always partition J into chains whose
// gaps are <= t, and distinct groups are more than t apart.
TEST(GroupPartition, RandomInsertions) {
  Gen g(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int t = g.integer(1, 10);
    const int k = g.integer(1, 3);
    const Index n = g.index(20, 300);
    const ShapeBank shapes = g.shapes(k, 1, t);
    const MultiSignal y(1, n);
    ActiveSetState state(shapes, y);
    std::set<std::pair<Index, int>> inserted;
    const int count = g.integer(1, 60);
    for (int i = 0; i < count; ++i) {
      const Coordinate c{g.integer(0, k - 1), g.index(0, n - 1)};
      if (!inserted.insert({c.sample, c.neuron}).second) continue;
      state.insert_and_merge(c);
    }
    std::size_t members = 0;
    Index previous_max = -1;
    for (const auto& group : state.groups()) {
      members += group.members.size();
      std::vector<Index> samples;
      for (auto id : group.members) samples.push_back(state.coordinate(id).sample);
      std::sort(samples.begin(), samples.end());
      for (std::size_t i = 1; i < samples.size(); ++i) ASSERT_LE(samples[i] - samples[i - 1], t);
      ASSERT_EQ(group.span_min, samples.front());
      ASSERT_EQ(group.span_max, samples.back());
      if (previous_max >= 0) ASSERT_GT(group.span_min - previous_max, t);
      previous_max = group.span_max;
    }
    ASSERT_EQ(members, inserted.size());
    ASSERT_EQ(members, state.active_count());
  }
}

TEST(ActiveSet, ZeroSignalAllModes) {
  Gen g(2);
  const auto w = g.shapes(2, 2, 10);
  const MultiSignal y(2, 500);
  for (Solver mode : {Solver::as_naive, Solver::as_group, Solver::as_window}) {
    const auto r = solve(w, y, settings_for(mode, 1.0));
    EXPECT_TRUE(r.solution.empty());
    EXPECT_EQ(r.report.iterations, 0);
    EXPECT_EQ(r.report.subproblems, 0);
    EXPECT_TRUE(r.report.certified);
  }
}

TEST(ActiveSet, SingleSpikeOneIteration) {
  const auto w = testing::single_shape({1, 2, 1});
  const auto y = forward(w, ActivationSet::from_entries(1, 100, {{0, 40, 1.0}}), 100);
  for (Solver mode : {Solver::as_naive, Solver::as_group, Solver::as_window}) {
    const auto r = solve(w, y, settings_for(mode, 3.0));
    ASSERT_EQ(r.solution.size(), 1u) << solver_name(mode);
    EXPECT_EQ(r.report.iterations, 1);
    EXPECT_EQ(r.solution.entries()[0].sample, 40);
    EXPECT_NEAR(r.solution.entries()[0].amplitude, 0.5, 1e-12);
  }
}

TEST(ActiveSet, SeparatedSpikesSolvedIndependently) {
  Gen g(3);
  const auto w = g.shapes(2, 2, 8);
  const auto y = forward(w, ActivationSet::from_entries(2, 200, {{0, 20, 1.0}, {1, 120, -1.5}}), 200);
  const double lambda = 0.05 * lambda_max(w, y);
  const auto naive = solve(w, y, settings_for(Solver::as_naive, lambda));
  const auto group = solve(w, y, settings_for(Solver::as_group, lambda));
  ASSERT_TRUE(naive.report.certified);
  ASSERT_TRUE(group.report.certified);
  ASSERT_EQ(naive.solution.size(), group.solution.size());
  for (std::size_t i = 0; i < naive.solution.size(); ++i) {
    EXPECT_EQ(naive.solution.entries()[i].sample, group.solution.entries()[i].sample);
    EXPECT_NEAR(naive.solution.entries()[i].amplitude, group.solution.entries()[i].amplitude, 1e-12);
  }
}

TEST(ActiveSet, SynchronizedPairMatchesNaive) {
  Gen g(4);
  const auto w = g.shapes(2, 3, 12);
  const auto y = forward(w, ActivationSet::from_entries(2, 100, {{0, 40, 1.0}, {1, 45, 1.0}}), 100);
  const double lambda = 0.1 * lambda_max(w, y);
  const auto naive = solve(w, y, settings_for(Solver::as_naive, lambda));
  const auto group = solve(w, y, settings_for(Solver::as_group, lambda));
  ASSERT_EQ(naive.solution.size(), group.solution.size());
  for (std::size_t i = 0; i < naive.solution.size(); ++i) {
    EXPECT_EQ(naive.solution.entries()[i].neuron, group.solution.entries()[i].neuron);
    EXPECT_EQ(naive.solution.entries()[i].sample, group.solution.entries()[i].sample);
    EXPECT_NEAR(naive.solution.entries()[i].amplitude, group.solution.entries()[i].amplitude, 1e-8);
  }
  EXPECT_GE(group.report.max_subproblem_size, 2);
}

TEST(ActiveSet, WindowExtendsAlongLongChain) {
  const int t = 10;
  const Index w = 40;
  const auto shapes = testing::single_shape({1, 3, 5, 4, 2, 0, -2, -3, -2, -1});
  std::vector<Activation> chain;
  for (Index j = 5; j < 5 + 3 * w; j += t - 1) chain.push_back({0, j, 1.0});
  const Index n = 3 * w + 40;
  const auto y = forward(shapes, ActivationSet::from_entries(1, n, chain), n);
  const double lambda = 0.01 * lambda_max(shapes, y);

  auto windowed = settings_for(Solver::as_window, lambda);
  windowed.window = w;
  const auto win = solve(shapes, y, windowed);
  const auto naive = solve(shapes, y, settings_for(Solver::as_naive, lambda));
  ASSERT_TRUE(win.report.certified);
  EXPECT_GE(win.report.window_extensions, 2);
  ASSERT_EQ(win.solution.size(), naive.solution.size());
  for (std::size_t i = 0; i < win.solution.size(); ++i) {
    EXPECT_EQ(win.solution.entries()[i].sample, naive.solution.entries()[i].sample);
    EXPECT_NEAR(win.solution.entries()[i].amplitude, naive.solution.entries()[i].amplitude, 1e-8);
  }
}

TEST(ActiveSet, SpikesFartherThanWindowMatchNaive) {
  Gen g(5);
  const auto shapes = g.shapes(2, 2, 10);
  const auto y = forward(shapes, ActivationSet::from_entries(2, 600, {{0, 30, 1.0}, {1, 400, 1.0}}), 600);
  const double lambda = 0.1 * lambda_max(shapes, y);
  auto ws = settings_for(Solver::as_window, lambda);
  ws.window = 50;
  const auto win = solve(shapes, y, ws);
  const auto naive = solve(shapes, y, settings_for(Solver::as_naive, lambda));
  EXPECT_EQ(win.solution.size(), naive.solution.size());
  EXPECT_NEAR(win.report.objective, naive.report.objective, 1e-12 * naive.report.objective);
}

TEST(ActiveSet, WindowMustExceedShapeLength) {
  const auto w = testing::single_shape({1, 2, 1});
  auto s = settings_for(Solver::as_window, 1.0);
  s.window = 3;
  EXPECT_THROW(solve(w, MultiSignal(1, 50), s), InvalidInput);
}

TEST(ActiveSet, RejectsMismatchedInputs) {
  Gen g(6);
  const auto w = g.shapes(1, 2, 5);
  EXPECT_THROW(solve(w, MultiSignal(3, 50), settings_for(Solver::as_group, 1.0)), InvalidInput);
  EXPECT_THROW(solve(w, MultiSignal(2, 50), settings_for(Solver::as_group, 0.0)), InvalidInput);
}

// All modes agree with each other and with full-signal FISTA on random
// simulated instances, and every solution certifies.
TEST(ActiveSet, ModeEquivalence) {
  Gen g(7);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = g.integer(1, 4);
    const int d = g.integer(1, 4);
    const int t = g.integer(8, 30);
    const Index n = g.index(300, 1500);
    const std::optional<double> snr = g.coin() ? std::optional<double>() : std::optional<double>(g.uniform(0, 20));
    const auto ds = testing::small_dataset(500 + trial, k, d, t, n, 60.0, 10000.0, snr);
    const double lambda = g.uniform(0.05, 0.5) * lambda_max(ds.shapes, ds.observed);
    std::vector<SolveResult> results;
    for (Solver mode : {Solver::fista_full, Solver::as_naive, Solver::as_group, Solver::as_window}) {
      results.push_back(solve(ds.shapes, ds.observed, settings_for(mode, lambda)));
      const auto& r = results.back();
      ASSERT_TRUE(r.report.certified) << solver_name(mode) << " trial " << trial;
      ASSERT_LE(r.report.max_zero_correlation, lambda * (1 + 1e-6)) << solver_name(mode);
    }
    for (std::size_t m = 1; m < results.size(); ++m) {
      EXPECT_LE(std::abs(results[m].report.objective - results[0].report.objective),
                1e-6 * std::abs(results[0].report.objective))
          << "trial " << trial;
      ASSERT_EQ(results[m].solution.size(), results[0].solution.size()) << "trial " << trial << " mode " << m;
      for (std::size_t i = 0; i < results[0].solution.size(); ++i) {
        EXPECT_EQ(results[m].solution.entries()[i].neuron, results[0].solution.entries()[i].neuron);
        EXPECT_EQ(results[m].solution.entries()[i].sample, results[0].solution.entries()[i].sample);
      }
    }
  }
}

// The incrementally maintained residual stays within 1e-9 of a recomputation
// after every subproblem solve.
TEST(ActiveSetState, ResidualConsistency) {
  Gen g(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ds = testing::small_dataset(900 + trial, 3, 2, 20, 800, 80.0, 10000.0, 5.0);
    const double lambda = 0.1 * lambda_max(ds.shapes, ds.observed);
    LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iter = 1000;
    ActiveSetState state(ds.shapes, ds.observed);
    std::size_t previous = 0;
    for (int it = 0; it < 200; ++it) {
      const auto v = state.max_violation({0, 800}, lambda * (1 + 1e-6));
      if (!v) break;
      const std::size_t group = state.insert_and_merge(v->at);
      ASSERT_GT(state.active_count(), previous);
      previous = state.active_count();
      state.solve_group(group, cfg);
      ASSERT_LE(state.residual_drift(), 1e-9) << "trial " << trial << " iteration " << it;
    }
    EXPECT_LE(state.full_scan(lambda * (1 + 1e-6)).max_zero_correlation, lambda * (1 + 1e-6));
  }
}

TEST(ActiveSet, IterationCapReported) {
  const auto ds = testing::small_dataset(11, 2, 2, 20, 1000, 100.0, 10000.0, 10.0);
  auto s = settings_for(Solver::as_group, 0.05 * lambda_max(ds.shapes, ds.observed));
  s.max_iterations = 3;
  const auto r = solve(ds.shapes, ds.observed, s);
  EXPECT_TRUE(r.report.iteration_cap_hit);
  EXPECT_FALSE(r.report.certified);
  EXPECT_EQ(r.report.iterations, 3);
}

TEST(ActiveSet, DeadlineStopsSolve) {
  const auto ds = testing::small_dataset(12, 2, 2, 20, 1000, 100.0, 10000.0, 10.0);
  auto s = settings_for(Solver::as_naive, 0.01 * lambda_max(ds.shapes, ds.observed));
  s.deadline = std::chrono::steady_clock::now();
  const auto r = solve(ds.shapes, ds.observed, s);
  EXPECT_TRUE(r.report.timed_out);
  EXPECT_FALSE(r.report.certified);
}

TEST(SolverNames, RoundTrip) {
  for (Solver s : {Solver::fista_full, Solver::as_naive, Solver::as_group, Solver::as_window}) {
    EXPECT_EQ(parse_solver(solver_name(s)), s);
  }
  EXPECT_THROW(parse_solver("newton"), InvalidInput);
}

}  // namespace
}  // namespace spikelasso

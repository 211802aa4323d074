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

#include "spikelasso/metrics.hpp"
#include "test_support.hpp"

namespace spikelasso {
namespace {

using testing::Gen;

ActivationSet spikes(int k, Index n, std::vector<Activation> e) { return ActivationSet::from_entries(k, n, std::move(e)); }

// Dense convolution of each neuron's train with the box kernel, summed.
double brute_force_cp(const ActivationSet& x, const ActivationSet& y, Index width, bool binarize = false) {
  const int k = x.neurons();
  const Index n = x.length();
  const Index half = width / 2;
  double num = 0.0, den = 0.0;
  for (int r = 0; r < k; ++r) {
    std::vector<double> diff(static_cast<std::size_t>(n), 0.0);
    for (const auto& e : x.entries()) {
      if (e.neuron == r) {
        diff[e.sample] += binarize ? 1.0 : e.amplitude;
        den += binarize ? 1.0 : std::abs(e.amplitude);
      }
    }
    for (const auto& e : y.entries()) {
      if (e.neuron == r) {
        diff[e.sample] -= binarize ? 1.0 : e.amplitude;
        den += binarize ? 1.0 : std::abs(e.amplitude);
      }
    }
    for (Index i = -half; i < n + half; ++i) {
      double s = 0.0;
      for (Index j = i - half; j <= i + half; ++j) {
        if (j >= 0 && j < n) s += diff[j];
      }
      num += std::abs(s) / static_cast<double>(width);
    }
  }
  return den == 0.0 ? 1.0 : 1.0 - num / den;
}

TEST(F1, Identity) {
  const auto a = spikes(2, 100, {{0, 3, 1.0}, {1, 50, 2.0}});
  const auto r = f1_score(a, a);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(F1, EmptyEstimate) {
  const auto r = f1_score(spikes(1, 100, {{0, 3, 1.0}}), ActivationSet(1, 100));
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(F1, Tolerance) {
  const auto truth = spikes(1, 200, {{0, 100, 1.0}});
  const auto est = spikes(1, 200, {{0, 101, 1.0}});
  EXPECT_EQ(f1_score(truth, est, {0, true}).f1, 0.0);
  EXPECT_EQ(f1_score(truth, est, {1, true}).f1, 1.0);
}

TEST(F1, NeuronIdentityMatters) {
  const auto truth = spikes(2, 200, {{0, 100, 1.0}});
  const auto est = spikes(2, 200, {{1, 100, 1.0}});
  EXPECT_EQ(f1_score(truth, est).f1, 0.0);
  EXPECT_EQ(f1_score(truth, est, {0, false}).f1, 1.0);
}

TEST(F1, OneToOne) {
  const auto truth = spikes(1, 200, {{0, 100, 1.0}});
  const auto est = spikes(1, 200, {{0, 99, 1.0}, {0, 101, 1.0}});
  const auto r = f1_score(truth, est, {2, true});
  EXPECT_EQ(r.true_positives, 1);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
}

TEST(F1, NearestUnmatchedWins) {
  const auto truth = spikes(1, 200, {{0, 10, 1.0}, {0, 14, 1.0}});
  const auto est = spikes(1, 200, {{0, 13, 1.0}, {0, 16, 1.0}});
  // 13 takes 14 (distance 1); 16 cannot reach 10 with tol 3.
  const auto r = f1_score(truth, est, {3, true});
  EXPECT_EQ(r.true_positives, 1);
}

TEST(F1, UnboundedToleranceSaturates) {
  Gen g(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = g.integer(1, 3);
    const Index n = 500;
    std::vector<Activation> a, b;
    for (int r = 0; r < k; ++r) {
      const int count = g.integer(0, 10);
      std::set<Index> sa, sb;
      while (static_cast<int>(sa.size()) < count) sa.insert(g.index(0, n - 1));
      while (static_cast<int>(sb.size()) < count) sb.insert(g.index(0, n - 1));
      for (Index s : sa) a.push_back({r, s, 1.0});
      for (Index s : sb) b.push_back({r, s, 1.0});
    }
    const auto r = f1_score(spikes(k, n, a), spikes(k, n, b), {MatchConfig::kUnbounded, true});
    ASSERT_EQ(r.f1, 1.0) << "trial " << trial;
  }
}

TEST(F1, Symmetric) {
  Gen g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = g.activations(2, 300, static_cast<std::size_t>(g.integer(1, 20)), false);
    const auto b = g.activations(2, 300, static_cast<std::size_t>(g.integer(1, 20)), false);
    ASSERT_DOUBLE_EQ(f1_score(a, b).f1, f1_score(b, a).f1);
  }
}

TEST(CP, Identity) {
  Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = g.activations(3, 400, static_cast<std::size_t>(g.integer(1, 30)));
    ASSERT_EQ(cp_score(a, a, {2 * g.integer(0, 10) + 1, false}).value, 1.0);
  }
}

TEST(CP, DisjointDistant) {
  const auto x = spikes(1, 200, {{0, 20, 1.0}});
  const auto y = spikes(1, 200, {{0, 120, 1.0}});
  EXPECT_EQ(cp_score(x, y, {5, false}).value, 0.0);
}

TEST(CP, SingleShift) {
  const auto x = spikes(1, 200, {{0, 50, 1.0}});
  const auto y = spikes(1, 200, {{0, 51, 1.0}});
  EXPECT_DOUBLE_EQ(cp_score(x, y, {5, false}).value, 0.8);
}

TEST(CP, BothEmpty) {
  const auto r = cp_score(ActivationSet(2, 10), ActivationSet(2, 10), {3, false});
  EXPECT_EQ(r.value, 1.0);
  EXPECT_TRUE(r.both_empty);
}

TEST(CP, RejectsEvenWidth) {
  EXPECT_THROW(cp_score(ActivationSet(1, 10), ActivationSet(1, 10), {4, false}), InvalidInput);
  EXPECT_THROW(cp_score(ActivationSet(1, 10), ActivationSet(1, 10), {0, false}), InvalidInput);
}

TEST(CP, DefaultWidth) {
  EXPECT_EQ(CPConfig::for_shape_length(30).kernel_width, 15);
  EXPECT_EQ(CPConfig::for_shape_length(60).kernel_width, 31);
  EXPECT_EQ(CPConfig::for_shape_length(1).kernel_width, 1);
  EXPECT_EQ(CPConfig::for_shape_length(150).kernel_width % 2, 1);
}

TEST(CP, MatchesBruteForce) {
  Gen g(4);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = g.integer(1, 3);
    const Index n = g.index(5, 200);
    const auto x = g.activations(k, n, static_cast<std::size_t>(g.integer(0, 15)), g.coin());
    const auto y = g.activations(k, n, static_cast<std::size_t>(g.integer(0, 15)), g.coin());
    const Index width = 2 * g.index(0, 12) + 1;
    const bool binarize = g.coin(0.3);
    const double got = cp_score(x, y, {width, binarize}).value;
    ASSERT_NEAR(got, brute_force_cp(x, y, width, binarize), 1e-12) << "trial " << trial;
  }
}

TEST(CP, SymmetricAndBounded) {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = g.activations(2, 300, static_cast<std::size_t>(g.integer(0, 20)), g.coin());
    const auto y = g.activations(2, 300, static_cast<std::size_t>(g.integer(0, 20)), g.coin());
    const CPConfig cfg{2 * g.index(0, 10) + 1, false};
    const double a = cp_score(x, y, cfg).value;
    ASSERT_NEAR(a, cp_score(y, x, cfg).value, 1e-12);
    ASSERT_LE(a, 1.0);
  }
}

// Wider kernels forgive a single shift smaller than the width.
TEST(CP, MonotoneInWidthForShift) {
  Gen g(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Index shift = g.index(1, 10);
    const Index s = g.index(20, 100);
    const auto x = spikes(1, 200, {{0, s, 1.0}});
    const auto y = spikes(1, 200, {{0, s + shift, 1.0}});
    double previous = -1.0;
    for (Index width = 2 * shift + 1; width < 41; width += 2) {
      const double v = cp_score(x, y, {width, false}).value;
      ASSERT_GE(v, previous - 1e-15) << "shift " << shift << " width " << width;
      previous = v;
    }
  }
}

}  // namespace
}  // namespace spikelasso

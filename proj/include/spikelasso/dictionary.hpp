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

// Matrix-free block-Toeplitz dictionary H. Column (r, j) is neuron r's
// waveform with onset at sample j, right-truncated at the signal end. H is
// never stored; a ShapeBank plus a signal length n is the operator.

#include <span>
#include <vector>

#include "spikelasso/types.hpp"

namespace spikelasso {

/// Signed correlations H^T x for every neuron over a sample window.
class CorrelationMap {
 public:
  CorrelationMap() = default;
  CorrelationMap(int k, SampleRange window);

  int neurons() const { return k_; }
  SampleRange window() const { return window_; }

  double at(int r, Index j) const {
    return values_[static_cast<std::size_t>(r) * window_.size() + (j - window_.begin)];
  }
  std::span<double> row(int r) {
    return {values_.data() + static_cast<std::size_t>(r) * window_.size(),
            static_cast<std::size_t>(window_.size())};
  }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * window_.size(),
            static_cast<std::size_t>(window_.size())};
  }
  std::span<const double> values() const { return values_; }

 private:
  int k_ = 0;
  SampleRange window_;
  std::vector<double> values_;
};

/// S = sum_r W_r * A_r, cost O(t d |acts|) plus the output allocation.
MultiSignal forward(const ShapeBank& shapes, const ActivationSet& acts, Index n);

/// H a for solver-side activations: any sample in [0, n), columns near the
/// right edge truncated.
MultiSignal apply_dictionary(const ShapeBank& shapes, const ActivationSet& acts, Index n);

/// signal += amplitude * H_{(r, j)}. Samples past the end are dropped.
void add_column(MultiSignal& signal, const ShapeBank& shapes, int r, Index j, double amplitude);

/// H^T x restricted to `window`; out-of-range signal samples read as zero.
CorrelationMap correlate(const ShapeBank& shapes, const MultiSignal& x, SampleRange window);

/// Single entry H_{(r, j)}^T x, O(d t).
double column_correlation(const ShapeBank& shapes, const MultiSignal& x, int r, Index j);

/// <H_{(r1, j1)}, H_{(r2, j2)}> for a signal of length n. Zero when |j1 - j2| >= t.
double gram_entry(const ShapeBank& shapes, Index n, int r1, Index j1, int r2, Index j2);

/// max_{r, j} |H^T y|: the smallest lambda whose Lasso solution is zero.
double lambda_max(const ShapeBank& shapes, const MultiSignal& y);

/// Upper bound on the largest eigenvalue of H^T H for length n.
///
/// Power iteration on correlate(forward(.)) from a fixed-seed start vector
/// (100 iterations, relative tolerance 1e-7), scaled by 1.02 on convergence
/// and by 1.5 otherwise. The result is capped by the row-sum bound
/// max_r sum_{r', lag, p, l} |W_r[p][l] W_r'[p][l + lag]|, which always
/// dominates the spectrum.
double lipschitz_bound(const ShapeBank& shapes, Index n);

/// out = H a for a dense coefficient vector laid out neuron-major (k * n).
void forward_dense(const ShapeBank& shapes, std::span<const double> coeffs, MultiSignal& out);

/// out = H^T x over the full signal, neuron-major (k * n).
void correlate_dense(const ShapeBank& shapes, const MultiSignal& x, std::span<double> out);

}  // namespace spikelasso

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

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikelasso {

using Index = std::int64_t;

/// Thrown for malformed inputs: bad dimensions, invalid files, broken invariants.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Half-open sample interval [begin, end).
struct SampleRange {
  Index begin = 0;
  Index end = 0;

  Index size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return end <= begin; }
  bool contains(Index j) const { return j >= begin && j < end; }
};

/// Known multi-electrode waveforms of k neurons, each d electrodes by t lags.
/// Together with a signal length n this defines the dictionary H implicitly:
/// column (r, j) is neuron r's waveform placed at onset sample j.
class ShapeBank {
 public:
  ShapeBank() = default;
  /// `waveforms` is laid out (neuron, electrode, lag), k*d*t values.
  ShapeBank(int k, int d, int t, std::vector<double> waveforms);

  int neurons() const { return k_; }
  int electrodes() const { return d_; }
  int length() const { return t_; }

  std::span<const double> waveform(int r, int p) const {
    return {data_.data() + (static_cast<std::size_t>(r) * d_ + p) * t_,
            static_cast<std::size_t>(t_)};
  }
  double at(int r, int p, int lag) const { return waveform(r, p)[lag]; }
  std::span<const double> data() const { return data_; }

  /// Squared Frobenius norm of W_r.
  double energy(int r) const;

 private:
  int k_ = 0;
  int d_ = 0;
  int t_ = 0;
  std::vector<double> data_;
};

/// Dense d x n sample array, electrode-major.
class MultiSignal {
 public:
  MultiSignal() = default;
  MultiSignal(int d, Index n);
  MultiSignal(int d, Index n, std::vector<double> samples);

  int electrodes() const { return d_; }
  Index length() const { return n_; }

  std::span<double> row(int p) {
    return {data_.data() + static_cast<std::size_t>(p) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const double> row(int p) const {
    return {data_.data() + static_cast<std::size_t>(p) * n_, static_cast<std::size_t>(n_)};
  }
  double& at(int p, Index j) { return data_[static_cast<std::size_t>(p) * n_ + j]; }
  double at(int p, Index j) const { return data_[static_cast<std::size_t>(p) * n_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double squared_norm() const;

  friend bool operator==(const MultiSignal&, const MultiSignal&) = default;

 private:
  int d_ = 0;
  Index n_ = 0;
  std::vector<double> data_;
};

/// One nonzero coefficient of a: neuron r fires at sample j with an amplitude.
struct Activation {
  int neuron = 0;
  Index sample = 0;
  double amplitude = 0.0;

  friend bool operator==(const Activation&, const Activation&) = default;
};

/// One coordinate of a: neuron and onset sample.
struct Coordinate {
  int neuron = 0;
  Index sample = 0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
  /// Canonical order: sample first, then neuron.
  friend auto operator<=>(const Coordinate& a, const Coordinate& b) {
    if (auto c = a.sample <=> b.sample; c != 0) return c;
    return a.neuron <=> b.neuron;
  }
};

/// Sparse activation vector a in R^{kn}; flat index is neuron * n + sample.
/// Entries are kept sorted by (sample, neuron) and are unique per coordinate.
class ActivationSet {
 public:
  ActivationSet() = default;
  ActivationSet(int k, Index n) : k_(k), n_(n) {}

  /// Validates and sorts. Rejects duplicates, out-of-range indices and
  /// zero or non-finite amplitudes.
  static ActivationSet from_entries(int k, Index n, std::vector<Activation> entries);

  int neurons() const { return k_; }
  Index length() const { return n_; }
  std::span<const Activation> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double l1_norm() const;
  std::size_t count_for(int neuron) const;

  friend bool operator==(const ActivationSet&, const ActivationSet&) = default;

 private:
  int k_ = 0;
  Index n_ = 0;
  std::vector<Activation> entries_;
};

}  // namespace spikelasso

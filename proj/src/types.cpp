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

#include "spikelasso/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spikelasso {

ShapeBank::ShapeBank(int k, int d, int t, std::vector<double> waveforms)
    : k_(k), d_(d), t_(t), data_(std::move(waveforms)) {
  if (k < 1 || d < 1 || t < 1) {
    throw InvalidInput("shape bank dimensions must be positive (k=" + std::to_string(k) +
                       ", d=" + std::to_string(d) + ", t=" + std::to_string(t) + ")");
  }
  if (data_.size() != static_cast<std::size_t>(k) * d * t) {
    throw InvalidInput("shape bank expects " + std::to_string(static_cast<std::size_t>(k) * d * t) +
                       " values, got " + std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidInput("non-finite waveform value at index " + std::to_string(i));
    }
  }
  for (int r = 0; r < k; ++r) {
    if (energy(r) == 0.0) {
      throw InvalidInput("neuron " + std::to_string(r) + " has an all-zero waveform");
    }
  }
}

double ShapeBank::energy(int r) const {
  double e = 0.0;
  for (int p = 0; p < d_; ++p) {
    for (double v : waveform(r, p)) e += v * v;
  }
  return e;
}

MultiSignal::MultiSignal(int d, Index n)
    : d_(d), n_(n), data_(static_cast<std::size_t>(d) * static_cast<std::size_t>(n), 0.0) {
  if (d < 1 || n < 0) throw InvalidInput("signal dimensions must be d >= 1, n >= 0");
}

MultiSignal::MultiSignal(int d, Index n, std::vector<double> samples)
    : d_(d), n_(n), data_(std::move(samples)) {
  if (d < 1 || n < 0) throw InvalidInput("signal dimensions must be d >= 1, n >= 0");
  if (data_.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(n)) {
    throw InvalidInput("signal expects d*n = " + std::to_string(static_cast<std::size_t>(d) * n) +
                       " values, got " + std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidInput("non-finite signal value at index " + std::to_string(i));
    }
  }
}

double MultiSignal::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

ActivationSet ActivationSet::from_entries(int k, Index n, std::vector<Activation> entries) {
  if (k < 1 || n < 0) throw InvalidInput("activation set needs k >= 1 and n >= 0");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& a = entries[i];
    if (a.neuron < 0 || a.neuron >= k) {
      throw InvalidInput("entry " + std::to_string(i) + ": neuron " + std::to_string(a.neuron) +
                         " outside [0, " + std::to_string(k) + ")");
    }
    if (a.sample < 0 || a.sample >= n) {
      throw InvalidInput("entry " + std::to_string(i) + ": sample " + std::to_string(a.sample) +
                         " outside [0, " + std::to_string(n) + ")");
    }
    if (!std::isfinite(a.amplitude) || a.amplitude == 0.0) {
      throw InvalidInput("entry " + std::to_string(i) + ": amplitude must be finite and nonzero");
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Activation& a, const Activation& b) {
    return a.sample != b.sample ? a.sample < b.sample : a.neuron < b.neuron;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].sample == entries[i - 1].sample && entries[i].neuron == entries[i - 1].neuron) {
      throw InvalidInput("duplicate activation (neuron " + std::to_string(entries[i].neuron) +
                         ", sample " + std::to_string(entries[i].sample) + ")");
    }
  }
  ActivationSet set(k, n);
  set.entries_ = std::move(entries);
  return set;
}

double ActivationSet::l1_norm() const {
  double s = 0.0;
  for (const auto& a : entries_) s += std::abs(a.amplitude);
  return s;
}

std::size_t ActivationSet::count_for(int neuron) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [neuron](const Activation& a) { return a.neuron == neuron; }));
}

}  // namespace spikelasso

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

#include "spikelasso/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "spikelasso/simd/kernels.hpp"

namespace spikelasso {
namespace {

constexpr int kPowerIterations = 100;
constexpr double kPowerTolerance = 1e-7;
constexpr double kSafetyConverged = 1.02;
constexpr double kSafetyFallback = 1.5;
constexpr std::uint64_t kPowerSeed = 0x5eed'1a55'0f00'0001ULL;

void require_same_electrodes(const ShapeBank& shapes, const MultiSignal& x) {
  if (shapes.electrodes() != x.electrodes()) {
    throw InvalidInput("electrode count mismatch: shapes have d=" +
                       std::to_string(shapes.electrodes()) + ", signal has d=" +
                       std::to_string(x.electrodes()));
  }
}

// sum_l w[l] * x[j + l] with x zero past n.
double truncated_correlation(std::span<const double> w, std::span<const double> x, Index j) {
  const Index taps = std::min<Index>(static_cast<Index>(w.size()), static_cast<Index>(x.size()) - j);
  double acc = 0.0;
  for (Index l = 0; l < taps; ++l) acc += w[l] * x[j + l];
  return acc;
}

double row_sum_bound(const ShapeBank& shapes) {
  const int k = shapes.neurons();
  const int d = shapes.electrodes();
  const int t = shapes.length();
  double best = 0.0;
  for (int r1 = 0; r1 < k; ++r1) {
    double row = 0.0;
    for (int r2 = 0; r2 < k; ++r2) {
      for (int lag = -(t - 1); lag <= t - 1; ++lag) {
        for (int p = 0; p < d; ++p) {
          const auto w1 = shapes.waveform(r1, p);
          const auto w2 = shapes.waveform(r2, p);
          for (int l = std::max(0, -lag); l < t && l + lag < t; ++l) {
            row += std::abs(w1[l] * w2[l + lag]);
          }
        }
      }
    }
    best = std::max(best, row);
  }
  return best;
}

}  // namespace

CorrelationMap::CorrelationMap(int k, SampleRange window)
    : k_(k), window_(window), values_(static_cast<std::size_t>(k) * window.size(), 0.0) {}

MultiSignal forward(const ShapeBank& shapes, const ActivationSet& acts, Index n) {
  if (acts.neurons() != shapes.neurons()) {
    throw InvalidInput("neuron count mismatch: shapes have k=" + std::to_string(shapes.neurons()) +
                       ", activations have k=" + std::to_string(acts.neurons()));
  }
  if (n < shapes.length()) {
    throw InvalidInput("signal length " + std::to_string(n) + " shorter than shape length " +
                       std::to_string(shapes.length()));
  }
  MultiSignal out(shapes.electrodes(), n);
  for (const auto& a : acts.entries()) {
    if (a.sample < 0 || a.sample > n - shapes.length()) {
      throw InvalidInput("activation at sample " + std::to_string(a.sample) +
                         " does not fit a length-" + std::to_string(shapes.length()) +
                         " shape in n=" + std::to_string(n));
    }
    add_column(out, shapes, a.neuron, a.sample, a.amplitude);
  }
  return out;
}

MultiSignal apply_dictionary(const ShapeBank& shapes, const ActivationSet& acts, Index n) {
  if (acts.neurons() != shapes.neurons()) {
    throw InvalidInput("neuron count mismatch: shapes have k=" + std::to_string(shapes.neurons()) +
                       ", activations have k=" + std::to_string(acts.neurons()));
  }
  MultiSignal out(shapes.electrodes(), n);
  for (const auto& a : acts.entries()) {
    if (a.sample < 0 || a.sample >= n) {
      throw InvalidInput("activation at sample " + std::to_string(a.sample) + " outside [0, " +
                         std::to_string(n) + ")");
    }
    add_column(out, shapes, a.neuron, a.sample, a.amplitude);
  }
  return out;
}

void add_column(MultiSignal& signal, const ShapeBank& shapes, int r, Index j, double amplitude) {
  const auto& kernels = simd::active();
  const Index n = signal.length();
  const auto taps = static_cast<std::size_t>(std::min<Index>(shapes.length(), n - j));
  for (int p = 0; p < shapes.electrodes(); ++p) {
    kernels.axpy(signal.row(p).data() + j, amplitude, shapes.waveform(r, p).data(), taps);
  }
}

CorrelationMap correlate(const ShapeBank& shapes, const MultiSignal& x, SampleRange window) {
  require_same_electrodes(shapes, x);
  const Index n = x.length();
  if (window.empty()) throw InvalidInput("correlation window is empty");
  if (window.begin < 0 || window.end > n) {
    throw InvalidInput("correlation window [" + std::to_string(window.begin) + ", " +
                       std::to_string(window.end) + ") outside [0, " + std::to_string(n) + ")");
  }
  const auto& kernels = simd::active();
  const int t = shapes.length();
  CorrelationMap out(shapes.neurons(), window);
  // Samples below `interior_end` see a full length-t window of x.
  const Index interior_end = std::clamp<Index>(n - t + 1, window.begin, window.end);
  const auto interior = static_cast<std::size_t>(interior_end - window.begin);
  for (int r = 0; r < shapes.neurons(); ++r) {
    auto row = out.row(r);
    for (int p = 0; p < shapes.electrodes(); ++p) {
      const auto w = shapes.waveform(r, p);
      const auto xs = x.row(p);
      if (interior > 0) kernels.correlate(row.data(), w.data(), t, xs.data() + window.begin, interior);
      for (Index j = interior_end; j < window.end; ++j) {
        row[j - window.begin] += truncated_correlation(w, xs, j);
      }
    }
  }
  return out;
}

double column_correlation(const ShapeBank& shapes, const MultiSignal& x, int r, Index j) {
  const auto& kernels = simd::active();
  const auto taps = static_cast<std::size_t>(std::min<Index>(shapes.length(), x.length() - j));
  double acc = 0.0;
  for (int p = 0; p < shapes.electrodes(); ++p) {
    acc += kernels.dot(shapes.waveform(r, p).data(), x.row(p).data() + j, taps);
  }
  return acc;
}

double gram_entry(const ShapeBank& shapes, Index n, int r1, Index j1, int r2, Index j2) {
  const int t = shapes.length();
  if (std::abs(j1 - j2) >= t) return 0.0;
  const Index start = std::max(j1, j2);
  const Index stop = std::min<Index>(std::min(j1, j2) + t, n);
  if (stop <= start) return 0.0;
  const auto& kernels = simd::active();
  const auto len = static_cast<std::size_t>(stop - start);
  double acc = 0.0;
  for (int p = 0; p < shapes.electrodes(); ++p) {
    acc += kernels.dot(shapes.waveform(r1, p).data() + (start - j1),
                       shapes.waveform(r2, p).data() + (start - j2), len);
  }
  return acc;
}

double lambda_max(const ShapeBank& shapes, const MultiSignal& y) {
  if (y.length() == 0) throw InvalidInput("lambda_max needs a nonempty signal");
  const auto corr = correlate(shapes, y, {0, y.length()});
  double best = 0.0;
  for (double v : corr.values()) best = std::max(best, std::abs(v));
  return best;
}

double lipschitz_bound(const ShapeBank& shapes, Index n) {
  if (n < shapes.length()) {
    throw InvalidInput("lipschitz_bound needs n >= t (n=" + std::to_string(n) + ")");
  }
  const std::size_t dim = static_cast<std::size_t>(shapes.neurons()) * static_cast<std::size_t>(n);
  std::vector<double> v(dim);
  std::vector<double> hv(dim);
  std::mt19937_64 rng(kPowerSeed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (auto& x : v) x = uniform(rng);

  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    const double norm = std::sqrt(s);
    if (norm > 0.0) {
      for (auto& e : x) e /= norm;
    }
    return norm;
  };
  normalize(v);

  MultiSignal image(shapes.electrodes(), n);
  double estimate = 0.0;
  bool converged = false;
  for (int it = 0; it < kPowerIterations; ++it) {
    forward_dense(shapes, v, image);
    correlate_dense(shapes, image, hv);
    const double next = normalize(hv);
    std::swap(v, hv);
    if (next == 0.0) break;
    if (it > 0 && std::abs(next - estimate) <= kPowerTolerance * next) {
      estimate = next;
      converged = true;
      break;
    }
    estimate = next;
  }
  const double scaled = estimate * (converged ? kSafetyConverged : kSafetyFallback);
  return std::min(scaled, row_sum_bound(shapes));
}

void forward_dense(const ShapeBank& shapes, std::span<const double> coeffs, MultiSignal& out) {
  const Index n = out.length();
  if (coeffs.size() != static_cast<std::size_t>(shapes.neurons()) * static_cast<std::size_t>(n)) {
    throw InvalidInput("forward_dense: coefficient vector has wrong length");
  }
  require_same_electrodes(shapes, out);
  const auto& kernels = simd::active();
  std::fill(out.data().begin(), out.data().end(), 0.0);
  for (int r = 0; r < shapes.neurons(); ++r) {
    const double* a = coeffs.data() + static_cast<std::size_t>(r) * n;
    for (int p = 0; p < shapes.electrodes(); ++p) {
      kernels.convolve(out.row(p).data(), shapes.waveform(r, p).data(), shapes.length(), a,
                       static_cast<std::size_t>(n));
    }
  }
}

void correlate_dense(const ShapeBank& shapes, const MultiSignal& x, std::span<double> out) {
  const Index n = x.length();
  if (out.size() != static_cast<std::size_t>(shapes.neurons()) * static_cast<std::size_t>(n)) {
    throw InvalidInput("correlate_dense: output vector has wrong length");
  }
  const auto corr = correlate(shapes, x, {0, n});
  std::copy(corr.values().begin(), corr.values().end(), out.begin());
}

}  // namespace spikelasso

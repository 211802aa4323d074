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

#include "spikelasso/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "spikelasso/dictionary.hpp"

namespace spikelasso {
namespace {

constexpr std::uint64_t kPoissonStream = 0x5011'55e5;
constexpr std::uint64_t kShapeStream = 0x5a4e'0001;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gaussian_lobe(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

ActivationSet poisson_activations(const PoissonSpec& spec) {
  const int k = static_cast<int>(spec.mu.size());
  if (k < 1) throw InvalidInput("PoissonSpec needs at least one neuron");
  if (spec.n < 1) throw InvalidInput("PoissonSpec needs n >= 1");
  if (spec.t < 1 || spec.t > spec.n) throw InvalidInput("PoissonSpec needs 1 <= t <= n");
  std::vector<Activation> entries;
  const Index last_onset = spec.n - spec.t;
  for (int r = 0; r < k; ++r) {
    const double mu = spec.mu[static_cast<std::size_t>(r)];
    if (!(mu >= 0.0) || !(mu < 1.0)) {
      throw InvalidInput("intensity of neuron " + std::to_string(r) + " must lie in [0, 1)");
    }
    if (mu == 0.0) continue;
    std::mt19937_64 rng(derive_seed(spec.seed, kPoissonStream, static_cast<std::uint64_t>(r)));
    std::geometric_distribution<Index> gap(mu);
    std::uniform_real_distribution<double> amplitude(0.8, 1.2);
    Index j = -1;
    while (true) {
      j += 1 + gap(rng);
      if (j > last_onset) break;
      entries.push_back({r, j, spec.jitter ? amplitude(rng) : 1.0});
    }
  }
  return ActivationSet::from_entries(k, spec.n, std::move(entries));
}

ShapeParams ShapeParams::random(int k, int d, int t, std::uint64_t seed) {
  if (k < 1 || d < 1 || t < 1) throw InvalidInput("shape parameters need k, d, t >= 1");
  ShapeParams params;
  params.k = k;
  params.d = d;
  params.t = t;
  params.neurons.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    std::mt19937_64 rng(derive_seed(seed, kShapeStream, static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NeuronShape shape;
    shape.depolarization_width = std::max(0.5, (0.04 + 0.03 * u(rng)) * t);
    shape.hyperpolarization_width = std::max(0.75, (0.10 + 0.08 * u(rng)) * t);
    shape.hyperpolarization_mass = 0.5 + 0.4 * u(rng);
    // Neurons sit next to electrode r mod d; gain decays with distance.
    const double position = (r % d) + 0.6 * (u(rng) - 0.5);
    shape.attenuation.resize(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p) {
      const double z = (p - position) / 0.7;
      shape.attenuation[static_cast<std::size_t>(p)] = 1.0 / (1.0 + z * z);
    }
    params.neurons.push_back(std::move(shape));
  }
  return params;
}

ShapeBank synth_shapes(const ShapeParams& params) {
  const int k = params.k;
  const int d = params.d;
  const int t = params.t;
  if (k < 1 || d < 1 || t < 1) throw InvalidInput("shape parameters need k, d, t >= 1");
  if (params.neurons.size() != static_cast<std::size_t>(k)) {
    throw InvalidInput("expected parameters for " + std::to_string(k) + " neurons");
  }
  std::vector<double> data(static_cast<std::size_t>(k) * d * t, 0.0);
  const double positive_center = 0.3 * (t - 1);
  const double negative_center = 0.6 * (t - 1);
  for (int r = 0; r < k; ++r) {
    const auto& nrn = params.neurons[static_cast<std::size_t>(r)];
    if (!(nrn.depolarization_width > 0.0) || !(nrn.hyperpolarization_width > 0.0) ||
        !(nrn.hyperpolarization_mass >= 0.0) || nrn.amplitude == 0.0 || !std::isfinite(nrn.amplitude)) {
      throw InvalidInput("degenerate waveform parameters for neuron " + std::to_string(r));
    }
    if (nrn.attenuation.size() != static_cast<std::size_t>(d)) {
      throw InvalidInput("attenuation of neuron " + std::to_string(r) + " needs " + std::to_string(d) + " gains");
    }
    std::vector<double> base(static_cast<std::size_t>(t));
    for (int l = 0; l < t; ++l) {
      base[static_cast<std::size_t>(l)] =
          nrn.amplitude * (gaussian_lobe(l, positive_center, nrn.depolarization_width) -
                           nrn.hyperpolarization_mass *
                               gaussian_lobe(l, negative_center, nrn.hyperpolarization_width));
    }
    double peak = 0.0;
    for (int p = 0; p < d; ++p) {
      double e = 0.0;
      for (double v : base) e += v * v;
      peak = std::max(peak, std::abs(nrn.attenuation[static_cast<std::size_t>(p)]) * std::sqrt(e));
    }
    if (!(peak > 0.0) || !std::isfinite(peak)) {
      throw InvalidInput("waveform parameters of neuron " + std::to_string(r) + " produce an all-zero shape");
    }
    for (int p = 0; p < d; ++p) {
      const double gain = nrn.attenuation[static_cast<std::size_t>(p)] / peak;
      for (int l = 0; l < t; ++l) {
        data[(static_cast<std::size_t>(r) * d + p) * t + l] = gain * base[static_cast<std::size_t>(l)];
      }
    }
  }
  return ShapeBank(k, d, t, std::move(data));
}

double noise_sigma(double truth_energy, int d, Index n, double snr_db) {
  if (!(truth_energy > 0.0)) throw InvalidInput("an SNR needs a clean signal with nonzero energy");
  if (!std::isfinite(snr_db)) throw InvalidInput("snr_db must be finite");
  return std::sqrt(truth_energy / (static_cast<double>(d) * static_cast<double>(n) * std::pow(10.0, snr_db / 10.0)));
}

MultiSignal add_noise(const MultiSignal& signal, double truth_energy, const NoiseSpec& spec) {
  if (!spec.snr_db) return signal;
  const double sigma = noise_sigma(truth_energy, signal.electrodes(), signal.length(), *spec.snr_db);
  MultiSignal out = signal;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& v : out.data()) v += noise(rng);
  return out;
}

Dataset simulate_dataset(const DatasetSpec& spec) {
  if (!(spec.sample_rate_hz > 0.0) || !(spec.rate_hz >= 0.0)) {
    throw InvalidInput("rates must be nonnegative and the sample rate positive");
  }
  Dataset ds;
  ds.shapes = synth_shapes(ShapeParams::random(spec.k, spec.d, spec.t, spec.shape_seed));
  PoissonSpec poisson;
  poisson.mu.assign(static_cast<std::size_t>(spec.k), spec.rate_hz / spec.sample_rate_hz);
  poisson.n = spec.n;
  poisson.t = spec.t;
  poisson.seed = spec.activation_seed;
  poisson.jitter = spec.jitter;
  ds.truth = poisson_activations(poisson);
  ds.clean = forward(ds.shapes, ds.truth, spec.n);
  ds.observed = add_noise(ds.clean, ds.clean.squared_norm(), {spec.snr_db, spec.noise_seed});
  return ds;
}

}  // namespace spikelasso

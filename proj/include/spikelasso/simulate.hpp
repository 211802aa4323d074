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

// Synthetic ground truth: Poisson activation trains, biphasic multi-electrode
// waveforms, rendered signals and calibrated Gaussian noise.

#include <cstdint>
#include <optional>
#include <vector>

#include "spikelasso/types.hpp"

namespace spikelasso {

/// Counter-based seed derivation: mixes a root seed with stream tags so each
/// (draw, neuron, ...) gets an independent generator regardless of call order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct PoissonSpec {
  /// Per-neuron intensity in events per sample, each in [0, 1).
  std::vector<double> mu;
  Index n = 0;
  /// Shape length; onsets are drawn on [0, n - t] so every shape fits.
  int t = 1;
  std::uint64_t seed = 0;
  /// Amplitudes uniform in [0.8, 1.2] when true, exactly 1 otherwise.
  bool jitter = true;
};

/// Per-sample Bernoulli(mu_r) activations for each neuron on its own stream.
/// Gaps are drawn geometrically, which has the same law as per-sample draws
/// at O(events) cost.
ActivationSet poisson_activations(const PoissonSpec& spec);

struct NeuronShape {
  double amplitude = 1.0;
  /// Gaussian widths (standard deviations, samples) of the positive and negative lobes.
  double depolarization_width = 2.0;
  double hyperpolarization_width = 4.0;
  /// Mass of the negative lobe relative to the positive one; 1 gives a zero-mean waveform.
  double hyperpolarization_mass = 1.0;
  /// Per-electrode gain, length d.
  std::vector<double> attenuation;
};

struct ShapeParams {
  int k = 1;
  int d = 1;
  int t = 30;
  std::vector<NeuronShape> neurons;

  /// Distinct per-neuron widths, masses and electrode positions drawn from `seed`.
  static ShapeParams random(int k, int d, int t, std::uint64_t seed);
};

/// Each waveform is a positive lobe followed by a negative lobe, scaled per
/// electrode, then normalized so that max_p ||W_r[p]||_2 = 1.
ShapeBank synth_shapes(const ShapeParams& params);

struct NoiseSpec {
  /// 10 log10(||Ha||^2 / (d n sigma^2)); none means noiseless.
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

/// Noise standard deviation realizing `snr_db` for a clean signal of the given energy.
double noise_sigma(double truth_energy, int d, Index n, double snr_db);

MultiSignal add_noise(const MultiSignal& signal, double truth_energy, const NoiseSpec& spec);

/// Convenience bundle used by the CLI, the sweep and the benchmarks.
struct Dataset {
  ShapeBank shapes;
  ActivationSet truth;
  MultiSignal clean;
  MultiSignal observed;
};

struct DatasetSpec {
  int k = 5;
  int d = 4;
  int t = 60;
  Index n = 10000;
  double rate_hz = 10.0;
  double sample_rate_hz = 30000.0;
  std::optional<double> snr_db;
  bool jitter = true;
  std::uint64_t shape_seed = 1;
  std::uint64_t activation_seed = 2;
  std::uint64_t noise_seed = 3;
};

Dataset simulate_dataset(const DatasetSpec& spec);

}  // namespace spikelasso

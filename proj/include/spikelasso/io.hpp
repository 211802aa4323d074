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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spikelasso/types.hpp"

namespace spikelasso::io {

inline constexpr int kFormatVersion = 1;

/// Malformed or unreadable file. The message names the offending position.
class FormatError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Binary arrays: one line of JSON header terminated by '\n', then the
// payload as little-endian float64 in row-major order.

struct ShapeFile {
  ShapeBank shapes;
  double sample_rate_hz = 0.0;
};

void write_shapes(const std::filesystem::path& path, const ShapeBank& shapes, double sample_rate_hz = 0.0);
ShapeFile read_shape_file(const std::filesystem::path& path);
inline ShapeBank read_shapes(const std::filesystem::path& path) { return read_shape_file(path).shapes; }

struct SignalFile {
  MultiSignal signal;
  double sample_rate_hz = 0.0;
};

void write_signal(const std::filesystem::path& path, const MultiSignal& signal, double sample_rate_hz);
SignalFile read_signal(const std::filesystem::path& path);

/// CSV with a `# activations k=<k> n=<n>` line, then `neuron,sample,amplitude`.
/// Amplitudes use the shortest representation that reads back exactly.
void write_activations(const std::filesystem::path& path, const ActivationSet& acts);
std::string format_activations(const ActivationSet& acts);
/// `k` and `n` override the values stored in the file when given.
ActivationSet read_activations(const std::filesystem::path& path, std::optional<int> k = std::nullopt,
                               std::optional<Index> n = std::nullopt);
ActivationSet parse_activations(const std::string& text, std::optional<int> k = std::nullopt,
                                std::optional<Index> n = std::nullopt);

std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct Artifact {
  std::string path;
  std::string sha256;
  /// Byte-identical across reruns of the same command.
  bool deterministic = true;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  /// Working directory the command ran in; relative paths resolve against it.
  std::string cwd;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  std::vector<Artifact> inputs;
  std::vector<Artifact> outputs;
  double wall_seconds = 0.0;
  std::string version;
  std::string kernels;
  /// Result fields that vary between runs (timings, counters).
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

Artifact hash_artifact(const std::filesystem::path& path, bool deterministic = true);

}  // namespace spikelasso::io

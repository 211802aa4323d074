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

#include "spikelasso/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spikelasso::io {
namespace {

static_assert(std::endian::native == std::endian::little, "payload I/O assumes a little-endian host");

constexpr const char* kShapesFormat = "spikelasso-shapes";
constexpr const char* kSignalFormat = "spikelasso-signal";

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string encode_array(const nlohmann::json& header, std::span<const double> values) {
  std::string out = header.dump();
  out.push_back('\n');
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(double));
  std::memcpy(out.data() + offset, values.data(), values.size() * sizeof(double));
  return out;
}

struct Decoded {
  nlohmann::json header;
  std::vector<double> values;
};

std::int64_t header_dim(const nlohmann::json& header, const char* key, const std::string& where) {
  if (!header.contains(key) || !header[key].is_number_integer()) {
    throw FormatError(where + ": header field '" + key + "' missing or not an integer");
  }
  const auto v = header[key].get<std::int64_t>();
  if (v < 1) throw FormatError(where + ": header field '" + key + "' must be >= 1");
  return v;
}

Decoded decode_array(const std::string& bytes, const char* format, const std::vector<const char*>& dims,
                     const std::string& where) {
  const auto eol = bytes.find('\n');
  if (eol == std::string::npos) throw FormatError(where + ": missing header line at byte 0");
  Decoded out;
  try {
    out.header = nlohmann::json::parse(bytes.substr(0, eol));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(where + ": malformed header at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!out.header.is_object() || out.header.value("format", "") != format) {
    throw FormatError(where + ": expected format '" + std::string(format) + "' at byte 0");
  }
  if (!out.header.contains("version") || out.header["version"] != kFormatVersion) {
    throw FormatError(where + ": unsupported version " + out.header.value("version", nlohmann::json()).dump() +
                      ", expected " + std::to_string(kFormatVersion));
  }
  std::size_t count = 1;
  for (const char* key : dims) {
    const auto v = static_cast<std::size_t>(header_dim(out.header, key, where));
    if (count > (std::size_t{1} << 60) / v) throw FormatError(where + ": header dimensions overflow");
    count *= v;
  }
  const std::size_t offset = eol + 1;
  const std::size_t expected = offset + count * sizeof(double);
  if (bytes.size() < expected) {
    throw FormatError(where + ": truncated payload, header needs " + std::to_string(count) +
                      " values but data ends at byte " + std::to_string(bytes.size()) + " (expected " +
                      std::to_string(expected) + ")");
  }
  if (bytes.size() > expected) {
    throw FormatError(where + ": trailing bytes after payload at byte " + std::to_string(expected));
  }
  out.values.resize(count);
  std::memcpy(out.values.data(), bytes.data() + offset, count * sizeof(double));
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(out.values[i])) {
      throw FormatError(where + ": non-finite value at byte " + std::to_string(offset + i * sizeof(double)));
    }
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

template <class T>
T parse_number(const std::string& field, const std::string& what, std::size_t row) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw FormatError("row " + std::to_string(row) + ": cannot parse " + what + " '" + field + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf.data(), ptr);
}

void write_shapes(const std::filesystem::path& path, const ShapeBank& shapes, double sample_rate_hz) {
  const nlohmann::json header = {{"format", kShapesFormat},
                                 {"version", kFormatVersion},
                                 {"k", shapes.neurons()},
                                 {"d", shapes.electrodes()},
                                 {"t", shapes.length()},
                                 {"sample_rate_hz", sample_rate_hz}};
  write_bytes(path, encode_array(header, shapes.data()));
}

ShapeFile read_shape_file(const std::filesystem::path& path) {
  auto decoded = decode_array(read_bytes(path), kShapesFormat, {"k", "d", "t"}, path.string());
  const auto& h = decoded.header;
  ShapeFile out;
  out.sample_rate_hz = h.value("sample_rate_hz", 0.0);
  try {
    out.shapes = ShapeBank(h["k"].get<int>(), h["d"].get<int>(), h["t"].get<int>(), std::move(decoded.values));
  } catch (const FormatError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

void write_signal(const std::filesystem::path& path, const MultiSignal& signal, double sample_rate_hz) {
  const nlohmann::json header = {{"format", kSignalFormat},
                                 {"version", kFormatVersion},
                                 {"d", signal.electrodes()},
                                 {"n", signal.length()},
                                 {"sample_rate_hz", sample_rate_hz}};
  write_bytes(path, encode_array(header, signal.data()));
}

SignalFile read_signal(const std::filesystem::path& path) {
  auto decoded = decode_array(read_bytes(path), kSignalFormat, {"d", "n"}, path.string());
  const auto& h = decoded.header;
  SignalFile out;
  out.sample_rate_hz = h.value("sample_rate_hz", 0.0);
  out.signal = MultiSignal(h["d"].get<int>(), h["n"].get<Index>(), std::move(decoded.values));
  return out;
}

std::string format_activations(const ActivationSet& acts) {
  std::string out = "# activations k=" + std::to_string(acts.neurons()) + " n=" + std::to_string(acts.length()) +
                    "\nneuron,sample,amplitude\n";
  for (const auto& a : acts.entries()) {
    out += std::to_string(a.neuron);
    out += ',';
    out += std::to_string(a.sample);
    out += ',';
    out += format_double(a.amplitude);
    out += '\n';
  }
  return out;
}

void write_activations(const std::filesystem::path& path, const ActivationSet& acts) {
  write_bytes(path, format_activations(acts));
}

ActivationSet parse_activations(const std::string& text, std::optional<int> k, std::optional<Index> n) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::optional<int> file_k;
  std::optional<Index> file_n;
  std::vector<Activation> entries;
  while (std::getline(in, line)) {
    ++row;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      std::istringstream meta(s.substr(1));
      std::string token;
      while (meta >> token) {
        if (token.rfind("k=", 0) == 0) file_k = parse_number<int>(token.substr(2), "k", row);
        if (token.rfind("n=", 0) == 0) file_n = parse_number<Index>(token.substr(2), "n", row);
      }
      continue;
    }
    if (!header_seen) {
      if (s != "neuron,sample,amplitude") {
        throw FormatError("row " + std::to_string(row) + ": expected header 'neuron,sample,amplitude'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw FormatError("row " + std::to_string(row) + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    const double amp = parse_number<double>(fields[2], "amplitude", row);
    if (!std::isfinite(amp)) throw FormatError("row " + std::to_string(row) + ": non-finite amplitude");
    entries.push_back({parse_number<int>(fields[0], "neuron", row), parse_number<Index>(fields[1], "sample", row), amp});
  }
  if (!header_seen) throw FormatError("row " + std::to_string(row + 1) + ": missing header 'neuron,sample,amplitude'");
  const int kk = k ? *k : file_k.value_or(0);
  const Index nn = n ? *n : file_n.value_or(0);
  if (kk < 1 || nn < 1) throw FormatError("activation file does not state k and n; pass them explicitly");

  // Duplicates are reported with the data row where they reappear.
  std::vector<std::pair<Coordinate, std::size_t>> seen;
  seen.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) seen.push_back({{entries[i].neuron, entries[i].sample}, i});
  std::stable_sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i].first == seen[i - 1].first) {
      const auto later = std::max(seen[i].second, seen[i - 1].second);
      throw FormatError("data row " + std::to_string(later + 1) + ": duplicate activation (neuron " +
                        std::to_string(seen[i].first.neuron) + ", sample " + std::to_string(seen[i].first.sample) +
                        ")");
    }
  }
  try {
    return ActivationSet::from_entries(kk, nn, std::move(entries));
  } catch (const FormatError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw FormatError(e.what());
  }
}

ActivationSet read_activations(const std::filesystem::path& path, std::optional<int> k, std::optional<Index> n) {
  try {
    return parse_activations(read_bytes(path), k, n);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) { write_bytes(path, text); }

std::string read_text(const std::filesystem::path& path) { return read_bytes(path); }

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_bytes(path, value.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_bytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_bytes(path)); }

Artifact hash_artifact(const std::filesystem::path& path, bool deterministic) {
  return {path.string(), sha256_file(path), deterministic};
}

nlohmann::json RunManifest::to_json() const {
  auto artifacts = [](const std::vector<Artifact>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : list) arr.push_back({{"path", a.path}, {"sha256", a.sha256}, {"deterministic", a.deterministic}});
    return arr;
  };
  return {{"format", "spikelasso-manifest"},
          {"version", kFormatVersion},
          {"command", command},
          {"argv", argv},
          {"cwd", cwd},
          {"parameters", parameters},
          {"seeds", seeds},
          {"inputs", artifacts(inputs)},
          {"outputs", artifacts(outputs)},
          {"wall_seconds", wall_seconds},
          {"tool_version", version},
          {"kernels", kernels},
          {"summary", summary}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "spikelasso-manifest") throw FormatError("not a run manifest");
  if (j.value("version", 0) != kFormatVersion) {
    throw FormatError("unsupported manifest version " + j.value("version", nlohmann::json()).dump());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.cwd = j.value("cwd", "");
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.seeds = j.value("seeds", nlohmann::json::object());
    auto artifacts = [](const nlohmann::json& arr) {
      std::vector<Artifact> out;
      for (const auto& a : arr) {
        out.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(), a.value("deterministic", true)});
      }
      return out;
    };
    m.inputs = artifacts(j.value("inputs", nlohmann::json::array()));
    m.outputs = artifacts(j.value("outputs", nlohmann::json::array()));
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.version = j.value("tool_version", "");
    m.kernels = j.value("kernels", "");
    m.summary = j.value("summary", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace spikelasso::io

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
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "spikelasso/io.hpp"
#include "test_support.hpp"

namespace spikelasso {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spikelasso_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::string message_of(const std::function<void()>& f) {
    try {
      f();
    } catch (const io::FormatError& e) {
      return e.what();
    }
    return "";
  }

  fs::path dir_;
};

TEST_F(IoTest, DatasetRoundTripIsBitExact) {
  const auto ds = testing::small_dataset(3, 3, 4, 30, 2000, 50.0, 10000.0, 5.0);
  io::write_shapes(path("s.bin"), ds.shapes, 10000.0);
  io::write_signal(path("y.bin"), ds.observed, 10000.0);
  io::write_activations(path("a.csv"), ds.truth);

  const auto shapes = io::read_shape_file(path("s.bin"));
  EXPECT_EQ(shapes.sample_rate_hz, 10000.0);
  ASSERT_EQ(shapes.shapes.neurons(), 3);
  EXPECT_TRUE(std::equal(ds.shapes.data().begin(), ds.shapes.data().end(), shapes.shapes.data().begin()));
  EXPECT_EQ(io::read_signal(path("y.bin")).signal, ds.observed);
  EXPECT_EQ(io::read_activations(path("a.csv")), ds.truth);
}

TEST_F(IoTest, AmplitudesRoundTripExactly) {
  testing::Gen g(9);
  std::vector<Activation> e;
  for (int i = 0; i < 200; ++i) e.push_back({0, i, g.normal() * std::pow(10.0, g.integer(-300, 300))});
  e.push_back({0, 200, std::numeric_limits<double>::denorm_min()});
  e.push_back({0, 201, -std::numeric_limits<double>::max()});
  const auto a = ActivationSet::from_entries(1, 300, e);
  EXPECT_EQ(io::parse_activations(io::format_activations(a)), a);
}

TEST_F(IoTest, TruncatedPayloadNamesOffset) {
  io::write_signal(path("y.bin"), MultiSignal(2, 10), 1.0);
  const auto full = io::read_text(path("y.bin"));
  io::write_text(path("cut.bin"), full.substr(0, full.size() - 12));
  const auto msg = message_of([&] { io::read_signal(path("cut.bin")); });
  EXPECT_NE(msg.find("truncated"), std::string::npos) << msg;
  EXPECT_NE(msg.find("byte"), std::string::npos) << msg;
}

TEST_F(IoTest, HeaderLargerThanPayload) {
  io::write_text(path("y.bin"), R"({"d":2,"format":"spikelasso-signal","n":100,"sample_rate_hz":1.0,"version":1})"
                                "\n" + std::string(16, '\0'));
  const auto msg = message_of([&] { io::read_signal(path("y.bin")); });
  EXPECT_NE(msg.find("byte"), std::string::npos) << msg;
}

TEST_F(IoTest, TrailingBytesRejected) {
  io::write_signal(path("y.bin"), MultiSignal(1, 4), 1.0);
  io::write_text(path("z.bin"), io::read_text(path("y.bin")) + "x");
  EXPECT_NE(message_of([&] { io::read_signal(path("z.bin")); }).find("trailing"), std::string::npos);
}

TEST_F(IoTest, NanPayloadRejectedWithOffset) {
  io::write_signal(path("y.bin"), MultiSignal(1, 4), 1.0);
  auto bytes = io::read_text(path("y.bin"));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto header_end = bytes.find('\n') + 1;
  bytes.replace(header_end + 16, 8, reinterpret_cast<const char*>(&nan), 8);
  io::write_text(path("nan.bin"), bytes);
  const auto msg = message_of([&] { io::read_signal(path("nan.bin")); });
  EXPECT_NE(msg.find("non-finite"), std::string::npos) << msg;
  EXPECT_NE(msg.find("byte " + std::to_string(header_end + 16)), std::string::npos) << msg;
}

TEST_F(IoTest, VersionMismatchRejected) {
  io::write_text(path("y.bin"), R"({"d":1,"format":"spikelasso-signal","n":1,"sample_rate_hz":1.0,"version":2})"
                                "\n" + std::string(8, '\0'));
  EXPECT_NE(message_of([&] { io::read_signal(path("y.bin")); }).find("version"), std::string::npos);
}

TEST_F(IoTest, WrongFormatRejected) {
  io::write_shapes(path("s.bin"), testing::single_shape({1, 2, 1}));
  EXPECT_THROW(io::read_signal(path("s.bin")), io::FormatError);
  io::write_text(path("garbage.bin"), "not json\n");
  EXPECT_THROW(io::read_signal(path("garbage.bin")), io::FormatError);
  EXPECT_THROW(io::read_signal(path("missing.bin")), io::FormatError);
}

TEST_F(IoTest, DuplicateRowNamed) {
  const std::string csv = "# activations k=1 n=100\nneuron,sample,amplitude\n0,5,1\n0,7,1\n0,5,2\n";
  const auto msg = message_of([&] { io::parse_activations(csv); });
  EXPECT_NE(msg.find("data row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
}

TEST_F(IoTest, MalformedCsvRows) {
  EXPECT_NE(message_of([&] { io::parse_activations("# activations k=1 n=10\nneuron,sample,amplitude\n0,x,1\n"); })
                .find("row"),
            std::string::npos);
  EXPECT_THROW(io::parse_activations("neuron,sample,amplitude\n0,1,1\n"), io::FormatError);
  EXPECT_NO_THROW(io::parse_activations("neuron,sample,amplitude\n0,1,1\n", 1, 10));
  EXPECT_THROW(io::parse_activations("# activations k=1 n=10\nneuron,sample,amplitude\n0,10,1\n"), InvalidInput);
  EXPECT_THROW(io::parse_activations("# activations k=1 n=10\nneuron,sample,amplitude\n0,1\n"), io::FormatError);
}

TEST_F(IoTest, Sha256KnownVector) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::write_text(path("abc"), "abc");
  EXPECT_EQ(io::sha256_file(path("abc")), io::sha256_hex("abc"));
}

TEST_F(IoTest, ManifestRoundTrip) {
  io::RunManifest m;
  m.command = "solve";
  m.argv = {"solve", "--lambda", "rel:0.1"};
  m.cwd = dir_.string();
  m.parameters = {{"lambda", "rel:0.1"}};
  m.seeds = {{"root", 3}};
  io::write_text(path("in.txt"), "input");
  m.inputs.push_back(io::hash_artifact(path("in.txt")));
  m.outputs.push_back({"out.csv", io::sha256_hex("x"), false});
  m.wall_seconds = 1.5;
  m.version = "0.1.0";
  m.kernels = "scalar";
  m.summary = {{"iterations", 12}};
  const auto back = io::RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_EQ(back.inputs[0].sha256, io::sha256_hex("input"));
  EXPECT_FALSE(back.outputs[0].deterministic);
  EXPECT_THROW(io::RunManifest::from_json({{"format", "other"}}), io::FormatError);
}

TEST_F(IoTest, JsonRoundTrip) {
  nlohmann::json j = {{"a", 1.25}, {"b", {1, 2, 3}}};
  io::write_json(path("j.json"), j);
  EXPECT_EQ(io::read_json(path("j.json")), j);
  io::write_text(path("bad.json"), "{\"a\": ");
  EXPECT_THROW(io::read_json(path("bad.json")), io::FormatError);
}

}  // namespace
}  // namespace spikelasso

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

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "spikelasso/io.hpp"

namespace spikelasso {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spikelasso_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  void simulate(const std::string& prefix, const std::string& snr = "") {
    std::vector<std::string> args = {"--quiet", "simulate", "--k", "2", "--d", "2", "--t", "20", "--n", "3000",
                                     "--rate-hz", "40", "--sample-rate-hz", "10000", "--seed", "5", "--out", p(prefix)};
    if (!snr.empty()) {
      args.push_back("--snr-db");
      args.push_back(snr);
    }
    ASSERT_EQ(run(args), cli::kOk) << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, PipelineWritesOutputsAndManifests) {
  simulate("sim", "10");
  for (const char* suffix : {".shapes.bin", ".signal.bin", ".clean.bin", ".truth.csv", ".manifest.json"}) {
    EXPECT_TRUE(fs::exists(p(std::string("sim") + suffix))) << suffix;
  }
  ASSERT_EQ(run({"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal", p("sim.signal.bin"), "--out",
                 p("est.csv"), "--report", p("report.json")}),
            cli::kOk)
      << err_.str();
  EXPECT_TRUE(io::read_json(p("report.json")).at("certified").get<bool>());
  EXPECT_TRUE(fs::exists(p("est.csv.manifest.json")));

  ASSERT_EQ(run({"--json", "eval", "--truth", p("sim.truth.csv"), "--est", p("est.csv"), "--tol", "1", "--t", "20",
                 "--out", p("eval.json")}),
            cli::kOk)
      << err_.str();
  const auto scores = io::read_json(p("eval.json"));
  for (const char* key : {"precision", "recall", "f1", "cp"}) EXPECT_TRUE(scores.contains(key)) << key;
  EXPECT_GT(scores.at("f1").get<double>(), 0.5);

  ASSERT_EQ(run({"--quiet", "overlap-stats", "--acts", p("sim.truth.csv"), "--t", "20", "--out", p("ov.json")}),
            cli::kOk)
      << err_.str();
  const auto ov = io::read_json(p("ov.json"));
  EXPECT_TRUE(ov.contains("bound"));

  const auto manifest = io::RunManifest::from_json(io::read_json(p("est.csv.manifest.json")));
  EXPECT_EQ(manifest.command, "solve");
  EXPECT_EQ(manifest.inputs.size(), 2u);
  EXPECT_FALSE(manifest.version.empty());
}

TEST_F(CliTest, ReplayReproducesEveryCommand) {
  simulate("sim", "5");
  ASSERT_EQ(run({"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal", p("sim.signal.bin"), "--solver",
                 "as-group", "--out", p("est.csv")}),
            cli::kOk);
  ASSERT_EQ(run({"--quiet", "eval", "--truth", p("sim.truth.csv"), "--est", p("est.csv"), "--cp-width", "9", "--out",
                 p("eval.json")}),
            cli::kOk);
  ASSERT_EQ(run({"--quiet", "sweep", "--lambdas", "rel:0.1,rel:1.001", "--snrs", "inf,0", "--draws", "2", "--n", "300",
                 "--out", p("sweep.csv")}),
            cli::kOk)
      << err_.str();
  for (const char* m : {"sim.manifest.json", "est.csv.manifest.json", "eval.json.manifest.json",
                        "sweep.csv.manifest.json"}) {
    EXPECT_EQ(run({"replay", "--manifest", p(m)}), cli::kOk) << m << "\n" << out_.str() << err_.str();
  }
}

TEST_F(CliTest, ReplayDetectsChangedInput) {
  simulate("sim");
  ASSERT_EQ(run({"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal", p("sim.signal.bin"), "--out",
                 p("est.csv")}),
            cli::kOk);
  simulate("sim", "0");  // overwrites the signal
  EXPECT_EQ(run({"replay", "--manifest", p("est.csv.manifest.json")}), cli::kInvalidInput);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"solve", "--shapes", p("nope.bin"), "--signal", p("nope.bin"), "--out", p("x.csv")}),
            cli::kInvalidInput);
  EXPECT_EQ(run({"frobnicate"}), cli::kInvalidInput);
  EXPECT_EQ(run({"simulate", "--k", "0", "--out", p("z")}), cli::kInvalidInput);

  simulate("sim", "0");
  const std::vector<std::string> capped = {"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal",
                                           p("sim.signal.bin"), "--lambda", "rel:0.05", "--max-iterations", "2",
                                           "--out", p("capped.csv")};
  EXPECT_EQ(run(capped), cli::kUncertified);
  auto allowed = capped;
  allowed.insert(allowed.begin(), "--allow-uncertified");
  EXPECT_EQ(run(allowed), cli::kOk);

  EXPECT_EQ(run({"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal", p("sim.signal.bin"), "--solver",
                 "as-naive", "--lambda", "rel:0.01", "--time-limit", "1e-9", "--out", p("late.csv")}),
            cli::kTimeout);
  EXPECT_EQ(run({"eval", "--truth", p("sim.truth.csv"), "--est", p("sim.truth.csv"), "--out", p("e.json")}),
            cli::kInvalidInput);
  EXPECT_EQ(run({"eval", "--truth", p("sim.truth.csv"), "--est", p("sim.truth.csv"), "--cp-width", "4", "--out",
                 p("e.json")}),
            cli::kInvalidInput);
}

TEST_F(CliTest, LambdaAboveMaxGivesEmptySolution) {
  simulate("sim", "10");
  ASSERT_EQ(run({"--quiet", "solve", "--shapes", p("sim.shapes.bin"), "--signal", p("sim.signal.bin"), "--lambda",
                 "rel:1.001", "--out", p("empty.csv")}),
            cli::kOk);
  EXPECT_TRUE(io::read_activations(p("empty.csv")).empty());
}

TEST_F(CliTest, VersionAndKernels) {
  EXPECT_EQ(run({"--version"}), cli::kOk);
  EXPECT_FALSE(out_.str().empty());
  EXPECT_EQ(run({"--kernels", "scalar", "--quiet", "simulate", "--n", "500", "--t", "20", "--out", p("s")}), cli::kOk);
  EXPECT_EQ(io::RunManifest::from_json(io::read_json(p("s.manifest.json"))).kernels, "scalar");
  EXPECT_EQ(run({"--kernels", "sse9", "simulate", "--out", p("s")}), cli::kInvalidInput);
}

}  // namespace
}  // namespace spikelasso

/*
   Copyright 2026 The jdsde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <jdsde/commands.hpp>

namespace jdsde {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("jdsde_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  RunContext context(const std::string& sub, unsigned threads = 1) {
    RunContext ctx;
    ctx.config.resolutions = {4, 8, 16};
    ctx.config.n_ref = 128;
    ctx.config.n = 8;
    ctx.config.paths = 200;
    ctx.config.seed = 11;
    ctx.config.reference_bias_check = true;
    ctx.config.probe.resolutions = {1, 2, 4};
    ctx.config.probe.samples = 1000;
    ctx.config.probe.n_ref = 64;
    ctx.output_dir = root_ / sub;
    ctx.threads = threads;
    return ctx;
  }

  fs::path root_;
};

void expect_csv_shape(const fs::path& p, const std::string& header) {
  std::ifstream in(p);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first.rfind("# jdsde version=", 0), 0u) << p;
  EXPECT_NE(first.find("config_hash="), std::string::npos);
  EXPECT_EQ(second, header);
}

TEST_F(Commands, InspectTransformHasOriginRow) {
  std::ostringstream log;
  auto ctx = context("t");
  run("inspect-transform", ctx, log);
  const auto path = ctx.output_dir / "transform.csv";
  expect_csv_shape(path, "x,G,Gp,z,mu_t,sigma_t,rho_t");
  EXPECT_NE(slurp(path).find("\n0,0,1,0,0,1,1\n"), std::string::npos);
  EXPECT_NE(log.str().find("c=0.0833"), std::string::npos);
}

TEST_F(Commands, ConvergenceIsReproducibleAcrossRunsAndThreads) {
  std::ostringstream log;
  auto a = context("a", 1), b = context("b", 1), c = context("c", 4);
  run("convergence", a, log);
  run("convergence", b, log);
  run("convergence", c, log);
  const auto ref = slurp(a.output_dir / "convergence.csv");
  EXPECT_EQ(ref, slurp(b.output_dir / "convergence.csv"));
  EXPECT_EQ(ref, slurp(c.output_dir / "convergence.csv"));
  EXPECT_EQ(slurp(a.output_dir / "convergence_summary.json"),
            slurp(c.output_dir / "convergence_summary.json"));
  expect_csv_shape(a.output_dir / "convergence.csv", "n,error,stderr,error_2x_ref,bias_shift");
  const auto js = nlohmann::json::parse(slurp(a.output_dir / "convergence_summary.json"));
  EXPECT_EQ(js["scheme"], "ja-qmilstein");
  EXPECT_EQ(js["slope_ci"].size(), 2u);
}

TEST_F(Commands, SimulateAndNoiseDump) {
  std::ostringstream log;
  auto ctx = context("s", 2);
  ctx.config.paths = 5;
  ctx.dump_noise = true;
  run("simulate", ctx, log);
  const auto sim = ctx.output_dir / "simulate_ja-qmilstein_n8.csv";
  expect_csv_shape(sim, "path,X1,jumps");
  for (int p = 0; p < 5; ++p)
    expect_csv_shape(ctx.output_dir / "noise" / ("path_" + std::to_string(p) + ".csv"),
                     "t,dW,is_jump");
}

TEST_F(Commands, ProbeWritesTable) {
  std::ostringstream log;
  auto ctx = context("p");
  run("probe-lower-bound", ctx, log);
  expect_csv_shape(ctx.output_dir / "probe.csv", "n,residual,stderr,M,k");
}

TEST_F(Commands, RejectsUnknownCommandAndBadConfig) {
  std::ostringstream log;
  auto ctx = context("x");
  EXPECT_THROW(run("plot", ctx, log), ConfigurationError);
  ctx.config.lambda = 0.0;
  EXPECT_THROW(run("simulate", ctx, log), ConfigurationError);
}

}  // namespace
}  // namespace jdsde

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "season/io.hpp"

using season::Json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + SEASON_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("season_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const Json& j, const std::string& name = "config.json") {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  fs::path dir_;
};

Json identity_config(const fs::path& out) {
  return {{"experiment", "identity-discrete"},
          {"seed", 7},
          {"generator", "all"},
          {"distributions", {{"instances", 30}}},
          {"output_dir", out.string()}};
}

}  // namespace

TEST_F(Cli, IdentityExperimentWritesTermsWithHeader) {
  const auto out = dir_ / "out";
  const auto r = run_cli("run " + write_config(identity_config(out)).string());
  ASSERT_EQ(r.code, 0);
  const auto csv = slurp(out / "identity_terms.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance_id,d_H,D_fH,gain,residual");
  const auto summary = Json::parse(slurp(out / "identity_summary.json"));
  EXPECT_TRUE(summary["passed"].get<bool>());
  EXPECT_LE(summary["max_residual"].get<double>(), 1e-9);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  auto a = identity_config(dir_ / "a");
  auto b = identity_config(dir_ / "b");
  ASSERT_EQ(run_cli("run " + write_config(a, "a.json").string()).code, 0);
  ASSERT_EQ(run_cli("run " + write_config(b, "b.json").string()).code, 0);
  for (const auto* name : {"identity_terms.csv", "identity_summary.json"})
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;

  const std::string flags = "--seed 3 --n 50 --trials 5 --sign-draws 20";
  ASSERT_EQ(run_cli("bounds " + flags + " --output-dir " + (dir_ / "c").string()).code, 0);
  ASSERT_EQ(run_cli("bounds " + flags + " --output-dir " + (dir_ / "d").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "c" / "bound_report.json"), slurp(dir_ / "d" / "bound_report.json"));
}

TEST_F(Cli, OutputDirEnvironmentOverridesConfig) {
  const auto cfg = write_config(identity_config(dir_ / "from_config"));
  ASSERT_EQ(run_cli("run " + cfg.string(), "OUTPUT_DIR=" + (dir_ / "from_env").string()).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_env" / "identity_terms.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "from_config"));
}

TEST_F(Cli, ValidationErrorsExitTwo) {
  Json no_seed = identity_config(dir_ / "x");
  no_seed.erase("seed");
  EXPECT_EQ(run_cli("run " + write_config(no_seed).string()).code, 2);
  Json unknown = identity_config(dir_ / "x");
  unknown["experiment"] = "nope";
  EXPECT_EQ(run_cli("run " + write_config(unknown).string()).code, 2);
  Json bad_type = identity_config(dir_ / "x");
  bad_type["distributions"]["instances"] = "many";
  EXPECT_EQ(run_cli("run " + write_config(bad_type).string()).code, 2);
  std::ofstream(dir_ / "broken.json") << "{not json";
  EXPECT_EQ(run_cli("run " + (dir_ / "broken.json").string()).code, 2);
  EXPECT_EQ(run_cli("run " + (dir_ / "missing.json").string()).code, 2);
  EXPECT_EQ(run_cli("sample --K 3").code, 2);
  EXPECT_EQ(run_cli("refine --mu 0.5,0.5").code, 2);
  EXPECT_EQ(run_cli("verify nothing").code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(Cli, SchemaErrorNamesTheJsonPath) {
  Json bad = identity_config(dir_ / "x");
  bad["distributions"]["alpha"] = -1.0;
  const std::string cmd = std::string(SEASON_CLI_PATH) + " run " + write_config(bad).string() + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string text;
  char buf[512];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  pclose(p);
  EXPECT_NE(text.find("/distributions/alpha"), std::string::npos) << text;
}

TEST_F(Cli, NumericFailureExitsThree) {
  // nu charges a point where mu has no mass.
  EXPECT_EQ(run_cli("refine --mu 1,0 --nu 0.5,0.5 --generator kl --output-dir " + (dir_ / "x").string()).code, 3);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(Cli, RefineFromClassProbabilities) {
  const auto out = dir_ / "r";
  ASSERT_EQ(run_cli("refine --mu 0.5,0.5 --eta 0.6666666666666666,0.3333333333333333 --normalization rescale "
                    "--output-dir " + out.string())
                .code,
            0);
  const auto rep = Json::parse(slurp(out / "refine_report.json"));
  EXPECT_NEAR(rep["refined"][0].get<double>(), 0.8, 1e-12);
  EXPECT_NEAR(rep["refined"][1].get<double>(), 0.2, 1e-12);
  const auto csv = slurp(out / "refined.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x0,base_weight,ratio,refined_weight");
}

TEST_F(Cli, TrainDiscriminatorCheckpointLoads) {
  const auto out = dir_ / "t";
  ASSERT_EQ(run_cli("train-discriminator --seed 1 --width 4 --steps 20 --train-samples 50 --output-dir " + out.string())
                .code,
            0);
  const auto d = season::discriminator_from_json(Json::parse(slurp(out / "discriminator.json")));
  EXPECT_EQ(d.generator().name(), "js_shifted");
  EXPECT_TRUE(Json::parse(slurp(out / "train_report.json")).contains("objective"));
}

TEST_F(Cli, SampleEmitsBatchesAndReport) {
  const auto out = dir_ / "s";
  ASSERT_EQ(run_cli("sample --seed 2 --K 4 --n-samples 40 --steps 5 --train-samples 40 --output-dir " + out.string())
                .code,
            0);
  for (const auto* name : {"samples_base.csv", "samples_refined.csv", "w1_report.json"})
    EXPECT_TRUE(fs::exists(out / name)) << name;
  const auto csv = slurp(out / "samples_base.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x0,chain,seed");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
}

TEST_F(Cli, VerifyCorePrintsPassingSummary) {
  const auto r = run_cli("verify core");
  EXPECT_EQ(r.code, 0);
  const auto summary = Json::parse(r.out);
  EXPECT_TRUE(summary["passed"].get<bool>());
  EXPECT_TRUE(summary["suites"].contains("core"));
}

TEST_F(Cli, VerifyIdentityPasses) { EXPECT_EQ(run_cli("verify identity").code, 0); }

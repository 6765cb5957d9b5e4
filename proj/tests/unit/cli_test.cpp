#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "hylomorph/cli.hpp"
#include "hylomorph/snapshot.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun hylomorph(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = hylo::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("hylomorph_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> args(const std::string& command, const std::string& config,
                                std::vector<std::string> extra = {}) const {
    std::vector<std::string> a{command, "--config", fixtures::config_path(config), "--set",
                               "output.directory=" + dir_.string()};
    for (auto& e : extra) a.push_back(std::move(e));
    return a;
  }

  json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return json::parse(in);
  }

  std::string read_text(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HylomorphyReport) {
  const CliRun r = hylomorph(args("hylomorphy", "reference_nls.toml"));
  ASSERT_EQ(r.code, hylo::cli::kExitOk) << r.err;
  const json j = read_json("hylomorphy.json");
  EXPECT_NEAR(j["margin"]["value"].get<double>(), 0.275, 1e-6);
  EXPECT_TRUE(j["passes"].get<bool>());
  EXPECT_EQ(j["command"], "hylomorphy");
  EXPECT_TRUE(j["margin"].contains("definition"));
}

TEST_F(CliTest, MissingSigmaExitsTwo) {
  const CliRun r = hylomorph(args("minimize", "reference_nls.toml", {"--set", "solver.sigma="}));
  EXPECT_EQ(r.code, hylo::cli::kExitConfig);
  // A config without the key at all.
  std::ifstream in(fixtures::config_path("reference_nls.toml"));
  std::string text{std::istreambuf_iterator<char>(in), {}};
  const auto pos = text.find("sigma = 4");
  ASSERT_NE(pos, std::string::npos);
  text.erase(pos, text.find('\n', pos) - pos);
  const fs::path cfg = dir_ / "no_sigma.toml";
  std::ofstream(cfg) << text;
  const CliRun s = hylomorph({"minimize", "--config", cfg.string(), "--set", "output.directory=" + dir_.string()});
  EXPECT_EQ(s.code, hylo::cli::kExitConfig);
  EXPECT_NE(s.err.find("solver.sigma"), std::string::npos) << s.err;
}

TEST_F(CliTest, BadArgumentsExitTwo) {
  EXPECT_EQ(hylomorph({"explode", "--config", fixtures::config_path("reference_nls.toml")}).code,
            hylo::cli::kExitConfig);
  EXPECT_EQ(hylomorph({"describe"}).code, hylo::cli::kExitConfig);
  EXPECT_EQ(hylomorph(args("describe", "reference_nls.toml", {"--set", "model.v0=-1"})).code,
            hylo::cli::kExitConfig);
  EXPECT_EQ(hylomorph({"describe", "--config", (dir_ / "absent.toml").string()}).code, hylo::cli::kExitConfig);
}

TEST_F(CliTest, DescribeEchoReproduces) {
  const CliRun first = hylomorph(args("describe", "reference_nkg.toml"));
  ASSERT_EQ(first.code, 0) << first.err;
  const fs::path echo = dir_ / "echo.toml";
  std::ofstream(echo) << first.out;
  const CliRun second = hylomorph({"describe", "--config", echo.string()});
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(second.out, first.out);
  EXPECT_TRUE(read_json("describe.json").contains("derived"));
}

TEST_F(CliTest, MinimizeThenEvolveFromSnapshot) {
  ASSERT_EQ(hylomorph(args("minimize", "reference_nls.toml")).code, 0);
  const json m = read_json("minimize.json");
  EXPECT_TRUE(m["result"]["converged"].get<bool>());
  EXPECT_TRUE(m["result"]["existence_flag"].get<bool>());
  ASSERT_TRUE(fs::exists(dir_ / "minimizer.snap"));

  const CliRun e = hylomorph(args("evolve", "reference_nls.toml",
                               {"--set", "evolve.input=" + (dir_ / "minimizer.snap").string(), "--set",
                                "evolve.snapshot_stride=5000"}));
  ASSERT_EQ(e.code, 0) << e.err;
  const json j = read_json("evolve.json");
  EXPECT_LE(j["standing_wave"]["max_modulus_deviation"]["value"].get<double>(), 1e-3);
  EXPECT_LE(j["standing_wave"]["phase_rate_error"]["value"].get<double>(), 0.01);
  EXPECT_NEAR(j["standing_wave"]["omega"]["value"].get<double>(), m["result"]["omega"]["value"].get<double>(),
              1e-6 * std::abs(m["result"]["omega"]["value"].get<double>()));
  EXPECT_TRUE(fs::exists(dir_ / "evolve_00005000.snap"));
  EXPECT_TRUE(fs::exists(dir_ / "evolve_final.snap"));
  const std::string csv = read_text("evolve.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E,C,orbit_distance,lyapunov");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
}

TEST_F(CliTest, NkgEvolveWritesPairSnapshots) {
  const CliRun e = hylomorph(args("evolve", "reference_nkg.toml", {"--set", "evolve.steps=200"}));
  ASSERT_EQ(e.code, 0) << e.err;
  const auto snap = hylo::read_snapshot(dir_ / "evolve_final.snap");
  EXPECT_EQ(snap.kind, hylo::SnapshotKind::NkgPair);
  EXPECT_EQ(snap.psi.size(), snap.psi_dot.size());
}

TEST_F(CliTest, SweepTable) {
  const CliRun r = hylomorph(args("sweep", "reference_nls.toml", {"--set", "solver.sigmas=[1.0, 4.0, 16.0]"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_text("sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sigma,lambda_upper,E,omega,converged,existence_flag");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(read_json("sweep.json")["rows"].size(), 3u);
}

TEST_F(CliTest, StrictNonConvergenceExitsThree) {
  const auto extra = std::vector<std::string>{"--set", "solver.max_iter=2"};
  EXPECT_EQ(hylomorph(args("minimize", "reference_nls.toml", extra)).code, 0);
  auto strict = extra;
  strict.push_back("--strict");
  EXPECT_EQ(hylomorph(args("minimize", "reference_nls.toml", strict)).code, hylo::cli::kExitNotConverged);
}

TEST_F(CliTest, JsonIsDeterministic) {
  ASSERT_EQ(hylomorph(args("minimize", "reference_nkg.toml")).code, 0);
  const std::string first = read_text("minimize.json");
  const std::string snap = read_text("minimizer.snap");
  ASSERT_EQ(hylomorph(args("minimize", "reference_nkg.toml")).code, 0);
  EXPECT_EQ(read_text("minimize.json"), first);
  EXPECT_EQ(read_text("minimizer.snap"), snap);
}

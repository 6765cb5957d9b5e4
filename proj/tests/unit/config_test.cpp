#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hylomorph/config.hpp"
#include "hylomorph/errors.hpp"
#include "hylomorph/run_config.hpp"

using namespace hylo;

namespace {

std::string error_key(const Config& c, const std::string& command) {
  try {
    RunConfig::from_config(c, command);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesSubset) {
  const Config c = Config::parse(R"(
# comment
top = 1
[model]
type = "nls"   # trailing
lattice = [
  1.0, 0.5,
  0.0, 1.0,
]
flag = true
[grid]
cells = [4, 4]
)");
  EXPECT_EQ(c.integer("top"), 1);
  EXPECT_EQ(c.string("model.type"), "nls");
  EXPECT_EQ(c.numbers("model.lattice"), (std::vector<double>{1.0, 0.5, 0.0, 1.0}));
  EXPECT_TRUE(c.boolean("model.flag"));
  EXPECT_EQ(c.integers("grid.cells"), (std::vector<std::int64_t>{4, 4}));
  EXPECT_DOUBLE_EQ(c.number("top"), 1.0);
}

TEST(Config, ErrorsNameLineAndKey) {
  try {
    Config::parse("[a]\nx = 1\nx = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(Config::parse("[a]\nx = \n"), ConfigError);
  EXPECT_THROW(Config::parse("[a\n"), ConfigError);
  const Config c = Config::parse("[a]\nx = 1\n");
  try {
    c.at("a.y");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "a.y");
  }
}

TEST(Config, OverridesAndRoundTrip) {
  Config c = Config::load(fixtures::config_path("reference_nls.toml"));
  c.set("solver.sigma=8");
  c.set("output.directory=/tmp/x");
  EXPECT_DOUBLE_EQ(c.number("solver.sigma"), 8.0);
  EXPECT_EQ(c.string("output.directory"), "/tmp/x");
  const Config again = Config::parse(c.to_toml());
  EXPECT_EQ(again.to_toml(), c.to_toml());
  EXPECT_EQ(again.keys(), c.keys());
}

TEST(RunConfig, ReferenceFilesValidate) {
  const Config nls = Config::load(fixtures::config_path("reference_nls.toml"));
  const Config nkg = Config::load(fixtures::config_path("reference_nkg.toml"));
  for (const char* cmd : {"describe", "hylomorphy", "minimize", "evolve", "stability"}) {
    EXPECT_NO_THROW(RunConfig::from_config(nls, cmd)) << cmd;
    EXPECT_NO_THROW(RunConfig::from_config(nkg, cmd)) << cmd;
  }
  const RunConfig r = RunConfig::from_config(nls, "minimize");
  EXPECT_EQ(r.type, ModelType::Nls);
  EXPECT_DOUBLE_EQ(*r.sigma, 4.0);
  EXPECT_EQ(RunConfig::from_config(r.to_config(), "minimize").to_config().to_toml(), r.to_config().to_toml());
}

TEST(RunConfig, ValidationNamesTheKey) {
  const Config base = Config::load(fixtures::config_path("reference_nls.toml"));
  {
    Config c = Config::parse("[model]\ntype = \"nls\"\nh = 1.0\nnonlinearity = \"quadratic\"\n[grid]\ndim = 1\ncells = 4\n"
                             "points_per_cell = 8\n");
    EXPECT_EQ(error_key(c, "minimize"), "solver.sigma");
    EXPECT_EQ(error_key(c, "sweep"), "solver.sigmas");
    EXPECT_EQ(error_key(c, "describe"), "");
  }
  {
    Config c = base;
    c.set("model.b=0.1");
    EXPECT_EQ(error_key(c, "describe"), "model.b");
  }
  {
    Config c = base;
    c.set("model.typo=1");
    EXPECT_EQ(error_key(c, "describe"), "model.typo");
  }
  {
    Config c = base;
    c.set("grid.points_per_cell=1");
    EXPECT_EQ(error_key(c, "describe"), "grid.points_per_cell");
  }
  {
    Config c = base;
    c.set("evolve.snapshot_stride=150");
    EXPECT_EQ(error_key(c, "evolve"), "evolve.snapshot_stride");
  }
  {
    Config c = base;
    c.set("model.mass_amplitude=0.1");
    EXPECT_EQ(error_key(c, "describe"), "model.mass_amplitude");
  }
  {
    Config c = base;
    c.set("solver.sigma=-1");
    EXPECT_EQ(error_key(c, "minimize"), "solver.sigma");
  }
}

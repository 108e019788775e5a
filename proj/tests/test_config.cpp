#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>

#include "diffzoom/config.hpp"
#include "diffzoom/error.hpp"

using namespace diffzoom;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

}  // namespace

TEST(ParseReal, NumbersAndPowersOfTwo) {
  EXPECT_EQ(parse_real("2^-8"), 1.0 / 256.0);
  EXPECT_EQ(parse_real(" 2^3 "), 8.0);
  EXPECT_EQ(parse_real("1e-2"), 0.01);
  EXPECT_EQ(parse_real("-0.5"), -0.5);
  EXPECT_EQ(code_of([] { parse_real("abc"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_real("2^x"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_real("1.5kg"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_real("inf"); }), ErrorCode::kConfigParse);
}

TEST(ParseConfig, KeyValueLinesWithComments) {
  const auto c = parse_config(
      "# base experiment\n"
      "model = ou   # mean reverting\n"
      "theta=2\n"
      "sigma0 = 0.5\n"
      "\n"
      "eps = 2^-6, 2^-8 ,1e-3\n"
      "seed = 0xD1FF\n"
      "paths = 1e4\n"
      "scale_route = true\n");
  EXPECT_EQ(c.model, "ou");
  EXPECT_EQ(c.params.at("theta"), 2.0);
  EXPECT_EQ(c.params.at("sigma0"), 0.5);
  EXPECT_EQ(c.eps, (std::vector<double>{1.0 / 64, 1.0 / 256, 1e-3}));
  EXPECT_EQ(c.seed, 0xD1FFu);
  EXPECT_EQ(c.paths, 10000u);
  EXPECT_TRUE(c.scale_route);
}

TEST(ParseConfig, Errors) {
  EXPECT_EQ(code_of([] { parse_config("colour = blue\n"); }), ErrorCode::kUnknownKey);
  EXPECT_EQ(code_of([] { parse_config("model bm\n"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_config("paths = -3\n"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_config("paths = 2.5\n"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { parse_config("scale_route = maybe\n"); }), ErrorCode::kConfigParse);
  try {
    parse_config("model = bm\n\ncolour = blue\n");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Overrides, ApplyAfterFileAndRejectUnknownKeys) {
  const std::string file = ::testing::TempDir() + "/base.cfg";
  std::ofstream(file) << "model = gbm\nx0 = 2\nsigma0 = 0.3\npaths = 10\n";
  auto c = load_config(file);
  apply_override(c, "model=bm");
  apply_override(c, "eps=1e-2");
  EXPECT_EQ(c.model, "bm");
  EXPECT_EQ(c.eps, std::vector<double>{1e-2});
  EXPECT_EQ(c.paths, 10u);
  EXPECT_EQ(code_of([&] { apply_override(c, "nokey=1"); }), ErrorCode::kUnknownKey);
  EXPECT_EQ(code_of([&] { apply_override(c, "paths"); }), ErrorCode::kConfigParse);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/dir/base.cfg"); }), ErrorCode::kConfigNotFound);
}

TEST(ValidateConfig, GridRules) {
  ExperimentConfig c;
  c.dt = 1e-4;
  c.eps = {1e-2};
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(c.n_steps(), 10000u);
  EXPECT_EQ(c.stride(1e-2), 100u);
  EXPECT_EQ(c.at_time(), 0.5);

  auto bad = c;
  bad.eps = {1.5e-2 + 3e-5};  // not a multiple of dt
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
  bad.eps = {5e-3};  // eps / dt = 50 < 100
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
  bad.eps = {3e-2};  // 300 does not divide 10000
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
  bad = c;
  bad.zoom_time = 0.33335;
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
  bad = c;
  bad.dt = 3e-4;  // horizon not a multiple
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
  bad = c;
  bad.model = "cir";
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kUnknownModel);
  bad = c;
  bad.model = "ou";
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kMissingParameter);
  bad = c;
  bad.paths = 0;
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::kConfigInvalid);
}

TEST(ConfigEcho, OmitsRunOnlySettings) {
  ExperimentConfig c;
  c.threads = 7;
  c.output_dir = "/tmp/somewhere";
  const auto echo = config_echo(c);
  EXPECT_FALSE(echo.contains("threads"));
  EXPECT_FALSE(echo.contains("output_dir"));
  EXPECT_EQ(echo["seed"].get<std::uint64_t>(), 0xD1FFu);
  EXPECT_EQ(echo["params"]["sigma0"].get<double>(), 1.0);
  for (const auto& key : config_keys()) {
    if (key == "threads" || key == "output_dir") continue;
    const bool param = key == "sigma0" || key == "mu0" || key == "theta" || key == "x0";
    const bool folded = key == "rate_min" || key == "rate_max";
    if (!param && !folded) EXPECT_TRUE(echo.contains(key)) << key;
  }
}

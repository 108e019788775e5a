#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "diffzoom/error.hpp"
#include "diffzoom/parallel.hpp"
#include "diffzoom/pathops.hpp"
#include "diffzoom/simulate.hpp"
#include "diffzoom/stats.hpp"

using namespace diffzoom;

namespace {
const DiffusionModel kBm = builtin_model("bm", {{"sigma0", 1.0}});
}

TEST(SimulatePath, DriftlessUnitStepIsScaledNormals) {
  const SeedPlan seeds{0xD1FF, 4};
  const Path p = simulate_path(kBm, 1.0, 4, seeds);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p.values[0], 0.0);
  EXPECT_EQ(p.step, 0.25);
  EXPECT_EQ(p.horizon(), 1.0);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(p.values[k + 1], p.values[k] + 0.5 * normal_at(seeds, lane::kIncrements, k));
  }
}

TEST(SimulatePath, BitIdenticalForSameInputs) {
  const auto ou = builtin_model("ou", {{"theta", 1.0}, {"sigma0", 1.0}, {"x0", 0.5}});
  const Path a = simulate_path(ou, 1.0, 1000, {42, 7});
  const Path b = simulate_path(ou, 1.0, 1000, {42, 7});
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values[0], 0.5);
  const Path c = simulate_path(ou, 1.0, 1000, {42, 8});
  EXPECT_NE(a.values, c.values);
}

// Constant coefficients: E X_1 = x0 + mu0. Monte Carlo within 3 standard errors.
TEST(SimulatePath, DriftedTerminalMean) {
  const auto model = builtin_model("bm_drift", {{"mu0", 2.0}, {"sigma0", 1.0}});
  const std::size_t n_paths = 10000;
  std::vector<double> terminal(n_paths);
  parallel_for(n_paths, 0, [&](std::size_t i, unsigned) {
    Path p;
    simulate_path_into(p, model, 1.0, 10000, {0xD1FF, i});
    terminal[i] = p.values.back();
  });
  double mean = 0.0;
  for (double v : terminal) mean += v;
  mean /= n_paths;
  EXPECT_NEAR(mean, 2.0, 3.0 / std::sqrt(static_cast<double>(n_paths)));
}

TEST(SimulatePath, BlowUpNamesTheStep) {
  DiffusionModel explode;
  explode.name = "explode";
  explode.drift = [](double x) { return x * x * 1e6; };
  explode.diffusion = [](double) { return 1.0; };
  explode.initial_value = 1.0;
  try {
    simulate_path(explode, 1.0, 100, {1, 1});
    FAIL() << "expected a nonfinite failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonfinite);
    EXPECT_NE(std::string(e.what()).find("at step"), std::string::npos);
  }
  EXPECT_THROW(simulate_path(kBm, 1.0, 0, {1, 1}), Error);
}

TEST(SimulatePath, PrefixConsistentAcrossHorizons) {
  // Same step size, longer horizon: the shorter path is a prefix.
  const Path a = simulate_path(kBm, 0.5, 500, {9, 9});
  const Path b = simulate_path(kBm, 1.0, 1000, {9, 9});
  for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a.values[k], b.values[k]);
}

TEST(SimulatePath, DeterministicAcrossWorkerCounts) {
  const auto gbm = builtin_model("gbm", {{"sigma0", 0.5}, {"x0", 1.0}});
  auto run = [&](unsigned threads) {
    std::vector<std::vector<double>> out(64);
    parallel_for(out.size(), threads, [&](std::size_t i, unsigned) {
      out[i] = simulate_path(gbm, 1.0, 256, {0xD1FF, i}).values;
    });
    return out;
  };
  const auto one = run(1);
  EXPECT_EQ(one, run(3));
  EXPECT_EQ(one, run(8));
}

TEST(RestrictToSubgrid, Examples) {
  Path p;
  p.step = 0.1;
  for (int k = 0; k <= 10; ++k) p.values.push_back(k * k);

  const Path a = restrict_to_subgrid(p, 5, 0);
  EXPECT_EQ(a.values, (std::vector<double>{0, 25, 100}));
  EXPECT_DOUBLE_EQ(a.step, 0.5);

  const Path b = restrict_to_subgrid(p, 5, 2);
  EXPECT_EQ(b.values, (std::vector<double>{4, 49}));

  const Path c = restrict_to_subgrid(p, 1, 0);
  EXPECT_EQ(c.values, p.values);
  EXPECT_EQ(c.step, p.step);

  EXPECT_THROW(restrict_to_subgrid(p, 5, 11), Error);
  EXPECT_THROW(restrict_to_subgrid(p, 0, 0), Error);
}

TEST(RestrictToSubgrid, NestedValuesAndSupremum) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Path p = simulate_path(kBm, 1.0, 640, {3, s});
    const std::size_t stride = 1 + s % 64;
    const std::size_t offset = s % stride;
    const Path sub = restrict_to_subgrid(p, stride, offset);
    for (std::size_t j = 0; j < sub.size(); ++j) {
      ASSERT_EQ(sub.values[j], p.values[offset + j * stride]);
    }
    EXPECT_LE(supremum(sub).sup_value, supremum(p).sup_value);
  }
}

// Brownian scaling at finite epsilon: a rescaled window of a bm path is again
// a standard Brownian increment.
TEST(SimulatePath, BrownianSelfSimilarityAtFiniteEpsilon) {
  const std::size_t n = 5000;
  std::vector<double> zoomed(n), fresh(n);
  parallel_for(n, 0, [&](std::size_t i, unsigned) {
    const Path p = simulate_path(kBm, 1.0, 1000, {0xD1FF, i});
    // eps = 0.1, t0 = 0.5: eps^{-1/2} (X_{0.6} - X_{0.5}).
    zoomed[i] = (p.values[600] - p.values[500]) / std::sqrt(0.1);
    const Path q = simulate_path(kBm, 1.0, 100, {0xD1FF, n + i});
    fresh[i] = q.values.back();
  });
  const KSResult ks = ks_two_sample(EmpiricalDistribution(zoomed), EmpiricalDistribution(fresh));
  EXPECT_FALSE(ks.rejects(0.001)) << "D = " << ks.statistic;
}

TEST(WritePathCsv, WritesHeaderAndRows) {
  const Path p = simulate_path(kBm, 1.0, 4, {1, 2});
  const std::string file = ::testing::TempDir() + "/path.csv";
  write_path_csv(p, file);
  std::FILE* f = std::fopen(file.c_str(), "r");
  ASSERT_NE(f, nullptr);
  char line[128];
  ASSERT_NE(std::fgets(line, sizeof line, f), nullptr);
  EXPECT_STREQ(line, "t,x\n");
  int rows = 0;
  while (std::fgets(line, sizeof line, f)) ++rows;
  std::fclose(f);
  EXPECT_EQ(rows, 5);
}

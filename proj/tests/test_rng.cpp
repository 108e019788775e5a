#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "diffzoom/rng.hpp"
#include "diffzoom/stats.hpp"

using namespace diffzoom;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}),
            (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}),
            (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, MatchesRandomAccess) {
  const SeedPlan seeds{0xD1FF, 17};
  NormalStream stream(seeds, lane::kIncrements);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    ASSERT_EQ(stream(), normal_at(seeds, lane::kIncrements, k)) << "k = " << k;
  }
}

TEST(NormalStream, StreamsAndLanesDiffer) {
  const SeedPlan a{1, 0};
  const SeedPlan b{1, 1};
  const SeedPlan c{2, 0};
  EXPECT_NE(normal_at(a, 0, 0), normal_at(b, 0, 0));
  EXPECT_NE(normal_at(a, 0, 0), normal_at(c, 0, 0));
  EXPECT_NE(normal_at(a, 0, 0), normal_at(a, 1, 0));
}

TEST(NormalStream, StandardNormalMarginal) {
  std::vector<double> xs;
  NormalStream stream({0xD1FF, 3}, 0);
  for (int i = 0; i < 100000; ++i) xs.push_back(stream());
  double mean = 0.0, var = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size() - 1;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(1e5));
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / 1e5));
  const KSResult ks = ks_one_sample(EmpiricalDistribution(xs), normal_law());
  EXPECT_FALSE(ks.rejects(0.001)) << ks.statistic;
}

TEST(UniformStream, OpenUnitIntervalAndIndexRange) {
  UniformStream u({5, 5}, 2);
  for (int i = 0; i < 10000; ++i) {
    const double v = u();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  UniformStream idx({5, 6}, 2);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[idx.index(7)];
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
  EXPECT_EQ(to_open_unit(0), 0x1.0p-54);
}

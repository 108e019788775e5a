#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "diffzoom/error.hpp"
#include "diffzoom/stats.hpp"

using namespace diffzoom;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, scale);
  std::vector<double> out(n);
  for (double& v : out) v = z(gen);
  return out;
}

}  // namespace

TEST(EmpiricalDistribution, CdfQuantileAndErrors) {
  const EmpiricalDistribution e({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(e.size(), 4u);
  EXPECT_EQ(e.sorted_samples()[0], 1.0);
  EXPECT_EQ(e.cdf(0.5), 0.0);
  EXPECT_EQ(e.cdf(2.0), 0.75);
  EXPECT_EQ(e.cdf(3.0), 1.0);
  EXPECT_EQ(e.quantile(0.5), 2.0);
  EXPECT_THROW(EmpiricalDistribution({}), Error);
  EXPECT_THROW(EmpiricalDistribution({1.0, std::nan("")}), Error);
}

TEST(KsOneSample, PointMassAtZeroAgainstNormal) {
  const KSResult r = ks_one_sample(EmpiricalDistribution(std::vector<double>(100, 0.0)), normal_cdf);
  EXPECT_NEAR(r.statistic, 0.5, 1e-15);
  EXPECT_EQ(r.n_effective, 100.0);
  EXPECT_TRUE(r.rejects(0.001));
}

TEST(KsOneSample, MidpointQuantilesGiveHalfStep) {
  const boost::math::normal nd;
  for (std::size_t n : {10u, 100u, 1000u}) {
    std::vector<double> x(n);
    for (std::size_t k = 1; k <= n; ++k) x[k - 1] = quantile(nd, (k - 0.5) / n);
    const KSResult r = ks_one_sample(EmpiricalDistribution(x), normal_cdf);
    EXPECT_NEAR(r.statistic, 0.5 / n, 1e-12) << n;
    EXPECT_FALSE(r.rejects(0.05));
  }
}

TEST(KsTwoSample, IdenticalAndDisjoint) {
  const auto a = gaussian(500, 1);
  const KSResult same = ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(a));
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);

  std::vector<double> lo(300), hi(200);
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = -1.0 - i;
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = 1.0 + i;
  const KSResult disjoint = ks_two_sample(EmpiricalDistribution(lo), EmpiricalDistribution(hi));
  EXPECT_EQ(disjoint.statistic, 1.0);
  EXPECT_DOUBLE_EQ(disjoint.n_effective, 300.0 * 200.0 / 500.0);
  for (bool r : disjoint.reject) EXPECT_TRUE(r);
}

TEST(KsTwoSample, IndependentSamplesFromOneLawDoNotReject) {
  int rejections = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = ks_two_sample(EmpiricalDistribution(gaussian(2000, 2 * s)),
                                 EmpiricalDistribution(gaussian(3000, 2 * s + 1)));
    if (r.rejects(0.001)) ++rejections;
  }
  EXPECT_EQ(rejections, 0);
}

// Applying one strictly increasing map to both samples leaves D unchanged.
TEST(KsTwoSample, InvariantUnderMonotoneTransform) {
  auto a = gaussian(800, 5), b = gaussian(600, 6, 1.3);
  const double d = ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)).statistic;
  for (double& v : a) v = std::exp(v) + v * v * v;
  for (double& v : b) v = std::exp(v) + v * v * v;
  EXPECT_EQ(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)).statistic, d);
}

// One-sample and two-sample tests against a large reference sample agree.
TEST(KsTwoSample, AgreesWithOneSampleForLargeReference) {
  const auto a = gaussian(2000, 8, 1.1);
  const auto ref = gaussian(1000000, 9);
  const double one = ks_one_sample(EmpiricalDistribution(a), normal_cdf).statistic;
  const double two = ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(ref)).statistic;
  EXPECT_NEAR(one, two, 0.01);
}

TEST(Kolmogorov, SurvivalOracle) {
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.96394524366, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967168, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.04948587676, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.9495), 0.00099980198, 1e-11);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_EQ(kolmogorov_survival(-1.0), 1.0);
  EXPECT_LT(kolmogorov_survival(10.0), 1e-80);
  EXPECT_NEAR(ks_critical_value(0.05, 1.0), 1.35810, 1e-5);
  EXPECT_NEAR(ks_critical_value(0.001, 100.0), 0.194947, 1e-5);
}

TEST(MixingDiagnostic, IndependentDoesNotReject) {
  const auto v = gaussian(4000, 10), c = gaussian(4000, 11);
  std::vector<std::pair<double, double>> pairs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) pairs[i] = {v[i], c[i]};
  const MixingReport r = mixing_diagnostic(pairs, 4);
  EXPECT_EQ(r.slices, 4u);
  EXPECT_EQ(r.min_slice_size, 1000u);
  EXPECT_FALSE(r.rejects(0.001));
}

TEST(MixingDiagnostic, FullDependenceRejects) {
  const auto v = gaussian(4000, 12);
  std::vector<std::pair<double, double>> pairs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) pairs[i] = {v[i], v[i]};
  const MixingReport r = mixing_diagnostic(pairs, 4);
  EXPECT_EQ(r.max_statistic, 1.0);
  EXPECT_EQ(r.worst.statistic, 1.0);
  EXPECT_LT(r.worst_pair.first, r.worst_pair.second);
  EXPECT_TRUE(r.rejects(0.001));
}

// Value = conditioner * Z depends on the conditioner until divided out.
TEST(MixingDiagnostic, NormalizationRemovesScaleDependence) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  const auto z = gaussian(4000, 14);
  std::vector<std::pair<double, double>> raw(z.size()), normalized(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double s = u(gen);
    raw[i] = {s * z[i], s};
    normalized[i] = {z[i], s};
  }
  EXPECT_TRUE(mixing_diagnostic(raw, 4).rejects(0.001));
  EXPECT_FALSE(mixing_diagnostic(normalized, 4).rejects(0.001));
}

TEST(MixingDiagnostic, TooFewPerSlice) {
  std::vector<std::pair<double, double>> pairs(199, {0.0, 0.0});
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {double(i), double(i)};
  try {
    mixing_diagnostic(pairs, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewSamples);
  }
}

TEST(RateFit, ExactPowerLaws) {
  std::vector<std::pair<double, double>> half, one;
  for (int k = 4; k <= 10; ++k) {
    const double eps = std::ldexp(1.0, -k);
    half.emplace_back(eps, 3.0 * std::sqrt(eps));
    one.emplace_back(eps, 0.2 * eps);
  }
  const RateFit a = rate_fit(half);
  EXPECT_NEAR(a.slope, 0.5, 1e-12);
  EXPECT_NEAR(a.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(a.slope_half_width, 0.0, 1e-10);
  EXPECT_EQ(a.points, 7u);
  EXPECT_NEAR(rate_fit(one).slope, 1.0, 1e-12);
}

TEST(RateFit, RescalingOnlyMovesIntercept) {
  std::mt19937_64 gen(15);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::pair<double, double>> pts, scaled;
  for (int k = 4; k <= 12; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double rms = std::sqrt(eps) * std::exp(noise(gen));
    pts.emplace_back(eps, rms);
    scaled.emplace_back(eps, 7.5 * rms);
  }
  const RateFit a = rate_fit(pts), b = rate_fit(scaled);
  EXPECT_NEAR(a.slope, b.slope, 1e-12);
  EXPECT_NEAR(a.slope_half_width, b.slope_half_width, 1e-12);
  EXPECT_NEAR(b.intercept - a.intercept, std::log(7.5), 1e-12);
  EXPECT_GT(a.slope_half_width, 0.0);
  EXPECT_NEAR(a.slope, 0.5, 3.0 * a.slope_half_width);
}

TEST(RateFit, Errors) {
  const std::vector<std::pair<double, double>> three{{0.1, 1.0}, {0.01, 0.3}, {0.001, 0.1}};
  EXPECT_THROW(rate_fit(three), Error);
  const std::vector<std::pair<double, double>> bad{{0.1, 1.0}, {0.01, 0.3}, {0.001, 0.0}, {1e-4, 0.01}};
  EXPECT_THROW(rate_fit(bad), Error);
}

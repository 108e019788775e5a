#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "diffzoom/reference.hpp"

namespace diffzoom {

/// Significance levels every KS result is decided at.
inline constexpr std::array<double, 3> kSignificanceLevels{0.05, 0.01, 0.001};

/// Sorted sample. Construction sorts; NaNs and empty samples are rejected.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::span<const double> sorted_samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  /// Right-continuous empirical CDF.
  double cdf(double x) const noexcept;
  /// Sample quantile by the inverse empirical CDF.
  double quantile(double p) const noexcept;

 private:
  std::vector<double> samples_;
};

struct KSResult {
  double statistic = 0.0;
  double n_effective = 0.0;
  /// Asymptotic Kolmogorov tail probability of sqrt(n_eff) * statistic.
  double p_value = 1.0;
  /// reject[i] refers to kSignificanceLevels[i].
  std::array<bool, kSignificanceLevels.size()> reject{};

  bool rejects(double alpha) const noexcept { return p_value < alpha; }
};

/// P(K > lambda) for the Kolmogorov distribution K.
double kolmogorov_survival(double lambda) noexcept;

/// Asymptotic critical value sqrt(-log(alpha/2) / 2) / sqrt(n_eff).
double ks_critical_value(double alpha, double n_effective) noexcept;

KSResult ks_one_sample(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf);
KSResult ks_one_sample(const EmpiricalDistribution& emp, const ReferenceLaw& law);
KSResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

struct MixingReport {
  std::size_t slices = 0;
  std::size_t min_slice_size = 0;
  /// Largest pairwise two-sample KS statistic between slices.
  double max_statistic = 0.0;
  /// Pair with the smallest p-value and its KS result.
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  KSResult worst;

  bool rejects(double alpha) const noexcept { return worst.rejects(alpha); }
};

/// Splits (value, conditioner) pairs into `n_slices` equal-count slices by
/// conditioner quantile and compares the value distributions of every pair of
/// slices. Throws kTooFewSamples if a slice has fewer than 50 pairs.
MixingReport mixing_diagnostic(std::span<const std::pair<double, double>> pairs,
                               std::size_t n_slices);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// 95% Student-t half-width of the slope.
  double slope_half_width = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;
};

/// Least squares line through (log epsilon, log rms). Needs >= 4 points, all positive.
RateFit rate_fit(std::span<const std::pair<double, double>> points);

}  // namespace diffzoom

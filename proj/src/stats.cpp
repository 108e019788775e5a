#include "diffzoom/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "diffzoom/error.hpp"

namespace diffzoom {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(ErrorCode::kTooFewSamples, "empty sample");
  for (double v : samples_) {
    if (std::isnan(v)) throw Error(ErrorCode::kNonfinite, "NaN in sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf(double x) const noexcept {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const noexcept {
  const double n = static_cast<double>(samples_.size());
  auto k = static_cast<std::size_t>(std::ceil(std::clamp(p, 0.0, 1.0) * n));
  return samples_[k == 0 ? 0 : std::min(k, samples_.size()) - 1];
}

double kolmogorov_survival(double lambda) noexcept {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      const double term = std::exp(-j * j * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(double alpha, double n_effective) noexcept {
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(n_effective);
}

namespace {

KSResult decide(double statistic, double n_effective) {
  KSResult r;
  r.statistic = statistic;
  r.n_effective = n_effective;
  r.p_value = kolmogorov_survival(std::sqrt(n_effective) * statistic);
  for (std::size_t i = 0; i < kSignificanceLevels.size(); ++i) {
    r.reject[i] = r.rejects(kSignificanceLevels[i]);
  }
  return r;
}

}  // namespace

KSResult ks_one_sample(const EmpiricalDistribution& emp,
                       const std::function<double(double)>& cdf) {
  const auto xs = emp.sorted_samples();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return decide(d, n);
}

KSResult ks_one_sample(const EmpiricalDistribution& emp, const ReferenceLaw& law) {
  return ks_one_sample(emp, law.cdf);
}

KSResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto xa = a.sorted_samples();
  const auto xb = b.sorted_samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return decide(d, na * nb / (na + nb));
}

MixingReport mixing_diagnostic(std::span<const std::pair<double, double>> pairs,
                               std::size_t n_slices) {
  if (n_slices < 2) throw Error(ErrorCode::kInvalidArgument, "mixing diagnostic needs >= 2 slices");
  const std::size_t n = pairs.size();
  if (n / n_slices < 50) {
    throw Error(ErrorCode::kTooFewSamples,
                "mixing diagnostic needs >= 50 pairs per slice, got " + std::to_string(n) +
                    " pairs for " + std::to_string(n_slices) + " slices");
  }
  std::vector<std::pair<double, double>> by_conditioner(pairs.begin(), pairs.end());
  std::sort(by_conditioner.begin(), by_conditioner.end(), [](const auto& l, const auto& r) {
    return l.second != r.second ? l.second < r.second : l.first < r.first;
  });

  std::vector<EmpiricalDistribution> slices;
  slices.reserve(n_slices);
  MixingReport report;
  report.slices = n_slices;
  report.min_slice_size = n;
  for (std::size_t s = 0; s < n_slices; ++s) {
    const std::size_t begin = s * n / n_slices;
    const std::size_t end = (s + 1) * n / n_slices;
    std::vector<double> values;
    values.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) values.push_back(by_conditioner[k].first);
    report.min_slice_size = std::min(report.min_slice_size, values.size());
    slices.emplace_back(std::move(values));
  }

  bool first = true;
  for (std::size_t a = 0; a < n_slices; ++a) {
    for (std::size_t b = a + 1; b < n_slices; ++b) {
      const KSResult r = ks_two_sample(slices[a], slices[b]);
      report.max_statistic = std::max(report.max_statistic, r.statistic);
      if (first || r.p_value < report.worst.p_value) {
        report.worst = r;
        report.worst_pair = {a, b};
        first = false;
      }
    }
  }
  return report;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw Error(ErrorCode::kInvalidArgument, "rate fit needs >= 4 points");
  for (const auto& [eps, rms] : points) {
    if (!(eps > 0.0) || !(rms > 0.0)) {
      throw Error(ErrorCode::kDomain, "rate fit needs positive epsilon and error values");
    }
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [eps, rms] : points) {
    mx += std::log(eps);
    my += std::log(rms);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [eps, rms] : points) {
    const double dx = std::log(eps) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(rms) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::kDomain, "rate fit needs distinct epsilon values");

  RateFit fit;
  fit.points = points.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [eps, rms] : points) {
    const double r = std::log(rms) - (fit.intercept + fit.slope * std::log(eps));
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / n);
  const boost::math::students_t t_dist(n - 2.0);
  const double t975 = boost::math::quantile(t_dist, 0.975);
  fit.slope_half_width = t975 * std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

}  // namespace diffzoom

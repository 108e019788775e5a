#include "diffzoom/reference.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "diffzoom/error.hpp"
#include "diffzoom/quadrature.hpp"

namespace diffzoom {
namespace {

// P(|N_3| <= z) for a standard 3-dimensional normal vector.
double chi3_cdf(double z) {
  if (!(z > 0.0)) return 0.0;
  if (std::isinf(z)) return 1.0;
  return boost::math::gamma_p(1.5, 0.5 * z * z);
}

const std::pair<std::vector<double>, std::vector<double>>& cached_rule(int n) {
  thread_local std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, quadrature::gauss_legendre(n)).first;
  return it->second;
}

double norm3(double a, double b, double c) { return std::sqrt(a * a + b * b + c * c); }

}  // namespace

double bessel3_cdf(double t, double x) {
  if (!(t > 0.0)) throw Error(ErrorCode::kDomain, "bessel3_cdf needs t > 0");
  if (!(x > 0.0)) return 0.0;
  return chi3_cdf(x / std::sqrt(t));
}

Path bessel3_path(double horizon, std::size_t n_steps, const SeedPlan& seeds,
                  std::uint32_t lane_base) {
  if (n_steps == 0 || !(horizon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bessel3_path needs n_steps >= 1 and horizon > 0");
  }
  Path path;
  path.step = horizon / static_cast<double>(n_steps);
  path.model_name = "bessel3";
  path.seed = seeds.master_seed;
  path.stream_index = seeds.stream_index;
  path.values.resize(n_steps + 1);
  NormalStream z1(seeds, lane_base), z2(seeds, lane_base + 1), z3(seeds, lane_base + 2);
  const double sqrt_dt = std::sqrt(path.step);
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  path.values[0] = 0.0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    b1 += sqrt_dt * z1();
    b2 += sqrt_dt * z2();
    b3 += sqrt_dt * z3();
    path.values[k] = norm3(b1, b2, b3);
  }
  return path;
}

double besselU_cdf(double x, int quadrature_nodes) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const auto& [nodes, weights] = cached_rule(quadrature_nodes);
  // With u = v^2: int_0^1 F_1(x / sqrt u) du = int_0^1 2 v F_1(x / v) dv.
  auto integrand = [x](double v) { return v > 0.0 ? 2.0 * v * chi3_cdf(x / v) : 0.0; };
  // Above v = x the integrand decays like x^3 / v^2, so the tail uses geometric panels.
  double split = std::min(x, 1.0);
  double total = quadrature::gauss_legendre_integrate(integrand, 0.0, split, nodes, weights);
  while (split < 1.0) {
    const double next = std::min(4.0 * split, 1.0);
    total += quadrature::gauss_legendre_integrate(integrand, split, next, nodes, weights);
    split = next;
  }
  return std::clamp(total, 0.0, 1.0);
}

std::pair<KilledPath, KilledPath> xi_hat_sampler(double sigma_at_sup, double window,
                                                 std::size_t n_steps, const SeedPlan& seeds) {
  auto half = [&](std::uint32_t lane_base) {
    const Path b = bessel3_path(window, n_steps, seeds, lane_base);
    KilledPath out;
    out.step = b.step;
    out.kill_time = window;
    out.values.resize(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out.values[k] = -sigma_at_sup * b.values[k];
    return out;
  };
  return {half(lane::kXiHatPre), half(lane::kXiHatPost)};
}

std::pair<double, double> limit_sup_with_origin_term(double sigma_at_sup, int truncation,
                                                     const SeedPlan& seeds) {
  if (truncation < 1) throw Error(ErrorCode::kInvalidArgument, "truncation K must be >= 1");
  const double u = uniform_at(seeds, lane::kLimitUniform, 0);

  // Forward half: B2 at times U, U + 1, ..., U + K.
  NormalStream post(seeds, lane::kLimitPost);
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double previous = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double origin = 0.0;
  for (int i = 0; i <= truncation; ++i) {
    const double t = static_cast<double>(i) + u;
    const double s = std::sqrt(t - previous);
    b1 += s * post();
    b2 += s * post();
    b3 += s * post();
    previous = t;
    const double value = -sigma_at_sup * norm3(b1, b2, b3);
    if (i == 0) origin = value;
    best = std::max(best, value);
  }

  // Backward half: xi(i + U) = -sigma B1(|i| - U) for i = -1, ..., -K.
  NormalStream pre(seeds, lane::kLimitPre);
  b1 = b2 = b3 = 0.0;
  previous = 0.0;
  for (int i = 1; i <= truncation; ++i) {
    const double t = static_cast<double>(i) - u;
    const double s = std::sqrt(t - previous);
    b1 += s * pre();
    b2 += s * pre();
    b3 += s * pre();
    previous = t;
    best = std::max(best, -sigma_at_sup * norm3(b1, b2, b3));
  }
  return {best, origin};
}

double limit_sup_over_shifted_grid(double sigma_at_sup, int truncation, const SeedPlan& seeds) {
  return limit_sup_with_origin_term(sigma_at_sup, truncation, seeds).first;
}

double arcsine_cdf(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::kDomain, "arcsine_cdf needs x in [0, 1]");
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
}

ReferenceLaw normal_law() {
  return {"normal", Interval{},
          [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); },
          [](const SeedPlan& s) { return normal_at(s, lane::kReference, 0); }};
}

ReferenceLaw uniform_law() {
  return {"uniform", Interval{0.0, 1.0}, [](double x) { return std::clamp(x, 0.0, 1.0); },
          [](const SeedPlan& s) { return uniform_at(s, lane::kReference, 0); }};
}

ReferenceLaw arcsine_law() {
  // Beta(1/2, 1/2) as Z1^2 / (Z1^2 + Z2^2).
  return {"arcsine", Interval{0.0, 1.0},
          [](double x) { return arcsine_cdf(std::clamp(x, 0.0, 1.0)); },
          [](const SeedPlan& s) {
            const double a = normal_at(s, lane::kReference, 0);
            const double b = normal_at(s, lane::kReference, 1);
            return a * a / (a * a + b * b);
          }};
}

ReferenceLaw bessel3_law(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::kDomain, "bessel3 law needs t > 0");
  return {"bessel3", Interval{0.0, std::numeric_limits<double>::infinity()},
          [t](double x) { return bessel3_cdf(t, x); },
          [t](const SeedPlan& s) {
            return std::sqrt(t) * norm3(normal_at(s, lane::kReference, 0),
                                        normal_at(s, lane::kReference, 1),
                                        normal_at(s, lane::kReference, 2));
          }};
}

ReferenceLaw besselU_law() {
  return {"besselU", Interval{0.0, std::numeric_limits<double>::infinity()},
          [](double x) { return besselU_cdf(x); },
          [](const SeedPlan& s) {
            const double u = uniform_at(s, lane::kReference + 1, 0);
            return std::sqrt(u) * norm3(normal_at(s, lane::kReference, 0),
                                        normal_at(s, lane::kReference, 1),
                                        normal_at(s, lane::kReference, 2));
          }};
}

ReferenceLaw reference_law(const std::string& name, double t) {
  if (name == "normal") return normal_law();
  if (name == "uniform") return uniform_law();
  if (name == "arcsine") return arcsine_law();
  if (name == "bessel3") return bessel3_law(t);
  if (name == "besselU") return besselU_law();
  throw Error(ErrorCode::kInvalidArgument, "unknown reference law '" + name + "'");
}

}  // namespace diffzoom

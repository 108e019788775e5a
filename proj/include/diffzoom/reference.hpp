#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "diffzoom/model.hpp"
#include "diffzoom/pathops.hpp"
#include "diffzoom/rng.hpp"
#include "diffzoom/simulate.hpp"

namespace diffzoom {

/// A one-dimensional law with an exact CDF and a seeded sampler.
struct ReferenceLaw {
  std::string name;
  Interval support;
  std::function<double(double)> cdf;
  /// One draw; a pure function of the seed plan.
  std::function<double(const SeedPlan&)> sampler;
};

/// CDF at time t of the Bessel-3 process started at 0:
/// F_t(x) = F_1(x / sqrt t), F_1(x) = erf(x / sqrt 2) - sqrt(2/pi) x exp(-x^2/2), x >= 0.
double bessel3_cdf(double t, double x);

/// Euclidean norm of a 3-dimensional discrete Brownian path on [0, horizon],
/// using lanes lane_base .. lane_base + 2 of `seeds`.
Path bessel3_path(double horizon, std::size_t n_steps, const SeedPlan& seeds,
                  std::uint32_t lane_base = lane::kBesselBase);

/// CDF of B_U (Bessel-3 at an independent uniform time):
/// int_0^1 F_u(x) du by Gauss-Legendre with `quadrature_nodes` nodes per panel,
/// one panel below the scale where F_u(x) turns over and geometric panels above.
double besselU_cdf(double x, int quadrature_nodes = 64);

/// Two independent Bessel-3 paths on [0, window], negated and scaled by
/// sigma_at_sup: the backward and forward halves of the limit process xi-hat.
std::pair<KilledPath, KilledPath> xi_hat_sampler(double sigma_at_sup, double window,
                                                 std::size_t n_steps, const SeedPlan& seeds);

/// sup over i in {-K..K} of xi-hat(i + U), U uniform. The 3-dimensional Brownian
/// motions behind xi-hat are sampled exactly at the needed times; a smaller K
/// with the same seeds sees a prefix of the same draws.
double limit_sup_over_shifted_grid(double sigma_at_sup, int truncation, const SeedPlan& seeds);

/// Also returns xi-hat(U), the i = 0 term, from the same draw.
std::pair<double, double> limit_sup_with_origin_term(double sigma_at_sup, int truncation,
                                                     const SeedPlan& seeds);

/// (2/pi) arcsin(sqrt x) on [0, 1]. Throws kDomain outside.
double arcsine_cdf(double x);

ReferenceLaw normal_law();
ReferenceLaw uniform_law();
ReferenceLaw arcsine_law();
ReferenceLaw bessel3_law(double t);
ReferenceLaw besselU_law();

/// Lookup by name: normal, uniform, arcsine, bessel3 (uses t), besselU.
ReferenceLaw reference_law(const std::string& name, double t = 1.0);

}  // namespace diffzoom

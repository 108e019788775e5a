#include "diffzoom/scale.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "diffzoom/error.hpp"
#include "diffzoom/quadrature.hpp"

namespace diffzoom {
namespace {

constexpr std::size_t kInitialCells = 512;
constexpr std::size_t kMaxCells = std::size_t{1} << 21;

struct HermiteCell {
  double t;
  std::size_t k;
};

double hermite_value(const std::vector<double>& v, const std::vector<double>& s, double h,
                     HermiteCell c) {
  const double t = c.t;
  const double u = 1.0 - t;
  return (1.0 + 2.0 * t) * u * u * v[c.k] + t * u * u * h * s[c.k] +
         t * t * (3.0 - 2.0 * t) * v[c.k + 1] - t * t * u * h * s[c.k + 1];
}

double hermite_slope(const std::vector<double>& v, const std::vector<double>& s, double h,
                     HermiteCell c) {
  const double t = c.t;
  return (6.0 * t * t - 6.0 * t) * (v[c.k] - v[c.k + 1]) / h +
         (3.0 * t * t - 4.0 * t + 1.0) * s[c.k] + (3.0 * t * t - 2.0 * t) * s[c.k + 1];
}

// Fritsch-Carlson limiter: keeps each cell's cubic monotone.
void limit_monotone(const std::vector<double>& v, std::vector<double>& s, double h) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double secant = (v[k + 1] - v[k]) / h;
    if (secant <= 0.0) {
      s[k] = s[k + 1] = 0.0;
      continue;
    }
    const double alpha = s[k] / secant;
    const double beta = s[k + 1] / secant;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      s[k] = tau * alpha * secant;
      s[k + 1] = tau * beta * secant;
    }
  }
}

}  // namespace

struct ScaleFunction::Table {
  DiffusionModel model;
  Interval valid;
  double tol = 0.0;
  double h = 0.0;
  std::size_t cells = 0;
  std::vector<double> log_integral;  // I_k = int_{x0}^{x_k} drift / diffusion^2
  std::vector<double> ratio;         // drift / diffusion^2 at knots
  std::vector<double> p;             // p(x_k)
  std::vector<double> p_slope;       // limited slopes for the p spline

  HermiteCell locate(double x) const {
    const double u = (x - valid.lo) / h;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
    if (k >= cells) k = cells - 1;
    return {std::clamp(u - static_cast<double>(k), 0.0, 1.0), k};
  }

  double knot(std::size_t k) const {
    return k == cells ? valid.hi : valid.lo + static_cast<double>(k) * h;
  }

  void check(double x) const {
    if (!(x >= valid.lo && x <= valid.hi)) {
      throw Error(ErrorCode::kDomain, "scale function evaluated at " + std::to_string(x) +
                                          " outside its valid interval [" +
                                          std::to_string(valid.lo) + ", " +
                                          std::to_string(valid.hi) + "]");
    }
  }

  double value(double x) const { return hermite_value(p, p_slope, h, locate(x)); }
  double derivative(double x) const {
    return std::exp(-2.0 * hermite_value(log_integral, ratio, h, locate(x)));
  }
};

double ScaleFunction::operator()(double x) const {
  table_->check(x);
  return table_->value(x);
}

double ScaleFunction::derivative(double x) const {
  table_->check(x);
  return table_->derivative(x);
}

double ScaleFunction::inverse(double y) const {
  const Table& t = *table_;
  const double lo_y = t.p.front();
  const double hi_y = t.p.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(lo_y), std::abs(hi_y)});
  if (!(y >= lo_y - slack && y <= hi_y + slack)) {
    throw Error(ErrorCode::kDomain, "scale inverse evaluated at " + std::to_string(y) +
                                        " outside the image [" + std::to_string(lo_y) + ", " +
                                        std::to_string(hi_y) + "]");
  }
  if (y <= lo_y) return t.valid.lo;
  if (y >= hi_y) return t.valid.hi;

  // Bracket by bisection over the knot table.
  auto it = std::upper_bound(t.p.begin(), t.p.end(), y);
  std::size_t k = static_cast<std::size_t>(it - t.p.begin());
  k = std::clamp<std::size_t>(k, 1, t.cells) - 1;
  double lo = t.knot(k);
  double hi = t.knot(k + 1);
  const double width = t.p[k + 1] - t.p[k];
  double x = width > 0.0 ? lo + (y - t.p[k]) / width * (hi - lo) : lo;

  // Safeguarded Newton on the cell's cubic.
  for (int iter = 0; iter < 100; ++iter) {
    const HermiteCell cell{std::clamp((x - t.knot(k)) / t.h, 0.0, 1.0), k};
    const double f = hermite_value(t.p, t.p_slope, t.h, cell) - y;
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = hermite_slope(t.p, t.p_slope, t.h, cell);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 0.0) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

const Interval& ScaleFunction::valid_interval() const noexcept { return table_->valid; }

Interval ScaleFunction::image() const noexcept { return {table_->p.front(), table_->p.back()}; }

const DiffusionModel& ScaleFunction::source_model() const noexcept { return table_->model; }

std::size_t ScaleFunction::knot_count() const noexcept { return table_->cells + 1; }

double ScaleFunction::tolerance() const noexcept { return table_->tol; }

ScaleFunction build_scale(const DiffusionModel& model, const Interval& interval, double tol) {
  if (!interval.bounded() || !(interval.lo < interval.hi)) {
    throw Error(ErrorCode::kDomain, "scale function needs a bounded, nonempty interval");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (model.known_range &&
      (interval.lo < model.known_range->lo || interval.hi > model.known_range->hi)) {
    throw Error(ErrorCode::kDomain, "scale interval escapes the model's known range");
  }
  const double x0 = model.initial_value;
  if (!interval.contains(x0)) {
    throw Error(ErrorCode::kDomain, "scale interval must contain the initial value");
  }
  if (!validate(model, interval, 1001).passed()) {
    throw Error(ErrorCode::kDomain, "diffusion is not positive on the scale interval");
  }

  auto ratio = [&model](double u) {
    const double s = model.diffusion(u);
    return model.drift(u) / (s * s);
  };
  const double width = interval.width();

  for (std::size_t cells = kInitialCells; cells <= kMaxCells; cells *= 2) {
    auto table = std::make_shared<ScaleFunction::Table>();
    table->model = model;
    table->valid = interval;
    table->tol = tol;
    table->cells = cells;
    table->h = width / static_cast<double>(cells);
    const double h = table->h;
    const double cell_tol = tol * h / width;
    bool exhausted = false;

    auto& I = table->log_integral;
    auto& g = table->ratio;
    auto& P = table->p;
    I.assign(cells + 1, 0.0);
    g.assign(cells + 1, 0.0);
    P.assign(cells + 1, 0.0);
    for (std::size_t k = 0; k <= cells; ++k) g[k] = ratio(table->knot(k));

    auto integral_g = [&](double a, double b) {
      return quadrature::adaptive_simpson(ratio, a, b, cell_tol, exhausted);
    };
    // p' inside cell c, anchored at its left knot.
    auto p_prime_in = [&](std::size_t c) {
      const double left = table->knot(c);
      return [&, c, left](double u) { return std::exp(-2.0 * (I[c] + integral_g(left, u))); };
    };
    auto integral_p_prime = [&](std::size_t c, double a, double b) {
      const double scale = std::max(1.0, std::exp(-2.0 * I[c]) * (b - a));
      return quadrature::adaptive_simpson(p_prime_in(c), a, b, cell_tol * scale, exhausted);
    };

    const std::size_t k0 = table->locate(x0).k;
    const double x_k0 = table->knot(k0);
    I[k0] = -integral_g(x_k0, x0);
    for (std::size_t k = k0 + 1; k <= cells; ++k) {
      I[k] = I[k - 1] + integral_g(table->knot(k - 1), table->knot(k));
    }
    for (std::size_t k = k0; k-- > 0;) I[k] = I[k + 1] - integral_g(table->knot(k), table->knot(k + 1));

    P[k0] = -integral_p_prime(k0, x_k0, x0);
    for (std::size_t k = k0 + 1; k <= cells; ++k) {
      P[k] = P[k - 1] + integral_p_prime(k - 1, table->knot(k - 1), table->knot(k));
    }
    for (std::size_t k = k0; k-- > 0;) {
      P[k] = P[k + 1] - integral_p_prime(k, table->knot(k), table->knot(k + 1));
    }
    if (exhausted) {
      throw Error(ErrorCode::kQuadratureFailure, "scale quadrature did not reach tolerance");
    }
    for (std::size_t k = 0; k <= cells; ++k) {
      if (!std::isfinite(I[k]) || !std::isfinite(P[k])) {
        throw Error(ErrorCode::kQuadratureFailure, "scale function overflows on the interval");
      }
    }

    table->p_slope.resize(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) table->p_slope[k] = std::exp(-2.0 * I[k]);
    limit_monotone(P, table->p_slope, h);

    // Interpolation error at cell midpoints against direct quadrature.
    bool accurate = true;
    for (std::size_t c = 0; c < cells && accurate; ++c) {
      const double mid = table->knot(c) + 0.5 * h;
      const double i_mid = I[c] + integral_g(table->knot(c), mid);
      const double p_mid = P[c] + integral_p_prime(c, table->knot(c), mid);
      const HermiteCell cell{0.5, c};
      const double i_err = std::abs(hermite_value(I, g, h, cell) - i_mid);
      const double p_err = std::abs(hermite_value(P, table->p_slope, h, cell) - p_mid);
      accurate = i_err <= 0.5 * tol && p_err <= tol * std::max(1.0, std::abs(p_mid));
    }
    if (accurate) return ScaleFunction(std::move(table));
  }
  throw Error(ErrorCode::kQuadratureFailure,
              "scale interpolation did not reach tolerance within the knot budget");
}

DiffusionModel transform_model(const ScaleFunction& scale) {
  DiffusionModel out;
  out.name = "scale[" + scale.source_model().name + "]";
  out.drift = [](double) { return 0.0; };
  out.diffusion = [scale](double y) {
    const double x = scale.inverse(y);
    return scale.source_model().diffusion(x) * scale.derivative(x);
  };
  out.initial_value = 0.0;
  out.known_range = scale.image();
  out.params = scale.source_model().params;
  return out;
}

Path transform_path(const ScaleFunction& scale, const Path& path) {
  Path out = path;
  for (double& v : out.values) v = scale(v);
  out.model_name = "scale[" + path.model_name + "]";
  return out;
}

}  // namespace diffzoom

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace diffzoom::quadrature {

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, bool& exhausted) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double floor = 1e-15 * std::abs(left + right);
  if (std::abs(delta) <= 15.0 * std::max(tol, floor) || !(lm > a && rm < b)) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    exhausted = true;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, exhausted) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, exhausted);
}

}  // namespace detail

/// Adaptive Simpson rule with absolute tolerance `tol` (relaxed to ~1e-15
/// relative when tol is below rounding). Sets `exhausted` if the depth limit
/// was reached before the tolerance was met.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, bool& exhausted,
                        int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, exhausted);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Fixed-node Gauss-Legendre rule on [a, b].
template <typename F>
double gauss_legendre_integrate(F&& f, double a, double b, const std::vector<double>& nodes,
                                const std::vector<double>& weights) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

}  // namespace diffzoom::quadrature

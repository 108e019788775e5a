#include "diffzoom/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include "diffzoom/error.hpp"

namespace diffzoom::quadrature {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "Gauss-Legendre needs at least one node");
  // legendre_p_zeros returns the nonnegative roots in ascending order.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(n);
  weights.reserve(n);
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it == 0.0) continue;
    nodes.push_back(-*it);
    weights.push_back(weight(*it));
  }
  for (double x : half) {
    nodes.push_back(x);
    weights.push_back(weight(x));
  }
  return {nodes, weights};
}

}  // namespace diffzoom::quadrature

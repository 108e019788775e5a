#pragma once

#include <cstddef>
#include <memory>

#include "diffzoom/model.hpp"
#include "diffzoom/simulate.hpp"

namespace diffzoom {

/// Scale function p of a diffusion on a bounded interval:
///   p'(x) = exp(-2 int_{x0}^x drift/diffusion^2 (u) du),  p(x0) = 0.
///
/// Built eagerly: the log-derivative and p itself are tabulated on uniform
/// knots by adaptive Simpson quadrature and interpolated with monotone cubic
/// Hermite splines using the exact knot derivatives. Knots are doubled until
/// the interpolation error at cell midpoints is below the tolerance (absolute
/// for |p| <= 1, relative above). Copies share the immutable table.
class ScaleFunction {
 public:
  /// p(x). Throws kDomain outside the valid interval.
  double operator()(double x) const;
  /// p'(x). Throws kDomain outside the valid interval.
  double derivative(double x) const;
  /// p^{-1}(y) by bracketing on the knot table and safeguarded Newton.
  /// Throws kDomain outside image().
  double inverse(double y) const;

  const Interval& valid_interval() const noexcept;
  /// [p(lo), p(hi)] of the valid interval.
  Interval image() const noexcept;
  const DiffusionModel& source_model() const noexcept;
  std::size_t knot_count() const noexcept;
  double tolerance() const noexcept;

 private:
  struct Table;
  explicit ScaleFunction(std::shared_ptr<const Table> table) : table_(std::move(table)) {}
  friend ScaleFunction build_scale(const DiffusionModel&, const Interval&, double);

  std::shared_ptr<const Table> table_;
};

/// Builds p on `interval`, which must be bounded, inside the model's
/// known_range, and contain the initial value.
ScaleFunction build_scale(const DiffusionModel& model, const Interval& interval,
                          double tol = 1e-10);

/// Driftless model dY = diffusion~(Y) dW, Y_0 = 0, with
/// diffusion~ = (diffusion * p') o p^{-1}, defined on image().
DiffusionModel transform_model(const ScaleFunction& scale);

/// Pointwise Y_t = p(X_t) on the same grid.
Path transform_path(const ScaleFunction& scale, const Path& path);

}  // namespace diffzoom

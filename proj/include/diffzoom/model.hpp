#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace diffzoom {

/// Closed or open interval of the state space; infinite ends allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool bounded() const noexcept {
    return lo > -std::numeric_limits<double>::infinity() &&
           hi < std::numeric_limits<double>::infinity();
  }
  double width() const noexcept { return hi - lo; }
};

using Coefficient = std::function<double(double)>;
using ModelParams = std::map<std::string, double>;

/// Time-homogeneous diffusion dX = drift(X) dt + diffusion(X) dW, X_0 = initial_value.
/// Immutable after construction and safe to share between threads.
struct DiffusionModel {
  std::string name;
  Coefficient drift;
  Coefficient diffusion;
  double initial_value = 0.0;
  /// Region on which the author guarantees diffusion > 0. An open end such as
  /// gbm's 0 is stored as the nearest representable interior point.
  std::optional<Interval> known_range;
  ModelParams params;
};

/// Builds one of the catalog models: bm, bm_drift, ou, gbm.
/// Parameters: sigma0 (all), mu0 (bm_drift), theta (ou), x0 (required for
/// gbm, default 0 otherwise). Unused parameters are ignored.
DiffusionModel builtin_model(const std::string& name, const ModelParams& params);

/// Names accepted by builtin_model, in catalog order.
const std::vector<std::string>& builtin_model_names();

struct ValidationReport {
  double min_diffusion = 0.0;
  double argmin_diffusion = 0.0;
  double max_abs_drift = 0.0;
  bool diffusion_positive = false;
  bool drift_finite = false;

  bool passed() const noexcept { return diffusion_positive && drift_finite; }
};

/// Samples drift and diffusion on `grid_points` equispaced points of a bounded
/// interval (endpoints included) and reports the positivity and local
/// boundedness conditions. Never throws for a bounded interval.
ValidationReport validate(const DiffusionModel& model, const Interval& interval,
                          int grid_points);

}  // namespace diffzoom

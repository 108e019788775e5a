#include "diffzoom/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "diffzoom/error.hpp"

namespace diffzoom {
namespace {

double require(const ModelParams& params, const std::string& model, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::kMissingParameter,
                "model '" + model + "' requires parameter '" + key + "'");
  }
  return it->second;
}

double optional_param(const ModelParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names{"bm", "bm_drift", "ou", "gbm"};
  return names;
}

DiffusionModel builtin_model(const std::string& name, const ModelParams& params) {
  const auto& names = builtin_model_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorCode::kUnknownModel, "unknown model '" + name + "'");
  }

  const double sigma0 = require(params, name, "sigma0");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw Error(ErrorCode::kDomain, "sigma0 must be positive and finite");
  }

  DiffusionModel model;
  model.name = name;
  model.known_range = Interval{};
  model.params["sigma0"] = sigma0;

  if (name == "gbm") {
    const double x0 = require(params, name, "x0");
    if (!(x0 > 0.0)) {
      throw Error(ErrorCode::kDomain, "gbm requires x0 > 0 (diffusion vanishes at 0)");
    }
    model.initial_value = x0;
    model.drift = [](double) { return 0.0; };
    model.diffusion = [sigma0](double x) { return sigma0 * x; };
    model.known_range =
        Interval{std::numeric_limits<double>::min(), std::numeric_limits<double>::infinity()};
  } else {
    model.initial_value = optional_param(params, "x0", 0.0);
    if (name == "bm") {
      model.drift = [](double) { return 0.0; };
    } else if (name == "bm_drift") {
      const double mu0 = require(params, name, "mu0");
      model.params["mu0"] = mu0;
      model.drift = [mu0](double) { return mu0; };
    } else {  // ou
      const double theta = require(params, name, "theta");
      model.params["theta"] = theta;
      model.drift = [theta](double x) { return -theta * x; };
    }
    model.diffusion = [sigma0](double) { return sigma0; };
  }
  model.params["x0"] = model.initial_value;
  return model;
}

ValidationReport validate(const DiffusionModel& model, const Interval& interval,
                          int grid_points) {
  ValidationReport report;
  if (!interval.bounded() || grid_points < 2 || !(interval.hi >= interval.lo)) {
    return report;
  }
  report.min_diffusion = std::numeric_limits<double>::infinity();
  report.drift_finite = true;
  const double h = interval.width() / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double x = (i == grid_points - 1) ? interval.hi : interval.lo + i * h;
    const double s = model.diffusion(x);
    const double m = model.drift(x);
    if (std::isnan(s) || s < report.min_diffusion) {
      report.min_diffusion = s;
      report.argmin_diffusion = x;
    }
    if (!std::isfinite(m)) {
      report.drift_finite = false;
    } else {
      report.max_abs_drift = std::max(report.max_abs_drift, std::abs(m));
    }
  }
  report.diffusion_positive = report.min_diffusion > 0.0;
  return report;
}

}  // namespace diffzoom

#include "diffzoom/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "diffzoom/error.hpp"
#include "diffzoom/pathops.hpp"

namespace diffzoom {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_unsigned(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t[0] == '-') throw Error(ErrorCode::kConfigParse, "not a non-negative integer: '" + text + "'");
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(t, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size()) {
    // Accept integral reals such as 1e5.
    const double d = parse_real(t);
    if (d < 0 || d != std::floor(d) || d > 1.8e19) {
      throw Error(ErrorCode::kConfigParse, "not a non-negative integer: '" + text + "'");
    }
    value = static_cast<std::uint64_t>(d);
  }
  return value;
}

bool parse_bool(const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorCode::kConfigParse, "not a boolean: '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(item));
  }
  if (out.empty()) throw Error(ErrorCode::kConfigParse, "empty list: '" + text + "'");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"model", [](auto& c, const auto& v) { c.model = trim(v); }},
      {"sigma0", [](auto& c, const auto& v) { c.params["sigma0"] = parse_real(v); }},
      {"mu0", [](auto& c, const auto& v) { c.params["mu0"] = parse_real(v); }},
      {"theta", [](auto& c, const auto& v) { c.params["theta"] = parse_real(v); }},
      {"x0", [](auto& c, const auto& v) { c.params["x0"] = parse_real(v); }},
      {"horizon", [](auto& c, const auto& v) { c.horizon = parse_real(v); }},
      {"dt", [](auto& c, const auto& v) { c.dt = parse_real(v); }},
      {"eps", [](auto& c, const auto& v) { c.eps = parse_list(v); }},
      {"paths", [](auto& c, const auto& v) { c.paths = parse_unsigned(v); }},
      {"seed", [](auto& c, const auto& v) { c.seed = parse_unsigned(v); }},
      {"resolution", [](auto& c, const auto& v) { c.resolution = parse_real(v); }},
      {"truncation", [](auto& c, const auto& v) { c.truncation = static_cast<int>(parse_unsigned(v)); }},
      {"reference_samples", [](auto& c, const auto& v) { c.reference_samples = parse_unsigned(v); }},
      {"threads", [](auto& c, const auto& v) { c.threads = static_cast<unsigned>(parse_unsigned(v)); }},
      {"output_dir", [](auto& c, const auto& v) { c.output_dir = trim(v); }},
      {"zoom_time", [](auto& c, const auto& v) { c.zoom_time = parse_real(v); }},
      {"zoom_window", [](auto& c, const auto& v) { c.zoom_window = parse_real(v); }},
      {"alpha", [](auto& c, const auto& v) { c.alpha = parse_real(v); }},
      {"slices", [](auto& c, const auto& v) { c.slices = parse_unsigned(v); }},
      {"max_excluded", [](auto& c, const auto& v) { c.max_excluded = parse_real(v); }},
      {"ks_threshold", [](auto& c, const auto& v) { c.ks_threshold = parse_real(v); }},
      {"conjecture_threshold", [](auto& c, const auto& v) { c.conjecture_threshold = parse_real(v); }},
      {"uniform_threshold", [](auto& c, const auto& v) { c.uniform_threshold = parse_real(v); }},
      {"arcsine_threshold", [](auto& c, const auto& v) { c.arcsine_threshold = parse_real(v); }},
      {"boundary_fraction", [](auto& c, const auto& v) { c.boundary_fraction = parse_real(v); }},
      {"rate_min", [](auto& c, const auto& v) { c.rate_min = parse_real(v); }},
      {"rate_max", [](auto& c, const auto& v) { c.rate_max = parse_real(v); }},
      {"scale_route", [](auto& c, const auto& v) { c.scale_route = parse_bool(v); }},
      {"scale_range_factor", [](auto& c, const auto& v) { c.scale_range_factor = parse_real(v); }},
      {"scale_tolerance", [](auto& c, const auto& v) { c.scale_tolerance = parse_real(v); }},
  };
  return table;
}

void invalid(const std::string& message) { throw Error(ErrorCode::kConfigInvalid, message); }

}  // namespace

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("2^", 0) == 0) {
    const std::string exponent = t.substr(2);
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(exponent, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != exponent.size()) {
      throw Error(ErrorCode::kConfigParse, "not a power of two: '" + text + "'");
    }
    return std::ldexp(1.0, k);
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kConfigParse, "not a finite number: '" + text + "'");
  }
  return value;
}

std::size_t ExperimentConfig::n_steps() const { return grid_steps(horizon, dt, "horizon"); }

double ExperimentConfig::at_time() const { return zoom_time.value_or(0.5 * horizon); }

std::size_t ExperimentConfig::stride(double epsilon) const {
  return grid_steps(epsilon, dt, "eps");
}

DiffusionModel ExperimentConfig::make_model() const { return builtin_model(model, params); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  for (const auto& [name, setter] : setters()) {
    if (name == k) {
      try {
        setter(config, value);
      } catch (const Error& e) {
        throw Error(e.code(), "key '" + k + "': " + e.what());
      }
      return;
    }
  }
  throw Error(ErrorCode::kUnknownKey, "unknown configuration key '" + k + "'");
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kConfigParse, "override '" + assignment + "' is not key=value");
  }
  set_config_value(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigParse,
                  "line " + std::to_string(number) + ": expected key = value");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& file, ExperimentConfig base) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kConfigNotFound, "cannot open config file '" + file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

void validate_config(const ExperimentConfig& c) {
  if (!(c.horizon > 0.0)) invalid("horizon must be positive");
  if (!(c.dt > 0.0) || c.dt > c.horizon) invalid("dt must be in (0, horizon]");
  if (c.paths == 0) invalid("paths must be positive");
  if (c.eps.empty()) invalid("eps grid is empty");
  if (!(c.resolution >= 1.0)) invalid("resolution must be >= 1");
  if (c.truncation < 1) invalid("truncation must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) invalid("alpha must be in (0, 1)");
  if (c.slices < 2) invalid("slices must be >= 2");
  if (!(c.max_excluded >= 0.0 && c.max_excluded <= 1.0)) invalid("max_excluded must be in [0, 1]");
  if (!(c.zoom_window >= 1.0)) invalid("zoom_window must be >= 1 (marginals are read at time 1)");
  if (!(c.scale_range_factor >= 1.0)) invalid("scale_range_factor must be >= 1");
  if (!(c.rate_min < c.rate_max)) invalid("rate_min must be below rate_max");

  std::size_t n = 0;
  try {
    n = c.n_steps();
  } catch (const Error& e) {
    invalid(e.what());
  }
  for (double e : c.eps) {
    if (!(e > 0.0) || e > c.horizon) invalid("every eps must be in (0, horizon]");
    std::size_t s = 0;
    try {
      s = c.stride(e);
    } catch (const Error& err) {
      invalid(err.what());
    }
    if (static_cast<double>(s) < c.resolution) {
      invalid("eps = " + std::to_string(e) + " gives eps/dt = " + std::to_string(s) +
              ", below the resolution ratio " + std::to_string(c.resolution));
    }
    if (n % s != 0) {
      invalid("eps = " + std::to_string(e) + " does not divide the horizon grid evenly");
    }
  }
  const double t = c.at_time();
  if (!(t > 0.0 && t < c.horizon)) invalid("zoom_time must be interior to (0, horizon)");
  try {
    grid_steps(t, c.dt, "zoom_time");
  } catch (const Error& e) {
    invalid(e.what());
  }
  c.make_model();
}

nlohmann::ordered_json config_echo(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = params;
  j["horizon"] = c.horizon;
  j["dt"] = c.dt;
  j["eps"] = c.eps;
  j["paths"] = c.paths;
  j["seed"] = c.seed;
  j["resolution"] = c.resolution;
  j["truncation"] = c.truncation;
  j["reference_samples"] = c.reference_samples;
  j["zoom_time"] = c.at_time();
  j["zoom_window"] = c.zoom_window;
  j["alpha"] = c.alpha;
  j["slices"] = c.slices;
  j["max_excluded"] = c.max_excluded;
  j["ks_threshold"] = c.ks_threshold;
  j["conjecture_threshold"] = c.conjecture_threshold;
  j["uniform_threshold"] = c.uniform_threshold;
  j["arcsine_threshold"] = c.arcsine_threshold;
  j["boundary_fraction"] = c.boundary_fraction;
  j["rate_bounds"] = {c.rate_min, c.rate_max};
  j["scale_route"] = c.scale_route;
  j["scale_range_factor"] = c.scale_range_factor;
  j["scale_tolerance"] = c.scale_tolerance;
  return j;
}

}  // namespace diffzoom

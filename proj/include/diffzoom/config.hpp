#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "diffzoom/model.hpp"

namespace diffzoom {

/// Settings shared by every experiment. Read from flat `key = value` text.
struct ExperimentConfig {
  std::string model = "bm";
  /// Only the coefficients that were set: sigma0, mu0, theta, x0.
  ModelParams params{{"sigma0", 1.0}};
  double horizon = 1.0;
  /// Fine Euler step.
  double dt = 1e-4;
  std::vector<double> eps{1e-2};
  std::size_t paths = 1000;
  std::uint64_t seed = 0xD1FF;
  /// Minimum eps / dt.
  double resolution = 100.0;
  int truncation = 8;
  std::size_t reference_samples = 100000;
  /// Worker count; 0 means machine parallelism. Never affects results.
  unsigned threads = 0;
  std::string output_dir = "diffzoom-out";
  /// Fixed zoom time; defaults to horizon / 2.
  std::optional<double> zoom_time;
  /// Rescaled window on each side of the zoom point.
  double zoom_window = 1.0;
  double alpha = 0.001;
  std::size_t slices = 4;
  double max_excluded = 0.2;
  double ks_threshold = 0.05;
  double conjecture_threshold = 0.07;
  double uniform_threshold = 0.03;
  double arcsine_threshold = 0.02;
  double boundary_fraction = 0.01;
  double rate_min = 0.45;
  double rate_max = 0.55;
  /// Also run the supremum zoom through the scale-function transform.
  bool scale_route = false;
  double scale_range_factor = 1.5;
  double scale_tolerance = 1e-10;

  std::size_t n_steps() const;
  double at_time() const;
  /// Fine steps per eps.
  std::size_t stride(double epsilon) const;
  DiffusionModel make_model() const;
};

/// Every recognised key, in echo order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Throws kUnknownKey or kConfigParse.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Applies a `key=value` override.
void apply_override(ExperimentConfig& config, const std::string& assignment);

/// Parses `key = value` lines; `#` starts a comment. Later keys win.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});

/// Reads and parses a file. Throws kConfigNotFound if it cannot be opened.
ExperimentConfig load_config(const std::string& file, ExperimentConfig base = {});

/// Grid and range checks. Throws kConfigInvalid, or the model's own error.
void validate_config(const ExperimentConfig& config);

/// Parses a real number, also accepting `2^-k` and `2^k`.
double parse_real(const std::string& text);

/// Result-relevant settings (worker count and output directory are omitted).
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

}  // namespace diffzoom

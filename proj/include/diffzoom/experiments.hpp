#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "diffzoom/config.hpp"
#include "diffzoom/pathops.hpp"
#include "diffzoom/stats.hpp"

namespace diffzoom {

/// How a check enters the overall verdict. Only kAsserted checks decide it;
/// kConjecture marks agreement with an unproven limit.
enum class CheckKind { kAsserted, kRecorded, kConjecture };

const char* to_string(CheckKind kind) noexcept;

struct Check {
  /// Acceptance criterion the check belongs to, e.g. "C2".
  std::string criterion;
  std::string id;
  std::string description;
  CheckKind kind = CheckKind::kAsserted;
  double value = 0.0;
  /// Human-readable condition on value, e.g. "< 0.05" or "in [0.45, 0.55]".
  std::string condition;
  bool pass = false;
};

/// One row of the per-sample CSV.
struct SampleRow {
  std::uint64_t path_id = 0;
  double epsilon = 0.0;
  const char* statistic = "";
  double value = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json config;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  /// Wall clock, throughput and worker count. The only run-dependent block.
  nlohmann::ordered_json timing = nlohmann::ordered_json::object();
  std::vector<SampleRow> samples;

  /// True iff every asserted check passes.
  bool passed() const noexcept;
  const Check* find(const std::string& id) const noexcept;
  nlohmann::ordered_json to_json() const;
};

/// Report name -> file stem used by write_report.
void write_report(const ExperimentReport& report, const std::string& directory);

/// JSON form of a KS result.
nlohmann::ordered_json ks_json(const KSResult& result);
nlohmann::ordered_json mixing_json(const MixingReport& report);

/// Zoom at a fixed interior time: forward and backward marginals at rescaled
/// time 1, normalized by diffusion(X_t), against N(0, 1), plus mixing checks.
ExperimentReport run_zoom_at_fixed_time(const ExperimentConfig& config);

/// Location of the last argmax on [0, horizon] against the arcsine law.
ExperimentReport run_argmax_boundary(const ExperimentConfig& config);

/// Zoom at the supremum: pre/post marginals at rescaled times 1/4 and 1,
/// normalized by -diffusion(sup), against Bessel-3. With scale_route the same
/// pipeline also runs on the driftless transformed model with common seeds.
ExperimentReport run_zoom_at_supremum(const ExperimentConfig& config);

/// Supremum estimation from the shifted grid eps (N_0 + U): sandwich
/// inequality, lower-bound and full-error laws, error rate, and the
/// fractional-offset law on the unshifted grid.
ExperimentReport run_sup_estimation(const ExperimentConfig& config);

/// Supremum estimate of one fine-grid path from the subgrid
/// {offset, offset + stride, ...}, with eps = stride * path.step.
struct ShiftedGridEstimate {
  double estimate = 0.0;
  /// eps^{-1/2} (estimate - sup).
  double scaled_error = 0.0;
  /// eps^{-1/2} (X at the first subgrid time at or after the argmax - sup);
  /// NaN when that time lies beyond the horizon.
  double scaled_lower_bound = 0.0;
  /// Fractional part of -argmax / eps (the offset of the unshifted grid).
  double fractional_offset = 0.0;
  /// 0 >= scaled_error >= scaled_lower_bound (the lower bound part is
  /// vacuous when it is NaN).
  bool sandwich_holds = false;
};

ShiftedGridEstimate estimate_on_shifted_grid(const Path& path, const SupremumRecord& sup,
                                             std::size_t stride, std::size_t offset);

/// Analytic KS distance between N(shift, 1) and N(0, 1).
double shifted_normal_ks(double shift);

}  // namespace diffzoom

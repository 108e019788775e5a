#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "diffzoom/model.hpp"
#include "diffzoom/rng.hpp"

namespace diffzoom {

/// Values of a process on the uniform grid {0, step, 2 step, ...}.
struct Path {
  double step = 1.0;
  std::vector<double> values;
  std::string model_name;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t last_index() const noexcept { return values.size() - 1; }
  double horizon() const noexcept { return step * static_cast<double>(values.size() - 1); }
  double time_at(std::size_t k) const noexcept { return step * static_cast<double>(k); }
};

/// Euler-Maruyama on n_steps uniform steps of [0, horizon]:
///   x[k+1] = x[k] + drift(x[k]) dt + diffusion(x[k]) sqrt(dt) Z_k
/// with Z_k = normal_at(seeds, lane::kIncrements, k). Throws kNonfinite with
/// the offending step index if the scheme blows up.
Path simulate_path(const DiffusionModel& model, double horizon, std::size_t n_steps,
                   const SeedPlan& seeds);

/// Same as simulate_path but reuses `out`'s storage. Hot-loop variant.
void simulate_path_into(Path& out, const DiffusionModel& model, double horizon,
                        std::size_t n_steps, const SeedPlan& seeds);

/// Observations at indices offset, offset + stride, ... of the parent grid.
Path restrict_to_subgrid(const Path& path, std::size_t stride, std::size_t offset);

/// Writes `t,x` rows (with header) for debugging.
void write_path_csv(const Path& path, const std::string& file);

}  // namespace diffzoom

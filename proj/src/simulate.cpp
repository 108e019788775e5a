#include "diffzoom/simulate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "diffzoom/error.hpp"

namespace diffzoom {

void simulate_path_into(Path& out, const DiffusionModel& model, double horizon,
                        std::size_t n_steps, const SeedPlan& seeds) {
  if (n_steps == 0 || !(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "simulate_path needs n_steps >= 1 and horizon > 0");
  }
  const double dt = horizon / static_cast<double>(n_steps);
  const double sqrt_dt = std::sqrt(dt);

  out.step = dt;
  out.model_name = model.name;
  out.seed = seeds.master_seed;
  out.stream_index = seeds.stream_index;
  out.values.resize(n_steps + 1);

  NormalStream normals(seeds, lane::kIncrements);
  double x = model.initial_value;
  out.values[0] = x;
  for (std::size_t k = 0; k < n_steps; ++k) {
    x += model.drift(x) * dt + model.diffusion(x) * sqrt_dt * normals();
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonfinite,
                  "nonfinite value in model '" + model.name + "' at step " + std::to_string(k));
    }
    out.values[k + 1] = x;
  }
}

Path simulate_path(const DiffusionModel& model, double horizon, std::size_t n_steps,
                   const SeedPlan& seeds) {
  Path path;
  simulate_path_into(path, model, horizon, n_steps, seeds);
  return path;
}

Path restrict_to_subgrid(const Path& path, std::size_t stride, std::size_t offset) {
  if (stride == 0) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  if (offset >= path.size()) {
    throw Error(ErrorCode::kEmptyResult, "subgrid offset beyond the end of the path");
  }
  Path sub = path;
  sub.values.clear();
  sub.values.reserve((path.size() - offset + stride - 1) / stride);
  for (std::size_t k = offset; k < path.size(); k += stride) sub.values.push_back(path.values[k]);
  sub.step = path.step * static_cast<double>(stride);
  return sub;
}

void write_path_csv(const Path& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file);
  out << "t,x\n" << std::setprecision(17);
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << path.time_at(k) << ',' << path.values[k] << '\n';
  }
}

}  // namespace diffzoom

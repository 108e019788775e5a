#pragma once

#include <cstddef>
#include <vector>

#include "diffzoom/model.hpp"
#include "diffzoom/simulate.hpp"

namespace diffzoom {

/// Supremum of a grid path and the LAST grid time at which it is attained.
struct SupremumRecord {
  double sup_value = 0.0;
  double argmax_time = 0.0;
  std::size_t argmax_index = 0;
};

/// A path that lives on [0, kill_time] and is undefined (killed) afterwards.
///
/// Grid convention: values[k] sits at time k * step and is stored for every
/// k * step <= kill_time, so the boundary point of the parent path is kept
/// whenever it falls on the grid. A kill_time of 0 leaves the single value at
/// time 0; such a path is `degenerate`.
struct KilledPath {
  double step = 1.0;
  std::vector<double> values;
  double kill_time = 0.0;

  bool degenerate() const noexcept { return kill_time <= 0.0; }
  std::size_t size() const noexcept { return values.size(); }

  /// Value at time t. t must lie on the grid (to 1e-9 of a step) and not
  /// beyond kill_time; otherwise throws kGridMisalignment / kWindowOutOfRange.
  double at(double t) const;
};

/// Backward ("pre") and forward ("post") views of a path around a reference
/// time, in rescaled coordinates.
struct ZoomedPair {
  KilledPath pre;
  KilledPath post;
  double epsilon = 1.0;
  double scale_factor = 1.0;  // epsilon^{-1/2}
};

struct ZoomOptions {
  /// Minimum number of fine-grid steps per unit of rescaled time.
  double min_resolution = 100.0;
};

SupremumRecord supremum(const Path& path);

/// pre.values[k] = X(m - k dt) - sup, post.values[k] = X(m + k dt) - sup,
/// kill times m and horizon - m. epsilon = 1.
ZoomedPair pre_post_supremum(const Path& path);

/// post.values[k] = eps^{-1/2} (X(a + eps t_k) - X(a)),
/// pre.values[k]  = eps^{-1/2} (X(a - eps t_k) - X(a)), t_k = k dt / eps, t_k <= window.
ZoomedPair zoom_fixed(const Path& path, double at_time, double epsilon, double window,
                      const ZoomOptions& options = {});

/// pre_post_supremum with time compressed by eps and values scaled by eps^{-1/2}.
ZoomedPair zoom_supremum(const Path& path, double epsilon, const ZoomOptions& options = {});

/// Zooms an already zoomed pair again at its origin: the result equals a single
/// zoom with the product of the two epsilons.
ZoomedPair rezoom(const ZoomedPair& pair, double epsilon);

/// Knot table of a piecewise-linear function.
struct FunctionTable {
  std::vector<double> x;
  std::vector<double> y;

  /// Linear interpolation; clamps to the end values outside the knot range.
  double operator()(double at) const;
};

/// t -> [X]_t = int_0^t diffusion^2(X_s) ds by the trapezoidal rule on the grid.
FunctionTable quadratic_variation(const Path& path, const DiffusionModel& model);

/// Inverse time change s -> tau_s of a strictly increasing table.
FunctionTable time_change_inverse(const FunctionTable& qv_table);

/// Number of fine steps in `length`, which must be an integer multiple of
/// `step` to relative precision 1e-9. Throws kGridMisalignment otherwise.
std::size_t grid_steps(double length, double step, const char* what);

}  // namespace diffzoom

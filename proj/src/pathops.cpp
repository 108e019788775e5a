#include "diffzoom/pathops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diffzoom/error.hpp"

namespace diffzoom {

std::size_t grid_steps(double length, double step, const char* what) {
  if (!(step > 0.0) || !(length >= 0.0) || !std::isfinite(length)) {
    throw Error(ErrorCode::kGridMisalignment,
                std::string(what) + ": length and step must be finite and positive");
  }
  const double ratio = length / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::kGridMisalignment,
                std::string(what) + " = " + std::to_string(length) +
                    " is not an integer multiple of the grid step " + std::to_string(step));
  }
  return static_cast<std::size_t>(rounded);
}

double KilledPath::at(double t) const {
  const double ratio = t / step;
  const double rounded = std::round(ratio);
  if (!(t >= 0.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::kGridMisalignment,
                "time " + std::to_string(t) + " is not on the killed path's grid");
  }
  const auto k = static_cast<std::size_t>(rounded);
  if (k >= values.size()) {
    throw Error(ErrorCode::kWindowOutOfRange,
                "time " + std::to_string(t) + " is beyond the kill time " +
                    std::to_string(kill_time));
  }
  return values[k];
}

SupremumRecord supremum(const Path& path) {
  if (path.values.empty()) throw Error(ErrorCode::kInvalidArgument, "supremum of an empty path");
  SupremumRecord rec{path.values[0], 0.0, 0};
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path.values[k] >= rec.sup_value) {
      rec.sup_value = path.values[k];
      rec.argmax_index = k;
    }
  }
  rec.argmax_time = path.time_at(rec.argmax_index);
  return rec;
}

namespace {

// Both sides of the supremum, compressed by eps (stride fine steps per unit).
ZoomedPair split_at_supremum(const Path& path, double epsilon) {
  const SupremumRecord rec = supremum(path);
  const double scale = 1.0 / std::sqrt(epsilon);
  const std::size_t m = rec.argmax_index;
  const std::size_t n = path.last_index();

  ZoomedPair pair;
  pair.epsilon = epsilon;
  pair.scale_factor = scale;
  pair.pre.step = pair.post.step = path.step / epsilon;
  pair.pre.kill_time = rec.argmax_time / epsilon;
  pair.post.kill_time = (path.horizon() - rec.argmax_time) / epsilon;

  pair.pre.values.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    pair.pre.values[k] = scale * (path.values[m - k] - rec.sup_value);
  }
  pair.post.values.resize(n - m + 1);
  for (std::size_t k = 0; k <= n - m; ++k) {
    pair.post.values[k] = scale * (path.values[m + k] - rec.sup_value);
  }
  return pair;
}

std::size_t checked_stride(const Path& path, double epsilon, const ZoomOptions& options) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  const std::size_t stride = grid_steps(epsilon, path.step, "epsilon");
  if (stride == 0 || static_cast<double>(stride) < options.min_resolution * (1.0 - 1e-12)) {
    throw Error(ErrorCode::kGridMisalignment,
                "epsilon / dt = " + std::to_string(stride) + " is below the resolution rule " +
                    std::to_string(options.min_resolution));
  }
  return stride;
}

}  // namespace

ZoomedPair pre_post_supremum(const Path& path) { return split_at_supremum(path, 1.0); }

ZoomedPair zoom_supremum(const Path& path, double epsilon, const ZoomOptions& options) {
  checked_stride(path, epsilon, options);
  return split_at_supremum(path, epsilon);
}

ZoomedPair zoom_fixed(const Path& path, double at_time, double epsilon, double window,
                      const ZoomOptions& options) {
  const std::size_t stride = checked_stride(path, epsilon, options);
  if (!(window > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zoom window must be positive");
  const std::size_t a = grid_steps(at_time, path.step, "zoom time");
  const std::size_t n = path.last_index();
  const auto reach =
      static_cast<std::size_t>(std::floor(window * static_cast<double>(stride) + 1e-9));
  if (a > n || reach > a || a + reach > n) {
    throw Error(ErrorCode::kWindowOutOfRange,
                "zoom window of " + std::to_string(window) + " at time " +
                    std::to_string(at_time) + " exceeds the simulated data");
  }

  const double scale = 1.0 / std::sqrt(epsilon);
  ZoomedPair pair;
  pair.epsilon = epsilon;
  pair.scale_factor = scale;
  pair.pre.step = pair.post.step = path.step / epsilon;
  pair.pre.kill_time = pair.post.kill_time = window;
  pair.pre.values.resize(reach + 1);
  pair.post.values.resize(reach + 1);
  const double anchor = path.values[a];
  for (std::size_t k = 0; k <= reach; ++k) {
    pair.post.values[k] = scale * (path.values[a + k] - anchor);
    pair.pre.values[k] = scale * (path.values[a - k] - anchor);
  }
  return pair;
}

ZoomedPair rezoom(const ZoomedPair& pair, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  const double scale = 1.0 / std::sqrt(epsilon);
  auto rescale = [&](const KilledPath& in) {
    KilledPath out;
    out.step = in.step / epsilon;
    out.kill_time = in.kill_time / epsilon;
    out.values.resize(in.values.size());
    const double origin = in.values.empty() ? 0.0 : in.values[0];
    for (std::size_t k = 0; k < in.values.size(); ++k) {
      out.values[k] = scale * (in.values[k] - origin);
    }
    return out;
  };
  ZoomedPair out;
  out.pre = rescale(pair.pre);
  out.post = rescale(pair.post);
  out.epsilon = pair.epsilon * epsilon;
  out.scale_factor = pair.scale_factor * scale;
  return out;
}

double FunctionTable::operator()(double at) const {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "empty function table");
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (at - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + w * (y[hi] - y[lo]);
}

FunctionTable quadratic_variation(const Path& path, const DiffusionModel& model) {
  FunctionTable qv;
  qv.x.resize(path.size());
  qv.y.resize(path.size());
  double previous = model.diffusion(path.values[0]);
  previous *= previous;
  double acc = 0.0;
  qv.x[0] = 0.0;
  qv.y[0] = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    double s = model.diffusion(path.values[k]);
    s *= s;
    acc += 0.5 * path.step * (previous + s);
    previous = s;
    qv.x[k] = path.time_at(k);
    qv.y[k] = acc;
  }
  return qv;
}

FunctionTable time_change_inverse(const FunctionTable& qv_table) {
  for (std::size_t k = 1; k < qv_table.y.size(); ++k) {
    if (!(qv_table.y[k] > qv_table.y[k - 1])) {
      throw Error(ErrorCode::kNonMonotone,
                  "quadratic variation is not strictly increasing at knot " + std::to_string(k));
    }
  }
  return FunctionTable{qv_table.y, qv_table.x};
}

}  // namespace diffzoom

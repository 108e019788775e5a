#include "diffzoom/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "diffzoom/config.hpp"
#include "diffzoom/error.hpp"
#include "diffzoom/experiments.hpp"
#include "diffzoom/reference.hpp"
#include "diffzoom/scale.hpp"
#include "diffzoom/simulate.hpp"

namespace diffzoom {

namespace {

struct Invocation {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string seed;
};

struct GridOptions {
  std::string law = "bessel3";
  double t = 1.0;
  std::optional<double> xmin;
  std::optional<double> xmax;
  std::size_t points = 500;
};

ExperimentConfig resolve_config(const Invocation& inv) {
  ExperimentConfig config;
  if (!inv.config_file.empty()) config = load_config(inv.config_file);
  for (const auto& o : inv.overrides) apply_override(config, o);
  if (const char* env = std::getenv("DIFFZOOM_SEED"); env != nullptr && *env != '\0') {
    set_config_value(config, "seed", env);
  }
  if (!inv.seed.empty()) set_config_value(config, "seed", inv.seed);
  if (!inv.out_dir.empty()) config.output_dir = inv.out_dir;
  return config;
}

std::ofstream open_output(const std::string& directory, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + directory + "': " + ec.message());
  const auto file = (std::filesystem::path(directory) / name).string();
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + file + "'");
  out << std::setprecision(17);
  return out;
}

using Runner = ExperimentReport (*)(const ExperimentConfig&);

int run_experiments(const ExperimentConfig& config, const std::vector<Runner>& runners,
                     std::ostream& out) {
  bool all_pass = true;
  for (Runner runner : runners) {
    const ExperimentReport report = runner(config);
    write_report(report, config.output_dir);
    std::size_t asserted = 0, passed = 0;
    for (const auto& c : report.checks) {
      if (c.kind != CheckKind::kAsserted) continue;
      ++asserted;
      passed += c.pass ? 1 : 0;
    }
    out << report.experiment << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << passed
        << "/" << asserted << " asserted checks, "
        << std::setprecision(3) << report.timing["wall_seconds"].get<double>() << " s) -> "
        << (std::filesystem::path(config.output_dir) / (report.experiment + ".json")).string()
        << '\n';
    for (const auto& c : report.checks) {
      if (c.kind == CheckKind::kAsserted && !c.pass) {
        out << "  failed " << c.criterion << " " << c.id << ": " << c.value << " "
            << c.condition << '\n';
      }
    }
    all_pass = all_pass && report.passed();
  }
  return all_pass ? kExitPass : kExitCriterionFailure;
}

int run_simulate(const ExperimentConfig& config, std::uint64_t path_index, std::ostream& out) {
  validate_config(config);
  const Path path = simulate_path(config.make_model(), config.horizon, config.n_steps(),
                                  {config.seed, path_index});
  std::filesystem::create_directories(config.output_dir);
  const auto file = (std::filesystem::path(config.output_dir) / "path.csv").string();
  write_path_csv(path, file);
  out << "simulate: " << path.size() << " points of " << config.model << " -> " << file << '\n';
  return kExitPass;
}

void write_grid(std::ostream& csv, const char* header, double lo, double hi, std::size_t points,
                const std::function<void(std::ostream&, double)>& row) {
  csv << "# diffzoom table schema 1\n" << header << '\n';
  for (std::size_t i = 0; i <= points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
    csv << x << ',';
    row(csv, x);
    csv << '\n';
  }
}

int run_reference(const GridOptions& g, const std::string& out_dir, std::ostream& out) {
  const ReferenceLaw law = reference_law(g.law, g.t);
  const double lo = g.xmin.value_or(std::max(law.support.lo, -5.0));
  const double hi = g.xmax.value_or(std::min(law.support.hi, 5.0));
  if (!(lo < hi) || g.points == 0) {
    throw Error(ErrorCode::kInvalidArgument, "reference grid needs xmin < xmax and points > 0");
  }
  auto row = [&](std::ostream& csv, double x) {
    const double clamped = std::clamp(x, law.support.lo, law.support.hi);
    csv << (x < law.support.lo ? 0.0 : x > law.support.hi ? 1.0 : law.cdf(clamped));
  };
  if (out_dir.empty()) {
    out << std::setprecision(17);
    write_grid(out, "x,cdf", lo, hi, g.points, row);
  } else {
    std::ofstream csv = open_output(out_dir, "reference_" + g.law + ".csv");
    write_grid(csv, "x,cdf", lo, hi, g.points, row);
  }
  return kExitPass;
}

int run_scale_table(const ExperimentConfig& config, const GridOptions& g, std::ostream& out) {
  const DiffusionModel model = config.make_model();
  const double x0 = model.initial_value;
  const Interval range{g.xmin.value_or(x0 - 1.0), g.xmax.value_or(x0 + 1.0)};
  const ScaleFunction scale = build_scale(model, range, config.scale_tolerance);
  std::ofstream csv = open_output(config.output_dir, "scale_" + config.model + ".csv");
  write_grid(csv, "x,p,dp", range.lo, range.hi, g.points, [&](std::ostream& s, double x) {
    s << scale(x) << ',' << scale.derivative(x);
  });
  out << "scale-table: " << scale.knot_count() << " knots on [" << range.lo << ", " << range.hi
      << "] -> " << (std::filesystem::path(config.output_dir) / ("scale_" + config.model + ".csv")).string()
      << '\n';
  return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"diffzoom: local shape of diffusion paths at fixed times and at the supremum"};
  app.require_subcommand(1);
  Invocation inv;
  GridOptions grid;
  std::uint64_t path_index = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_file, "key = value configuration file");
    sub->add_option("--override", inv.overrides, "key=value applied after the file (repeatable)")
        ->allow_extra_args(false);
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--seed", inv.seed, "master seed (beats DIFFZOOM_SEED and the config)");
  };
  auto grid_options = [&](CLI::App* sub) {
    sub->add_option("--xmin", grid.xmin, "grid start");
    sub->add_option("--xmax", grid.xmax, "grid end");
    sub->add_option("--points", grid.points, "number of grid intervals")->check(CLI::PositiveNumber);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate one path and write path.csv");
  common(simulate);
  simulate->add_option("--path-index", path_index, "stream index of the path");
  CLI::App* zoom_fixed = app.add_subcommand("zoom-fixed", "zoom at a fixed time");
  common(zoom_fixed);
  CLI::App* zoom_sup = app.add_subcommand("zoom-sup", "zoom at the supremum");
  common(zoom_sup);
  CLI::App* estimate_sup = app.add_subcommand("estimate-sup", "supremum estimation from a shifted grid");
  common(estimate_sup);
  CLI::App* argmax = app.add_subcommand("argmax", "argmax location and boundary mass");
  common(argmax);
  CLI::App* all = app.add_subcommand("all", "the four experiments in sequence");
  common(all);
  CLI::App* reference = app.add_subcommand("reference", "CDF table of a reference law");
  reference->add_option("--law", grid.law, "normal, uniform, arcsine, bessel3 or besselU");
  reference->add_option("--t", grid.t, "time of the bessel3 law")->check(CLI::PositiveNumber);
  reference->add_option("--out", inv.out_dir, "output directory (stdout if omitted)");
  grid_options(reference);
  CLI::App* scale_table = app.add_subcommand("scale-table", "scale function table of the model");
  common(scale_table);
  grid_options(scale_table);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error[USAGE]: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (reference->parsed()) return run_reference(grid, inv.out_dir, out);
    const ExperimentConfig config = resolve_config(inv);
    if (simulate->parsed()) return run_simulate(config, path_index, out);
    if (scale_table->parsed()) return run_scale_table(config, grid, out);
    if (zoom_fixed->parsed()) return run_experiments(config, {run_zoom_at_fixed_time}, out);
    if (zoom_sup->parsed()) return run_experiments(config, {run_zoom_at_supremum}, out);
    if (estimate_sup->parsed()) return run_experiments(config, {run_sup_estimation}, out);
    if (argmax->parsed()) return run_experiments(config, {run_argmax_boundary}, out);
    if (all->parsed()) {
      return run_experiments(config,
                             {run_zoom_at_fixed_time, run_argmax_boundary, run_zoom_at_supremum,
                              run_sup_estimation},
                             out);
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error[INTERNAL]: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace diffzoom

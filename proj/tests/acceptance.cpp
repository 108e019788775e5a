// Acceptance suite: one PASS/FAIL line per criterion, fixed master seed 0xD1FF.
// Usage: acceptance [criterion ...]   e.g. `acceptance 2 12`; no arguments runs all.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diffzoom/config.hpp"
#include "diffzoom/experiments.hpp"
#include "diffzoom/parallel.hpp"
#include "diffzoom/reference.hpp"
#include "diffzoom/stats.hpp"

using namespace diffzoom;

namespace {

constexpr std::uint64_t kSeed = 0xD1FF;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("C%-2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

ExperimentConfig base(const std::string& model, const ModelParams& params, double dt,
                      std::vector<double> eps, std::size_t paths) {
  ExperimentConfig c;
  c.model = model;
  c.params = params;
  c.dt = dt;
  c.eps = std::move(eps);
  c.paths = paths;
  c.seed = kSeed;
  c.output_dir = "acceptance-out";
  return c;
}

const Check& need(const ExperimentReport& r, const std::string& id) {
  const Check* c = r.find(id);
  if (c == nullptr) {
    std::fprintf(stderr, "missing check %s in %s\n", id.c_str(), r.experiment.c_str());
    std::exit(2);
  }
  return *c;
}

std::string describe(const Check& c) { return c.id + " = " + num(c.value) + " (" + c.condition + ")"; }

ExperimentReport run_and_save(ExperimentReport (*fn)(const ExperimentConfig&),
                              const ExperimentConfig& c, const std::string& tag) {
  ExperimentReport r = fn(c);
  r.experiment += "_" + tag;
  write_report(r, c.output_dir);
  return r;
}

double pow2(int k) { return std::ldexp(1.0, k); }

ExperimentConfig criterion2_config() {
  return base("bm", {{"sigma0", 1.0}}, 1e-5, {1e-2}, 2000);
}

void criterion1() {
  const std::vector<std::pair<std::string, ModelParams>> catalog = {
      {"bm", {{"sigma0", 1.0}}},
      {"bm_drift", {{"mu0", 1.0}, {"sigma0", 1.0}}},
      {"ou", {{"theta", 1.0}, {"sigma0", 1.0}}},
      {"gbm", {{"sigma0", 0.5}, {"x0", 1.0}}},
  };
  const auto start = std::chrono::steady_clock::now();
  double violations = 0;
  bool pass = true;
  std::string detail;
  for (const auto& [model, params] : catalog) {
    auto c = base(model, params, pow2(-17), {pow2(-6), pow2(-8), pow2(-10)}, 1000);
    const auto r = run_and_save(run_sup_estimation, c, "c1_" + model);
    const Check& v = need(r, "sandwich_violations");
    violations += v.value;
    pass = pass && v.pass;
    detail += model + ":" + num(v.value) + " ";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail += "violations; runtime " + num(seconds) + " s (<= 60)";
  report(1, "sandwich exactness, 4 models x 1000 paths x 3 eps", {pass && seconds <= 60.0, detail});
}

void criterion2() {
  const auto r = run_and_save(run_zoom_at_supremum, criterion2_config(), "c2");
  const Check& post = need(r, "post_bessel3_ks");
  const Check& pre = need(r, "pre_bessel3_ks");
  report(2, "Bessel-3 limit at the supremum (bm, eps=1e-2)",
         {post.pass && pre.pass, describe(post) + ", " + describe(pre)});
}

void criterion3() {
  auto c = base("ou", {{"theta", 1.0}, {"sigma0", 1.0}}, 1e-5, {1e-2}, 2000);
  c.scale_route = true;
  const auto r = run_and_save(run_zoom_at_supremum, c, "c3");
  const Check& eq = need(r, "route_equivalence_ks");
  report(3, "drift-removal route equivalence (ou)", {eq.pass, describe(eq)});
}

void criterion4() {
  const auto c = base("gbm", {{"sigma0", 0.5}, {"x0", 1.0}}, 1e-5, {1e-3}, 5000);
  const auto r = run_and_save(run_zoom_at_fixed_time, c, "c4");
  const Check& f = need(r, "forward_normal_ks");
  const Check& b = need(r, "backward_normal_ks");
  const Check& mf = need(r, "mixing_forward_vs_state");
  const Check& mb = need(r, "mixing_backward_vs_state");
  report(4, "fixed-time zoom normality (gbm, eps=1e-3)",
         {f.pass && b.pass && mf.pass && mb.pass,
          describe(f) + ", " + describe(b) + ", mixing p = " + num(mf.value) + " / " +
              num(mb.value) + " (>= 0.001)"});
}

void criterion5() {
  const auto c = base("bm_drift", {{"mu0", 10.0}, {"sigma0", 1.0}}, 1e-5, {1e-1, 1e-2, 1e-3}, 5000);
  const auto r = run_and_save(run_zoom_at_fixed_time, c, "c5");
  const Check& mono = need(r, "forward_ks_decreasing");
  const Check& last = need(r, "forward_normal_ks");
  std::string detail = "KS by eps:";
  for (const auto& item : r.results["per_eps"]) {
    detail += " " + num(item["forward_normal_ks"]["statistic"].get<double>()) + " (exact " +
              num(item["analytic_forward_normal_ks"].get<double>()) + ")";
  }
  detail += "; monotone " + std::string(mono.pass ? "yes" : "no") + "; " + describe(last);
  report(5, "drift vanishes under scaling (bm_drift mu0=10)", {mono.pass && last.pass, detail});
}

void criteria6to8() {
  std::vector<double> eps;
  for (int k = 6; k <= 12; ++k) eps.push_back(pow2(-k));
  const auto c = base("bm", {{"sigma0", 1.0}}, pow2(-21), eps, 4000);
  const auto r = run_and_save(run_sup_estimation, c, "c6_c8");
  const Check& slope = need(r, "rate_slope");
  report(6, "convergence rate of the shifted-grid estimator",
         {slope.pass, describe(slope) + " +/- " +
                          num(r.results["rate_fit"]["slope_half_width_95"].get<double>())});
  const Check& lb = need(r, "lower_bound_besselU_ks");
  report(7, "lower-bound limit law vs B_U", {lb.pass, describe(lb)});
  const Check& full = need(r, "full_error_limit_ks");
  report(8, "full error vs conjectured limit (conjecture agreement)", {full.pass, describe(full)});
}

void criterion9() {
  const auto c = base("bm", {{"sigma0", 1.0}}, 1e-4, {1e-2}, 10000);
  const auto r = run_and_save(run_argmax_boundary, c, "c9");
  const Check& ks = need(r, "argmax_arcsine_ks");
  const Check& edge = need(r, "argmax_boundary_fraction");
  report(9, "argmax location vs arcsine, boundary mass",
         {ks.pass && edge.pass, describe(ks) + ", " + describe(edge)});
}

void criterion10() {
  const auto c = base("bm", {{"sigma0", 1.0}}, pow2(-15), {pow2(-8)}, 10000);
  const auto r = run_and_save(run_sup_estimation, c, "c10");
  const Check& u = need(r, "fractional_offset_uniform_ks");
  report(10, "unshifted-grid fractional offset vs uniform", {u.pass, describe(u)});
}

void criterion11() {
  const std::size_t n = 100000;
  bool pass = true;
  std::string detail;
  for (const auto& law : {normal_law(), uniform_law(), arcsine_law(), bessel3_law(1.0),
                          besselU_law()}) {
    std::vector<double> xs(n);
    parallel_for(n, 0, [&](std::size_t i, unsigned) { xs[i] = law.sampler({kSeed, i}); });
    const double d = ks_one_sample(EmpiricalDistribution(xs), law).statistic;
    pass = pass && d < 0.01;
    detail += law.name + " " + num(d) + ", ";
  }
  std::vector<double> k5(n), k10(n);
  parallel_for(n, 0, [&](std::size_t i, unsigned) {
    k5[i] = limit_sup_over_shifted_grid(1.0, 5, {kSeed, i});
    k10[i] = limit_sup_over_shifted_grid(1.0, 10, {kSeed, i});
  });
  const double d = ks_two_sample(EmpiricalDistribution(k5), EmpiricalDistribution(k10)).statistic;
  pass = pass && d < 0.01;
  detail += "truncation K=5 vs K=10 " + num(d) + " (all < 0.01)";
  report(11, "reference self-consistency", {pass, detail});
}

void criterion12() {
  auto a = criterion2_config();
  auto b = a;
  a.threads = 1;
  b.threads = 4;
  auto ja = run_zoom_at_supremum(a).to_json();
  auto jb = run_zoom_at_supremum(b).to_json();
  const double threads_a = ja["timing"]["threads"].get<double>();
  const double threads_b = jb["timing"]["threads"].get<double>();
  ja.erase("timing");
  jb.erase("timing");
  const std::string sa = ja.dump(2), sb = jb.dump(2);
  report(12, "report determinism across worker counts",
         {sa == sb, "threads " + num(threads_a) + " vs " + num(threads_b) + ", " +
                        std::to_string(sa.size()) + " bytes, " +
                        (sa == sb ? "identical" : "DIFFERENT")});
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<void()>> suite = {
      {1, criterion1}, {2, criterion2}, {3, criterion3},  {4, criterion4},
      {5, criterion5}, {6, criteria6to8}, {9, criterion9}, {10, criterion10},
      {11, criterion11}, {12, criterion12},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    int id = std::atoi(argv[i]);
    if (id == 7 || id == 8) id = 6;
    if (!suite.count(id)) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    wanted.insert(id);
  }
  for (const auto& [id, run] : suite) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    try {
      run();
    } catch (const std::exception& e) {
      report(id, "aborted", {false, e.what()});
    }
  }
  return g_failures == 0 ? 0 : 1;
}

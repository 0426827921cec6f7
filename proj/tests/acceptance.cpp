// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "delab/cli_runner.hpp"
#include "delab/field_factory.hpp"
#include "delab/parallel.hpp"

using namespace delab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimulationConfig periodic(int n, double alpha) {
  SimulationConfig c;
  c.grid.n = n;
  c.grid.box_length = 2 * kPi;
  c.alpha = alpha;
  return c;
}

double constant(const AuditReport& r, const std::string& key) {
  auto it = r.fitted_constants.find(key);
  return it == r.fitted_constants.end() ? NAN : it->second;
}

// -------------------------------------------------------------------------

Outcome check_taylor_green_exactness() {
  const char* prev = std::getenv("DELAB_THREADS");
  const std::string saved = prev ? prev : "";
  setenv("DELAB_THREADS", "1", 1);
  auto cfg = periodic(64, 0.5);
  cfg.init.kind = InitKind::taylor_green;
  cfg.dt = 1e-3;
  cfg.t_end = 1;
  cfg.output_every = 0.1;
  cfg.checkpoint_every = 0.01;
  const auto t0 = std::chrono::steady_clock::now();
  const auto traj = run(cfg);
  const double secs = seconds_since(t0);
  if (prev) setenv("DELAB_THREADS", saved.c_str(), 1);
  else unsetenv("DELAB_THREADS");
  const auto w0 = taylor_green_vorticity(cfg.grid);
  double err = 0;
  for (const auto& s : traj.checkpoints) err = std::max(err, (s.omega - w0 * std::exp(-cfg.alpha * s.time)).max_abs());
  const bool covered = traj.checkpoints.size() == 101 && std::abs(traj.checkpoints.back().time - 1) < 1e-12;
  return {covered && err <= 1e-8 && secs < 30,
          fmt("max |omega - e^{-at} omega0| = %.3e over %zu times (tol 1e-8), %.2f s single-threaded (limit 30 s)", err,
              traj.checkpoints.size(), secs)};
}

Outcome check_maximum_principle() {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0, total = 0;
  double worst = INFINITY;
  for (int forced = 0; forced < 2; ++forced)
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto cfg = periodic(128, 0.5);
      cfg.init.kind = InitKind::random;
      cfg.init.amplitude = 2;
      cfg.init.seed = seed;
      cfg.t_end = 2;
      cfg.output_every = 0.1;
      if (forced) {
        cfg.forcing.kind = ForcingKind::random;
        cfg.forcing.amplitude = 1;
        cfg.forcing.seed = 100 + seed;
      }
      const auto r = audit_max_principle(run(cfg), cfg.alpha, cfg.forcing.curl(cfg.grid).max_abs(), 1e-6);
      ++total;
      if (r.verdict == Verdict::pass) ++passed;
      worst = std::min(worst, r.margin);
    }
  const double secs = seconds_since(t0);
  return {passed == total && secs < 300,
          fmt("%d/%d runs (20 seeds unforced and forced, n = 128) within 1e-6 |omega0|_inf, min margin %.3e, %.1f s (limit 300 s)",
              passed, total, worst, secs)};
}

Outcome check_enstrophy_equality() {
  auto residual = [](double dt) {
    auto cfg = periodic(64, 0.5);
    cfg.init.kind = InitKind::taylor_green;
    cfg.dt = dt;
    cfg.t_end = 0.2;
    cfg.output_every = 0.2;
    cfg.checkpoint_every = dt;
    const auto r = audit_enstrophy_balance(run(cfg), cfg, 0.3, {kPi, kPi});
    return constant(r, "max_residual");
  };
  const double a = residual(1e-3), b = residual(5e-4);
  return {a <= 1e-5 && a / b >= 3.5,
          fmt("residual %.3e at dt = 1e-3 (tol 1e-5), %.3e at dt = 5e-4, ratio %.2f (need >= 3.5)", a, b, a / b)};
}

Outcome check_pressure_cross_validation() {
  const auto dir = fs::temp_directory_path() / "delab_acceptance_kernelcheck";
  fs::remove_all(dir);
  KernelCheckOptions opt;
  opt.samples = 10;
  opt.n = 256;
  opt.tol = 1e-3;
  opt.output_dir = dir;
  std::ostringstream log;
  const int rc = cmd_kernelcheck(opt, log);
  std::ifstream in(dir / layout::kernel_values);
  std::string line;
  double k11 = NAN, k12 = NAN;
  while (std::getline(in, line)) {
    if (line.rfind("1,1,1.0,0.0,", 0) == 0) k11 = std::stod(line.substr(12));
    if (line.rfind("1,2,1.0,1.0,", 0) == 0) k12 = std::stod(line.substr(12));
  }
  std::ifstream rep(dir / layout::kernel_report);
  std::getline(rep, line);
  const auto pos = line.find("\"max_relative_l2\":");
  const double disc = pos == std::string::npos ? NAN : std::stod(line.substr(pos + 18));
  const bool kernels = std::abs(k11 + 1 / (2 * kPi)) <= 1e-15 && std::abs(k12 + 1 / (4 * kPi)) <= 1e-15;
  return {rc == exit_ok && disc <= 1e-3 && kernels,
          fmt("max relative L2 %.3e over 10 fields at n = 256 (tol 1e-3); CSV K11(1,0) = %.17g, K12(1,1) = %.17g", disc, k11,
              k12)};
}

Outcome check_interpolation_suite() {
  EnsembleSpec spec;
  spec.size = 400;
  spec.seed = 1;
  const auto a1 = audit_interpolation_A1(spec);
  const auto inf = audit_interpolation_inf(spec);
  const auto key = audit_keyest(spec);
  std::vector<AuditReport> all{a1, inf};
  all.insert(all.end(), key.sub_reports.begin(), key.sub_reports.end());
  bool ok = true;
  std::string detail;
  for (const auto& r : all) {
    const double c = constant(r, "C"), ch = constant(r, "relative_change");
    ok = ok && r.verdict == Verdict::pass && std::isfinite(c) && ch < 0.1;
    detail += fmt("%s C = %.4g (change %.2f%%); ", r.estimate_id.c_str(), c, 100 * ch);
  }
  const double floor = 1 / (8 * std::sqrt(kPi));
  ok = ok && constant(a1, "C") >= floor;
  detail += fmt("A1 floor %.4g respected", floor);
  return {ok, detail};
}

Outcome check_yudovich() {
  EnsembleSpec spec;
  spec.size = 50;
  spec.seed = 1;
  const auto r = audit_yudovich_ensemble(spec, 2.0);
  return {r.verdict == Verdict::pass,
          fmt("max_p r(p) / r(4) <= 2 for p in {4..64} over 50 fields: margin %.3f; %s", r.margin, r.notes.c_str())};
}

Outcome check_double_exponential() {
  auto cfg = periodic(64, 0.5);
  cfg.init.kind = InitKind::random;
  cfg.init.seed = 11;
  cfg.t_end = 1;
  cfg.output_every = 0.1;
  InitSpec pert;
  pert.kind = InitKind::mode;
  pert.m1 = 1;
  pert.m2 = 2;
  const auto r = audit_double_exponential(cfg, pert, 1e-4);
  return {r.verdict == Verdict::pass && r.margin >= -1e-10,
          fmt("K = %.4g, L = %.4g fitted at delta0 = 1e-4; held-out delta0/2, delta0/4 margin %.3e (need >= -1e-10)",
              constant(r, "K"), constant(r, "L"), r.margin)};
}

Outcome check_sharpness_alpha0() {
  auto cfg = periodic(32, 0.0);
  cfg.init.kind = InitKind::zero;
  cfg.forcing.kind = ForcingKind::constant;
  cfg.forcing.amplitude = 0.7;
  cfg.forcing.direction = {0.6, 0.8};
  cfg.t_end = 10;
  cfg.output_every = 0.25;
  cfg.extras = {"l2_b"};
  const auto r = audit_growth_alpha0(run(cfg), cfg, 1e-9);
  const double e = constant(r, "max_rel_error");
  return {r.verdict == Verdict::pass && e <= 1e-9,
          fmt("max relative error of |u(t)|_{L2_b} vs t |g|_{L2_b} on [0, 10]: %.3e (tol 1e-9)", e)};
}

Outcome check_weight_lemmas() {
  const auto r = audit_weight_lemmas({1, 2, 4, 8}, 100, 7);
  std::string detail = "R in {1, 2, 4, 8}, 100 center pairs:";
  for (const auto& s : r.sub_reports) detail += fmt(" %s %s (margin %.3g);", s.estimate_id.c_str(), to_string(s.verdict).c_str(), s.margin);
  return {r.verdict == Verdict::pass, detail};
}

Outcome check_commutator() {
  const GridSpec g{128, 2 * kPi};
  const auto w = random_vorticity(g, 6, 4, 1.0);
  const auto r = audit_commutator(biot_savart(w), w, {0.4, 0.2, 0.1});
  const double order = constant(r, "min_order");
  return {r.verdict == Verdict::pass && order >= 1.5,
          fmt("|R_mu|_{L2} for mu = 0.4, 0.2, 0.1: measured order %.3f (need >= 1.5)", order)};
}

Outcome check_vanishing_viscosity() {
  double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {0, 0, 0};
  bool all_pass = true;
  for (double nu : {1e-2, 1e-3, 1e-4, 0.0}) {
    auto cfg = periodic(64, 0.5);
    cfg.nu = nu;
    cfg.init.kind = InitKind::random;
    cfg.init.amplitude = 4;
    cfg.init.seed = 1;
    cfg.forcing.kind = ForcingKind::shear;
    cfg.forcing.amplitude = 0.5;
    cfg.t_end = 10;
    cfg.output_every = 0.2;
    const auto r = audit_dissipative_bound(run(cfg), cfg);
    all_pass = all_pass && r.verdict == Verdict::pass;
    const double v[3] = {constant(r, "beta"), constant(r, "Q0"), constant(r, "Qinf")};
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  double spread[3];
  for (int i = 0; i < 3; ++i) spread[i] = hi[i] > 0 ? (hi[i] - lo[i]) / hi[i] : 0;
  const bool ok = all_pass && spread[0] < 0.25 && spread[1] < 0.25 && spread[2] < 0.25;
  return {ok, fmt("nu in {1e-2, 1e-3, 1e-4, 0}: beta %.3f..%.3f (%.1f%%), Q0 %.3f..%.3f (%.1f%%), Qinf %.3f..%.3f (%.1f%%)", lo[0],
                  hi[0], 100 * spread[0], lo[1], hi[1], 100 * spread[1], lo[2], hi[2], 100 * spread[2])};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"damped Taylor-Green exactness", check_taylor_green_exactness},
      {"maximum principle", check_maximum_principle},
      {"weighted enstrophy equality", check_enstrophy_equality},
      {"pressure cross-validation", check_pressure_cross_validation},
      {"interpolation suite", check_interpolation_suite},
      {"Yudovich W^{1,p} bound", check_yudovich},
      {"double-exponential stability", check_double_exponential},
      {"alpha = 0 sharpness", check_sharpness_alpha0},
      {"weight lemmas", check_weight_lemmas},
      {"commutator order", check_commutator},
      {"vanishing-viscosity uniformity", check_vanishing_viscosity},
  };
  std::cout << "workers: " << worker_count() << "\n";
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << fmt(" [%.1f s]", seconds_since(t0)) << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}

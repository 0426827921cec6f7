#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "delab/checkpoint.hpp"
#include "delab/dynamics.hpp"
#include "delab/field_factory.hpp"

using namespace delab;

namespace {

constexpr double kPi = std::numbers::pi;

SimulationConfig base(int n = 64) {
  SimulationConfig c;
  c.grid.n = n;
  c.grid.box_length = 2 * kPi;
  return c;
}

double tg_error(double alpha, double dt, double t_end) {
  auto cfg = base();
  cfg.alpha = alpha;
  FlowState s{taylor_green_vorticity(cfg.grid), {0, 0}, 0};
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int k = 0; k < steps; ++k) s = step(s, cfg, dt);
  const auto exact = taylor_green_vorticity(cfg.grid) * std::exp(-alpha * t_end);
  return (s.omega - exact).max_abs();
}

}  // namespace

TEST_CASE("zero state stays zero") {
  auto cfg = base(32);
  auto w = step(ScalarField(cfg.grid), cfg, 0.1);
  CHECK(w.max_abs() == 0);
}

TEST_CASE("damped Taylor-Green decays exactly") {
  CHECK(tg_error(0.5, 1e-3, 1.0) <= 1e-8);
}

TEST_CASE("fourth order in time") {
  // Large steps so the truncation error dominates round-off.
  const double e1 = tg_error(2.0, 0.1, 1.0), e2 = tg_error(2.0, 0.05, 1.0);
  const double ratio = e1 / e2;
  CHECK(ratio >= 8);
  CHECK(ratio <= 32);
}

TEST_CASE("ideal flow conserves box energy") {
  auto cfg = base();
  cfg.init.kind = InitKind::random;
  cfg.init.seed = 11;
  cfg.dt = 1e-2;
  cfg.output_every = 0.25;
  const auto rec = run(cfg);
  const double e0 = rec.diagnostics.front().energy;
  for (const auto& d : rec.diagnostics) CHECK(std::abs(d.energy - e0) <= 1e-8 * e0);
  CHECK(rec.times.back() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constant forcing gives spatially constant closed forms") {
  for (double alpha : {0.0, 0.7}) {
    auto cfg = base(32);
    cfg.alpha = alpha;
    cfg.init.kind = InitKind::zero;
    cfg.forcing.kind = ForcingKind::constant;
    cfg.forcing.amplitude = 1.5;
    cfg.forcing.direction = {0.6, 0.8};
    cfg.t_end = 2;
    cfg.output_every = 0.5;
    cfg.extras = {"mean_u1", "mean_u2"};
    const auto rec = run(cfg);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const double t = rec.times[k];
      const double f = alpha > 0 ? (1 - std::exp(-alpha * t)) / alpha : t;
      const auto& d = rec.diagnostics[k];
      CHECK(d.omega_inf == 0);
      if (t == 0) continue;
      CHECK(std::abs(d.extras[0] - 0.9 * f) <= 1e-9 * 0.9 * f);
      CHECK(std::abs(d.extras[1] - 1.2 * f) <= 1e-9 * 1.2 * f);
      const double energy = 0.5 * (0.81 + 1.44) * f * f * 4 * kPi * kPi;
      CHECK(d.energy == doctest::Approx(energy).epsilon(1e-9));
    }
  }
}

TEST_CASE("vanishing viscosity sweep is monotone") {
  auto cfg = base();
  cfg.init.kind = InitKind::random;
  cfg.init.seed = 5;
  cfg.output_every = 1;
  auto final_velocity = [&](double nu) {
    auto c = cfg;
    c.nu = nu;
    c.checkpoint_every = 1;
    return run(c).checkpoints.back().velocity();
  };
  const auto ref = final_velocity(0);
  double prev = INFINITY;
  for (double nu : {1e-2, 1e-3, 1e-4}) {
    const double d = (final_velocity(nu) - ref).l2();
    CHECK(d < prev);
    CHECK(d > 0);
    prev = d;
  }
}

TEST_CASE("cfl time step") {
  GridSpec g;
  g.n = 64;
  auto zero = VectorField(ScalarField(g), ScalarField(g));
  const double dt0 = cfl_dt(zero, g, 0.4);
  CHECK(std::isfinite(dt0));
  CHECK(dt0 > 0);
  auto u = taylor_green_velocity(g, 2.0);
  REQUIRE(u.max_abs() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cfl_dt(u, g, 0.4) == doctest::Approx(0.4 * (2 * kPi / 64) / 2).epsilon(1e-12));
  CHECK(cfl_dt(u, g, 0.4) == doctest::Approx(0.0196).epsilon(2e-3));
  GridSpec g2 = g;
  g2.n = 128;
  CHECK(cfl_dt(taylor_green_velocity(g2, 2.0), g2, 0.4) == doctest::Approx(cfl_dt(u, g, 0.4) / 2).epsilon(1e-12));
  const double h = 2 * kPi / 64;
  CHECK(cfl_dt(u, g, 0.4, 1.0) == doctest::Approx(0.4 * h * h / 4).epsilon(1e-12));
  CHECK_THROWS_AS(cfl_dt(u, g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cfl_dt(u, g, 1.0), std::invalid_argument);
}

TEST_CASE("maximum principle per step") {
  auto cfg = base();
  cfg.alpha = 0.5;
  FlowState s{random_vorticity(cfg.grid, 9, 4, 1.0), {0.3, -0.2}, 0};
  for (int k = 0; k < 40; ++k) {
    const double dt = std::min(cfl_dt(s.velocity(), cfg.grid, cfg.cfl), 0.02 / cfg.alpha);
    const auto next = step(s, cfg, dt);
    CHECK(next.omega.sup_norm() <= (1 + 1e-6) * std::exp(-cfg.alpha * dt) * s.omega.sup_norm());
    s = next;
  }
}

TEST_CASE("vorticity mean is preserved under zero-mean forcing") {
  auto cfg = base();
  cfg.alpha = 0.2;
  cfg.forcing.kind = ForcingKind::random;
  cfg.forcing.amplitude = 0.5;
  cfg.forcing.seed = 4;
  cfg.init.kind = InitKind::random;
  cfg.t_end = 0.5;
  cfg.checkpoint_every = 0.25;
  const auto rec = run(cfg);
  REQUIRE(rec.checkpoints.size() == 3);
  for (const auto& s : rec.checkpoints) CHECK(std::abs(s.omega.mean()) <= 1e-14);
}

TEST_CASE("forcing kinds are divergence free") {
  GridSpec g;
  g.n = 64;
  for (auto k : {ForcingKind::shear, ForcingKind::taylor_green, ForcingKind::random}) {
    ForcingSpec f;
    f.kind = k;
    f.amplitude = 1.3;
    CHECK(relative_divergence(f.velocity(g)) <= 1e-10);
    CHECK((rot(f.velocity(g)) - f.curl(g)).max_abs() <= 1e-10);
    CHECK(forcing_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(forcing_kind_from_string("gusty"), std::invalid_argument);
  CHECK_THROWS_AS(init_kind_from_string("gusty"), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto cfg = base();
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.alpha = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.nu = -1e-3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t_end = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.cfl = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.extras = {"helicity"};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.init.kind = InitKind::mode;
  bad.init.m1 = bad.init.m2 = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("run lands on output times") {
  auto cfg = base(32);
  cfg.init.kind = InitKind::random;
  cfg.t_end = 0.35;
  cfg.output_every = 0.1;
  cfg.extras = {"enstrophy", "l2_b", "theta_energy"};
  const auto rec = run(cfg);
  REQUIRE(rec.times.size() == 5);
  const double expect[] = {0, 0.1, 0.2, 0.3, 0.35};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(rec.times[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    if (k > 0) CHECK(rec.times[k] > rec.times[k - 1]);
    REQUIRE(rec.diagnostics[k].extras.size() == 3);
    for (double v : rec.diagnostics[k].extras) CHECK(std::isfinite(v));
  }
  CHECK(rec.steps >= 4);
}

TEST_CASE("blow-up guard keeps the last valid state") {
  auto cfg = base(32);
  cfg.init.kind = InitKind::random;
  cfg.init.amplitude = 50;
  cfg.dt = 2.0;
  cfg.t_end = 10;
  try {
    run(cfg);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(std::isfinite(e.last_valid.omega.max_abs()));
    CHECK(e.last_valid.time >= 0);
  }
}

TEST_CASE("pair runs") {
  auto cfg = base(32);
  cfg.t_end = 0.5;
  cfg.output_every = 0.1;
  SUBCASE("zero perturbation") {
    InitSpec p;
    p.kind = InitKind::zero;
    const auto r = run_pair(cfg, p);
    for (double d : r.difference.l2) CHECK(d == 0);
    for (double d : r.difference.l2_b) CHECK(d == 0);
  }
  SUBCASE("single mode perturbation") {
    InitSpec p;
    p.kind = InitKind::mode;
    p.amplitude = 1e-4;
    p.m1 = 2;
    p.m2 = 1;
    const auto r = run_pair(cfg, p);
    const double injected = biot_savart(p.vorticity(cfg.grid)).l2();
    CHECK(std::abs(r.difference.l2.front() - injected) <= 1e-12);
    for (std::size_t k = 0; k < r.difference.l2.size(); ++k) {
      CHECK(std::isfinite(r.difference.l2[k]));
      CHECK(r.difference.l2[k] > 0);
      if (k > 0) CHECK(std::abs(r.difference.l2[k] / r.difference.l2[k - 1] - 1) < 0.5);
    }
    // Swapping roles gives the same difference series.
    const auto a = initial_state(cfg);
    auto b = a;
    b.omega = a.omega + p.vorticity(cfg.grid);
    const auto fwd = run_pair(cfg, a, b), bwd = run_pair(cfg, b, a);
    REQUIRE(fwd.difference.l2.size() == bwd.difference.l2.size());
    for (std::size_t k = 0; k < fwd.difference.l2.size(); ++k)
      CHECK(fwd.difference.l2[k] == doctest::Approx(bwd.difference.l2[k]).epsilon(1e-12));
  }
  SUBCASE("large perturbation rejected") {
    InitSpec p;
    p.kind = InitKind::mode;
    p.amplitude = 0.5;
    CHECK_THROWS_AS(run_pair(cfg, p), PerturbationTooLarge);
  }
}

TEST_CASE("checkpoint round trip") {
  GridSpec g;
  g.n = 32;
  g.box_length = 9.5;
  FlowState s{random_vorticity(g, 3, 5, 2.0), {0.25, -1.5}, 0.75};
  const auto dir = std::filesystem::temp_directory_path() / "delab_ck_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.bin";
  write_checkpoint(path, s);
  CHECK(std::filesystem::file_size(path) == 8 + 4 + 5 * 8 + 32 * 32 * 8);
  CHECK_FALSE(std::filesystem::exists(dir / "a.bin.tmp"));
  const auto r = read_checkpoint(path);
  CHECK(r.omega.grid() == g);
  CHECK(r.time == s.time);
  CHECK(r.mean_velocity == s.mean_velocity);
  CHECK(r.omega.values() == s.omega.to_physical().values());

  {
    std::ofstream os(dir / "bad.bin", std::ios::binary);
    os << "NOTACHECKPOINT";
  }
  CHECK_THROWS_AS(read_checkpoint(dir / "bad.bin"), CheckpointError);
  std::filesystem::resize_file(path, 100);
  CHECK_THROWS_AS(read_checkpoint(path), CheckpointError);
  CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), CheckpointError);
  std::filesystem::remove_all(dir);
}

#include "delab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "delab/field_factory.hpp"
#include "delab/weighted_norms.hpp"

namespace delab {

std::string to_string(ForcingKind k) {
  switch (k) {
    case ForcingKind::none: return "none";
    case ForcingKind::constant: return "constant";
    case ForcingKind::shear: return "shear";
    case ForcingKind::taylor_green: return "taylor_green";
    case ForcingKind::random: return "random";
  }
  return "none";
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::zero: return "zero";
    case InitKind::taylor_green: return "taylor_green";
    case InitKind::random: return "random";
    case InitKind::mode: return "mode";
    case InitKind::constant: return "constant";
  }
  return "zero";
}

ForcingKind forcing_kind_from_string(const std::string& s) {
  for (auto k : {ForcingKind::none, ForcingKind::constant, ForcingKind::shear, ForcingKind::taylor_green, ForcingKind::random})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown forcing kind '" + s + "'");
}

InitKind init_kind_from_string(const std::string& s) {
  for (auto k : {InitKind::zero, InitKind::taylor_green, InitKind::random, InitKind::mode, InitKind::constant})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown init kind '" + s + "'");
}

VectorField ForcingSpec::velocity(const GridSpec& g) const {
  const double k = 2 * std::numbers::pi * wavenumber / g.box_length;
  switch (kind) {
    case ForcingKind::none: return {ScalarField(g), ScalarField(g)};
    case ForcingKind::constant:
      return {ScalarField::constant(g, amplitude * direction[0]), ScalarField::constant(g, amplitude * direction[1])};
    case ForcingKind::shear:
      return {ScalarField::from_function(g, [&](double, double y) { return amplitude * std::sin(k * y); }), ScalarField(g)};
    case ForcingKind::taylor_green:
      return {ScalarField::from_function(g, [&](double x, double y) { return -amplitude * std::sin(k * x) * std::cos(k * y); }),
              ScalarField::from_function(g, [&](double x, double y) { return amplitude * std::cos(k * x) * std::sin(k * y); })};
    case ForcingKind::random: return biot_savart(random_vorticity(g, seed, kmax, amplitude));
  }
  return {ScalarField(g), ScalarField(g)};
}

ScalarField ForcingSpec::curl(const GridSpec& g) const {
  if (kind == ForcingKind::none || kind == ForcingKind::constant) return ScalarField(g);
  if (kind == ForcingKind::random) return random_vorticity(g, seed, kmax, amplitude);
  return rot(velocity(g));
}

Point ForcingSpec::mean(const GridSpec&) const {
  if (kind == ForcingKind::constant) return {amplitude * direction[0], amplitude * direction[1]};
  return {0, 0};
}

ScalarField InitSpec::vorticity(const GridSpec& g) const {
  const double k = 2 * std::numbers::pi / g.box_length;
  switch (kind) {
    case InitKind::zero:
    case InitKind::constant: return ScalarField(g);
    case InitKind::taylor_green: return taylor_green_vorticity(g, amplitude);
    case InitKind::random: return random_vorticity(g, seed, kmax, amplitude);
    case InitKind::mode:
      if (m1 == 0 && m2 == 0) throw std::invalid_argument("init mode (0, 0) has nonzero mean");
      return ScalarField::from_function(g, [&](double x, double y) { return amplitude * std::cos(k * (m1 * x + m2 * y)); });
  }
  return ScalarField(g);
}

const std::vector<std::string>& extra_diagnostic_names() {
  static const std::vector<std::string> names{"l2_b", "enstrophy", "theta_energy", "mean_u1", "mean_u2"};
  return names;
}

void SimulationConfig::validate() const {
  grid.validate();
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  need(grid.box_length >= 4, "grid.box_length must be >= 4 (H_b norms use unit balls with R <= L/4)");
  need(alpha >= 0 && std::isfinite(alpha), "physics.alpha must be >= 0");
  need(nu >= 0 && std::isfinite(nu), "physics.nu must be >= 0");
  need(cfl > 0 && cfl < 1, "time.cfl must be in (0, 1)");
  need(t_end > 0 && std::isfinite(t_end), "time.t_end must be > 0");
  need(!dt || (*dt > 0 && std::isfinite(*dt)), "time.dt must be > 0");
  need(output_every > 0, "time.output_every must be > 0");
  need(checkpoint_every >= 0, "time.checkpoint_every must be >= 0");
  need(std::isfinite(forcing.amplitude), "forcing.amplitude must be finite");
  need(forcing.wavenumber >= 1 && forcing.wavenumber <= grid.retained_modes(), "forcing.wavenumber outside the retained band");
  if (forcing.kind == ForcingKind::random)
    need(forcing.kmax >= 1 && forcing.kmax <= grid.retained_modes(), "forcing.kmax outside the retained band");
  if (init.kind == InitKind::random)
    need(init.kmax >= 1 && init.kmax <= grid.retained_modes(), "init.kmax outside the retained band");
  if (init.kind == InitKind::mode)
    need((init.m1 != 0 || init.m2 != 0) && std::max(std::abs(init.m1), std::abs(init.m2)) <= grid.retained_modes(),
         "init mode must be nonzero and inside the retained band");
  for (const auto& e : extras)
    need(std::find(extra_diagnostic_names().begin(), extra_diagnostic_names().end(), e) != extra_diagnostic_names().end(),
         "unknown extra diagnostic '" + e + "'");
  if (forcing.kind != ForcingKind::none && forcing.kind != ForcingKind::constant)
    need(relative_divergence(forcing.velocity(grid)) <= 1e-10, "forcing is not divergence-free");
}

VectorField FlowState::velocity() const {
  return biot_savart(omega).shifted(mean_velocity[0], mean_velocity[1]);
}

FlowState initial_state(const SimulationConfig& cfg) {
  FlowState s;
  s.omega = cfg.init.vorticity(cfg.grid);
  s.mean_velocity = cfg.init.velocity;
  return s;
}

double cfl_dt(const VectorField& u, const GridSpec& g, double cfl, double nu) {
  if (!(cfl > 0 && cfl < 1)) throw std::invalid_argument("cfl must be in (0, 1)");
  const double h = g.spacing();
  double dt = cfl * h / std::max(u.max_abs(), 1e-6);
  if (nu > 0) dt = std::min(dt, cfl * h * h / (4 * nu));
  return dt;
}

namespace {

struct Rhs {
  ScalarField curl_g;
  Point mean_g;
};

// U' = -alpha U + mean(g) is decoupled from omega and solved exactly.
Point mean_after(Point u0, const SimulationConfig& cfg, const Rhs& f, double dt) {
  const double decay = std::exp(-cfg.alpha * dt);
  const double gain = cfg.alpha > 0 ? -std::expm1(-cfg.alpha * dt) / cfg.alpha : dt;
  return {u0[0] * decay + f.mean_g[0] * gain, u0[1] * decay + f.mean_g[1] * gain};
}

ScalarField evaluate(const ScalarField& omega, Point mean, const SimulationConfig& cfg, const Rhs& f) {
  const auto u = biot_savart(omega).shifted(mean[0], mean[1]);
  ScalarField d = -nonlinear_term(u, omega) - omega * cfg.alpha + f.curl_g;
  if (cfg.nu > 0) d = d + laplacian(omega) * cfg.nu;
  return d;
}

FlowState rk4(const FlowState& s, const SimulationConfig& cfg, const Rhs& f, double dt) {
  const Point half = mean_after(s.mean_velocity, cfg, f, dt / 2), full = mean_after(s.mean_velocity, cfg, f, dt);
  const auto k1 = evaluate(s.omega, s.mean_velocity, cfg, f);
  const auto k2 = evaluate(s.omega + k1 * (dt / 2), half, cfg, f);
  const auto k3 = evaluate(s.omega + k2 * (dt / 2), half, cfg, f);
  const auto k4 = evaluate(s.omega + k3 * dt, full, cfg, f);
  return {s.omega + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6), full, s.time + dt};
}

FlowState guarded_step(const FlowState& s, const SimulationConfig& cfg, const Rhs& f, double curl_inf, double dt) {
  FlowState next = rk4(s, cfg, f, dt);
  next.omega = next.omega.to_physical();
  const double before = s.omega.max_abs(), after = next.omega.max_abs();
  if (!std::isfinite(after) || !std::isfinite(next.mean_velocity[0]) || !std::isfinite(next.mean_velocity[1]))
    throw BlowUpError("non-finite state at t = " + std::to_string(next.time), s);
  if (after > 10 * (before + dt * curl_inf))
    throw BlowUpError("vorticity grew more than 10x in one step at t = " + std::to_string(next.time), s);
  return next;
}

}  // namespace

FlowState step(const FlowState& s, const SimulationConfig& cfg, double dt) {
  const Rhs f{cfg.forcing.curl(s.omega.grid()), cfg.forcing.mean(s.omega.grid())};
  return guarded_step(s, cfg, f, f.curl_g.max_abs(), dt);
}

ScalarField step(const ScalarField& omega, const SimulationConfig& cfg, double dt) {
  return step(FlowState{omega, {0, 0}, 0}, cfg, dt).omega;
}

Diagnostics diagnose(const FlowState& s, const std::vector<std::string>& extras) {
  const auto& g = s.omega.grid();
  const auto u = s.velocity();
  Diagnostics d;
  d.omega_inf = s.omega.sup_norm();
  const double l2 = u.l2();
  d.energy = 0.5 * l2 * l2;
  const auto hb = hb_norm(u);
  d.hb_norm = hb.value;
  for (const auto& e : extras) {
    if (e == "l2_b") {
      d.extras.push_back(uniformly_local_norm(u, 2, 1.0).value);
    } else if (e == "enstrophy") {
      const double w = s.omega.l2();
      d.extras.push_back(w * w);
    } else if (e == "theta_energy") {
      const double w = weighted_norm(u, 2, {WeightKind::theta, {g.box_length / 2, g.box_length / 2}, 1});
      d.extras.push_back(w * w);
    } else if (e == "mean_u1") {
      d.extras.push_back(s.mean_velocity[0]);
    } else if (e == "mean_u2") {
      d.extras.push_back(s.mean_velocity[1]);
    } else {
      throw std::invalid_argument("unknown extra diagnostic '" + e + "'");
    }
  }
  return d;
}

namespace {

// Drives one or more states with a shared dt sequence, landing exactly on
// output and checkpoint times.
void integrate(const SimulationConfig& cfg, std::vector<FlowState>& states,
               const std::function<void(bool output, bool checkpoint)>& on_event, std::size_t& steps) {
  const Rhs f{cfg.forcing.curl(cfg.grid), cfg.forcing.mean(cfg.grid)};
  const double curl_inf = f.curl_g.max_abs();
  long out_k = 1, ck_k = 1;
  const double t0 = states.front().time;
  auto next_out = [&] { return t0 + out_k * cfg.output_every; };
  auto next_ck = [&] { return cfg.checkpoint_every > 0 ? t0 + ck_k * cfg.checkpoint_every : INFINITY; };
  const double t_end = cfg.t_end;
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (states.front().time < t_end - eps) {
    const double t = states.front().time;
    double dt;
    if (cfg.dt) {
      dt = *cfg.dt;
    } else {
      dt = INFINITY;
      for (const auto& s : states) dt = std::min(dt, cfl_dt(s.velocity(), cfg.grid, cfg.cfl, cfg.nu));
      if (cfg.alpha > 0) dt = std::min(dt, 0.02 / cfg.alpha);
    }
    const double target = std::min({next_out(), next_ck(), t_end});
    bool land = false;
    if (t + dt >= target - eps) {
      dt = target - t;
      land = true;
    }
    for (auto& s : states) {
      s = guarded_step(s, cfg, f, curl_inf, dt);
      if (land) s.time = target;
    }
    ++steps;
    if (!land) continue;
    bool out = false, ck = false;
    if (std::abs(target - next_out()) <= eps) {
      out = true;
      ++out_k;
    }
    if (std::abs(target - next_ck()) <= eps) {
      ck = true;
      ++ck_k;
    }
    if (std::abs(target - t_end) <= eps) out = true;
    on_event(out, ck);
  }
}

}  // namespace

TrajectoryRecord run(const SimulationConfig& cfg) { return run(cfg, initial_state(cfg)); }

TrajectoryRecord run(const SimulationConfig& cfg, FlowState start) { return run(cfg, std::move(start), RunHooks{}); }

TrajectoryRecord run(const SimulationConfig& cfg, FlowState start, const RunHooks& hooks) {
  cfg.validate();
  TrajectoryRecord rec;
  rec.extra_names = cfg.extras;
  std::vector<FlowState> states{std::move(start)};
  states[0].omega = states[0].omega.to_physical();
  auto record = [&](bool out, bool ck) {
    const auto& s = states[0];
    if (out && (rec.times.empty() || s.time > rec.times.back())) {
      rec.times.push_back(s.time);
      rec.diagnostics.push_back(diagnose(s, cfg.extras));
      if (hooks.on_output) hooks.on_output(s.time, rec.diagnostics.back());
    }
    if (ck) {
      if (hooks.on_checkpoint) hooks.on_checkpoint(s);
      if (hooks.keep_checkpoints) rec.checkpoints.push_back(s);
    }
  };
  record(true, cfg.checkpoint_every > 0);
  integrate(cfg, states, record, rec.steps);
  return rec;
}

PairResult run_pair(const SimulationConfig& cfg, const InitSpec& perturbation) {
  const FlowState a = initial_state(cfg);
  FlowState b = a;
  b.omega = a.omega + perturbation.vorticity(cfg.grid);
  b.mean_velocity = {a.mean_velocity[0] + perturbation.velocity[0], a.mean_velocity[1] + perturbation.velocity[1]};
  return run_pair(cfg, a, b);
}

PairResult run_pair(const SimulationConfig& cfg, const FlowState& a, const FlowState& b) {
  cfg.validate();
  const double base = a.velocity().l2(), pert = (b.velocity() - a.velocity()).l2();
  if (pert > 1e-2 * base) {
    throw PerturbationTooLarge("perturbation norm " + std::to_string(pert) + " exceeds 1e-2 of the base norm " +
                               std::to_string(base));
  }
  PairResult r;
  r.first.extra_names = r.second.extra_names = cfg.extras;
  std::vector<FlowState> states{a, b};
  for (auto& s : states) s.omega = s.omega.to_physical();
  auto record = [&](bool out, bool ck) {
    if (out && (r.difference.times.empty() || states[0].time > r.difference.times.back())) {
      const auto diff = states[0].velocity() - states[1].velocity();
      r.difference.times.push_back(states[0].time);
      r.difference.l2.push_back(diff.l2());
      r.difference.l2_b.push_back(uniformly_local_norm(diff, 2, 1.0).value);
      for (int k = 0; k < 2; ++k) {
        auto& rec = k == 0 ? r.first : r.second;
        rec.times.push_back(states[k].time);
        rec.diagnostics.push_back(diagnose(states[k], cfg.extras));
      }
    }
    if (ck) {
      r.first.checkpoints.push_back(states[0]);
      r.second.checkpoints.push_back(states[1]);
    }
  };
  record(true, cfg.checkpoint_every > 0);
  std::size_t steps = 0;
  integrate(cfg, states, record, steps);
  r.first.steps = r.second.steps = steps;
  return r;
}

}  // namespace delab

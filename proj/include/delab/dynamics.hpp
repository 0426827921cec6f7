#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delab/spectral_core.hpp"

namespace delab {

enum class ForcingKind { none, constant, shear, taylor_green, random };

/// Time-independent divergence-free forcing g.
///   constant:     g = amplitude * direction
///   shear:        g = (amplitude sin(k x2), 0), k = 2 pi wavenumber / L
///   taylor_green: g = amplitude * Taylor-Green velocity with k = 2 pi wavenumber / L
///   random:       Biot-Savart velocity of random_vorticity(seed, kmax) with sup rot g = amplitude
struct ForcingSpec {
  ForcingKind kind = ForcingKind::none;
  double amplitude = 0;
  Point direction{1, 0};
  int wavenumber = 1;
  std::uint64_t seed = 1;
  int kmax = 3;

  VectorField velocity(const GridSpec& g) const;  // full g including its mean
  ScalarField curl(const GridSpec& g) const;      // rot g
  Point mean(const GridSpec& g) const;            // box mean of g
};

enum class InitKind { zero, taylor_green, random, mode, constant };

/// Initial vorticity plus a spatially constant velocity.
///   taylor_green: amplitude * 2 k sin kx1 sin kx2 (velocity amplitude `amplitude`)
///   random:       random_vorticity(seed, kmax) with grid max = amplitude
///   mode:         amplitude * cos(k (m1 x1 + m2 x2))
///   constant:     zero vorticity; only `velocity` is set
struct InitSpec {
  InitKind kind = InitKind::taylor_green;
  double amplitude = 1;
  std::uint64_t seed = 1;
  int kmax = 4;
  int m1 = 1, m2 = 0;
  Point velocity{0, 0};

  ScalarField vorticity(const GridSpec& g) const;
};

std::string to_string(ForcingKind k);
std::string to_string(InitKind k);
ForcingKind forcing_kind_from_string(const std::string& s);
InitKind init_kind_from_string(const std::string& s);

struct SimulationConfig {
  GridSpec grid;
  double alpha = 0;
  double nu = 0;
  ForcingSpec forcing;
  InitSpec init;
  double cfl = 0.4;
  double t_end = 1;
  std::optional<double> dt;       // fixed step; CFL-adaptive when empty
  double output_every = 0.1;
  double checkpoint_every = 0;    // 0 disables in-memory checkpoints
  std::vector<std::string> extras;  // extra diagnostics, see extra_diagnostic_names()

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Names accepted in SimulationConfig::extras.
const std::vector<std::string>& extra_diagnostic_names();

/// Vorticity, spatially constant velocity component and time.
struct FlowState {
  ScalarField omega;
  Point mean_velocity{0, 0};
  double time = 0;

  VectorField velocity() const;  // mean_velocity + biot_savart(omega)
};

FlowState initial_state(const SimulationConfig& cfg);

struct Diagnostics {
  double omega_inf = 0;  // sup of the vorticity interpolant
  double energy = 0;     // (1/2) int |u|^2 over the box
  double hb_norm = 0;
  std::vector<double> extras;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Diagnostics> diagnostics;
  std::vector<std::string> extra_names;
  std::vector<FlowState> checkpoints;
  std::size_t steps = 0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, FlowState last) : std::runtime_error(what), last_valid(std::move(last)) {}
  FlowState last_valid;
};

class PerturbationTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// dt = cfl h / max(|u|_inf, 1e-6), capped by cfl h^2 / (4 nu) when nu > 0.
/// Throws std::invalid_argument unless 0 < cfl < 1.
double cfl_dt(const VectorField& u, const GridSpec& g, double cfl, double nu = 0);

/// One classical RK4 step of
///   omega' = -u.grad omega - alpha omega + nu Lap omega + rot g,  U' = -alpha U + mean(g)
/// with u = U + biot_savart(omega) refreshed at every stage and dealiased products;
/// the decoupled mean velocity U is advanced exactly.
/// Throws BlowUpError when |omega|_inf exceeds 10 (|omega_old|_inf + dt |rot g|_inf)
/// or becomes non-finite.
FlowState step(const FlowState& s, const SimulationConfig& cfg, double dt);
/// Same for a zero-mean-velocity state.
ScalarField step(const ScalarField& omega, const SimulationConfig& cfg, double dt);

Diagnostics diagnose(const FlowState& s, const std::vector<std::string>& extras);

/// Integrates from initial_state(cfg) to t_end, recording diagnostics at
/// multiples of output_every (steps are shortened to land on them) and
/// checkpoints at multiples of checkpoint_every.
TrajectoryRecord run(const SimulationConfig& cfg);
TrajectoryRecord run(const SimulationConfig& cfg, FlowState start);

/// Callbacks fired as outputs and checkpoints are produced.
struct RunHooks {
  std::function<void(double t, const Diagnostics&)> on_output;
  std::function<void(const FlowState&)> on_checkpoint;
  bool keep_checkpoints = true;  // also collect checkpoints in the record
};
TrajectoryRecord run(const SimulationConfig& cfg, FlowState start, const RunHooks& hooks);

struct DifferenceSeries {
  std::vector<double> times;
  std::vector<double> l2;     // |u1 - u2|_{L^2} over the box
  std::vector<double> l2_b;   // uniformly local L^2 norm on unit balls
};

struct PairResult {
  TrajectoryRecord first, second;
  DifferenceSeries difference;
};

/// Co-integrates u1 from cfg.init and u2 from cfg.init plus the perturbation
/// vorticity (and velocity) with a shared dt sequence. Throws
/// PerturbationTooLarge when |w(0)|_{L^2} > 1e-2 |u1(0)|_{L^2}.
PairResult run_pair(const SimulationConfig& cfg, const InitSpec& perturbation);
PairResult run_pair(const SimulationConfig& cfg, const FlowState& a, const FlowState& b);

}  // namespace delab

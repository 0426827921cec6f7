#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "delab/dynamics.hpp"
#include "delab/singular_kernels.hpp"

namespace delab {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct AuditReport {
  std::string estimate_id;
  Verdict verdict = Verdict::inconclusive;
  double margin = 0;  // >= 0 on pass; meaning documented per audit in notes
  std::map<std::string, double> fitted_constants;
  std::size_t ensemble_size = 0;
  std::string notes;
  std::vector<AuditReport> sub_reports;

  /// One JSON object (sub-reports nested), no trailing newline.
  std::string to_json() const;
};

/// One line per report.
void write_ndjson(std::ostream& os, const std::vector<AuditReport>& reports);
/// estimate_id,verdict,margin,constants with constants as name=value;name=value.
void write_summary_csv(std::ostream& os, const std::vector<AuditReport>& reports);

/// Worst of the verdicts: any fail -> fail, else any inconclusive -> inconclusive.
Verdict combine(const std::vector<AuditReport>& reports);

// ---------------------------------------------------------------------------
// Trajectory audits

/// |omega(t)|_inf <= e^{-at}|omega_0|_inf + (1 - e^{-at})|rot g|_inf / a + tol |omega_0|_inf
/// at every recorded time. margin = min slack / |omega_0|_inf (+ tol).
AuditReport audit_max_principle(const TrajectoryRecord& traj, double alpha, double curl_g_inf, double tol = 1e-6);

/// Fits the dominating envelope hb(t) <= Q0 e^{-beta t} + Qinf (Q0, Qinf >= 0)
/// with the smallest mean excess over the series; beta by 1-D search on
/// [alpha/100, 100 alpha]. Pass iff beta >= alpha/2 - beta_tol alpha (skipped
/// when the series never decays). Fewer than 20 samples -> inconclusive.
AuditReport audit_dissipative_bound(const TrajectoryRecord& traj, const SimulationConfig& cfg, double beta_tol = 0.05);

struct EnstrophyBalanceTerms {
  std::vector<double> times;
  std::vector<double> enstrophy;  // E = int phi omega^2
  std::vector<double> transport;  // T = int (u . grad phi) omega^2
  std::vector<double> forcing;    // F = int rot g omega phi
  std::vector<double> viscous;    // V = int Lap omega omega phi
};

/// Terms of (1/2) E' + a E - (1/2) T = F + nu V at every checkpoint, with the
/// smooth exponential weight (WeightKind::exp_smooth, scale eps, center x0).
EnstrophyBalanceTerms enstrophy_balance_terms(const std::vector<FlowState>& checkpoints, const SimulationConfig& cfg,
                                              double eps, Point x0);

/// Residual of the weighted enstrophy equality from centered differences at
/// interior checkpoints (margin = tol - max |residual|), plus the integrated
/// form between the first and every later checkpoint (trapezoid) as a
/// sub-report. tol = c1 dt^2 Emax + c2 Emax.
AuditReport audit_enstrophy_balance(const TrajectoryRecord& traj, const SimulationConfig& cfg, double eps, Point x0,
                                    double c1 = 10, double c2 = 1e-10);

/// Fits the one-sided constant C in
///   Y' + a Y <= C (|g|^2_phi + R^{-1}|u|^3_{L^3(B^{2R})}) + 2|(grad p, phi u)|,
/// Y = |u|^2_phi with phi the cutoff at (R, x0), on even checkpoints and
/// validates it (10% slack) on odd ones. Sub-report: the pressure pairing
/// against int theta_R |u (x) u|_{L^{3/2}(B^R_x)} dx |phi^{1/2} u|_{L^3}.
AuditReport audit_local_energy_inequality(const TrajectoryRecord& traj, const SimulationConfig& cfg, double R, Point x0);

/// alpha = 0 only (std::invalid_argument otherwise); needs the "l2_b" extra.
/// g = 0: |u|_{L^2_b} <= C (t + 1) with C from t = 0, flatness reported.
/// g constant with constant initial velocity c: |u(t)|_{L^2_b} = |c + t g| sqrt(pi)
/// to rel_tol, and the cubic envelope C (t + 1)^3 dominates.
AuditReport audit_growth_alpha0(const TrajectoryRecord& traj, const SimulationConfig& cfg, double rel_tol = 1e-9);

/// Fits K = max_t (|u1|_{L^2_b} + |u2|_{L^2_b})^2 and the smallest L with
///   z(t) <= K e (z(0)/K)^{e^{-L t}},  z = |u1 - u2|^2_{L^2_b},
/// on the first (largest) series; validates on the rest. margin = min relative
/// slack on held-out series. Saturation (z > sat K) -> inconclusive.
/// `bases` supplies per-series max_t (|u1|_{L^2_b} + |u2|_{L^2_b}).
AuditReport audit_double_exponential(const std::vector<DifferenceSeries>& series, const std::vector<double>& bases,
                                     double saturation = 1e-2);

/// Convenience driver: run_pair with perturbation amplitudes delta0, delta0/2,
/// delta0/4 and feed audit_double_exponential.
AuditReport audit_double_exponential(const SimulationConfig& cfg, const InitSpec& perturbation, double delta0);

// ---------------------------------------------------------------------------
// Ensemble audits

/// Seeded random H_b fields u = U + biot_savart(omega): omega band-limited with
/// kmax in [2, kmax_max], sup |omega| log-uniform in [0.1, 4], U uniform in a
/// disk of radius 2.
struct EnsembleSpec {
  std::size_t size = 400;
  std::uint64_t seed = 1;
  GridSpec grid{64, 32.0};
  std::vector<double> radii{1, 2, 4};
  int centers_per_field = 8;
  int kmax_max = 12;
};

VectorField ensemble_member(const EnsembleSpec& spec, std::size_t index);

/// Per-field ratios at one ball; NaN when both sides vanish (zero filter).
double a1_ratio(const VectorField& u, double R, Point x0);
double inf_ratio(const VectorField& u, double R, Point x0);
struct KeyestRatios {
  double l3 = 0, linf_p4 = 0, ladyzhenskaya = 0;
};
KeyestRatios keyest_ratios(const VectorField& u, double R, Point x0);

/// Plane quadrature of int theta_R(|x|) theta_R(|x - d e1|) dx.
double theta_overlap(double R, double d);

/// |u|^3_{L^3(B^R)} / (R^{-1}|u|^3_{L^2(B^{2R})} + |u|^{5/2}_{L^2(B^{2R})}|omega|^{1/2}_{L^inf(B^{2R})}).
/// Sups over spec.size members and over 2 spec.size members; pass iff finite
/// and the relative change is < 10%, and the sup reaches the constant-field
/// floor 1/(8 sqrt pi).
AuditReport audit_interpolation_A1(const EnsembleSpec& spec);
/// |u|_{L^inf(B^R)} / (|omega|^{1/2}_{L^inf(B^{2R})}|u|^{1/2}_{L^2(B^{2R})} + R^{-1}|u|_{L^2(B^{2R})}).
/// The constant-field value 1/(2 sqrt pi) is reported, not enforced.
AuditReport audit_interpolation_inf(const EnsembleSpec& spec);
/// Fields v = q(|x - x0|/R) u supported in B^{2R}; three sub-reports:
///   L^3 / (L^2^{5/6} (|rot v|_inf + |div v|_inf)^{1/6}),
///   L^inf / (L^2^theta (|rot v|_4 + |div v|_4)^{1-theta}) with p = 4, theta = 1/3,
///   L^4^4 / (L^2^2 (|div v|_2^2 + |rot v|_2^2)).
AuditReport audit_keyest(const EnsembleSpec& spec);

/// r(p) = |u|_{W^{1,p}_b} / (p |u|_{H_b}) for p in {4, 8, 16, 32, 64};
/// pass iff max_p r(p) <= growth r(4).
AuditReport audit_yudovich_pbound(const VectorField& u, double growth = 2.0);
AuditReport audit_yudovich_ensemble(const EnsembleSpec& spec, double growth = 2.0);

/// Weight lemmas on the plane and the torus: convolution bound for theta,
/// its R-scaled form (ratio R bounded over radii), the two-sided Z
/// equivalence and the b,1 / b,R sandwich. `pairs` random center pairs.
AuditReport audit_weight_lemmas(const std::vector<double>& radii, std::size_t pairs, std::uint64_t seed);

/// |R_mu|_{L^2} over successive halvings of mu; pass iff every measured
/// order log2(|R_mu| / |R_{mu/2}|) >= min_order.
AuditReport audit_commutator(const VectorField& u, const ScalarField& omega, const std::vector<double>& mus,
                             double min_order = 1.5);

/// Direct-vs-spectral pressure gradient discrepancy over seeded compactly
/// supported fields; pass iff every relative L2 discrepancy <= tol.
AuditReport audit_pressure_kernel(const GridSpec& g, std::size_t samples, std::uint64_t seed, double tol = 1e-3);

// ---------------------------------------------------------------------------
// Registry

/// Canonical audit ids, in a fixed order.
const std::vector<std::string>& audit_ids();
/// Canonical id for an id or alias; std::nullopt when unknown.
std::optional<std::string> resolve_audit_id(const std::string& id_or_alias);

}  // namespace delab

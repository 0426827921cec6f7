#pragma once

#include <string>
#include <vector>

#include "delab/spectral_core.hpp"

namespace delab {

enum class WeightKind {
  theta,         // 1 / (1 + |x - x0|^3)
  theta_scaled,  // 1 / (R^3 + |x - x0|^3)
  exp,           // exp(-eps |x - x0|)
  exp_smooth,    // exp(-eps (sqrt(core^2 + d^2) - core)), d the periodic chord distance
  cutoff,        // q(|x - x0| / R)
};

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

struct WeightSpec {
  WeightKind kind = WeightKind::theta;
  Point center{};
  double scale = 1.0;  // R for theta_scaled and cutoff, eps for the exponential weights
  double core = 1.0;   // smoothing length of exp_smooth
  void validate() const;
};

/// Cutoff profile: 1 on [0, 1], 1 - (10 t^3 - 15 t^4 + 6 t^5) with t = s - 1 on
/// [1, 2], 0 beyond. C^2 with |q'| <= 4 sqrt(q).
double cutoff_profile(double s);
double cutoff_profile_derivative(double s);
/// max over s of |q'(s)| / sqrt(q(s)), sampled finely on (1, 2).
double cutoff_gradient_constant();

/// Weight at x using the plane distance |x - x0| (exp_smooth uses the chord
/// distance of the torus of the given period; pass period <= 0 for the plane).
double weight_eval(const WeightSpec& spec, Point x, double period = 0.0);
/// Gradient of the weight (zero at the kink of exp).
Point weight_gradient(const WeightSpec& spec, Point x, double period = 0.0);

/// Weight sampled on the grid with the periodic minimum-image displacement
/// from the center (exp_smooth uses the chord distance).
ScalarField weight_field(const GridSpec& g, const WeightSpec& spec);
VectorField weight_gradient_field(const GridSpec& g, const WeightSpec& spec);

struct NormReport {
  std::string family;
  double p = 2;
  double radius = 1;
  Point center{};
  std::string weight;
  double value = 0;
  std::size_t sample_centers = 0;
  bool flagged = false;  // set by hb_norm for non-solenoidal input
  std::string to_json() const;
};

class BallError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square lattice of centers anchored at `anchor` with m = ceil(2L/R) points
/// per side (stride L/m <= R/2).
std::vector<Point> center_grid(const GridSpec& g, double R, Point anchor = {0, 0});

/// (int_{B(x0,R)} |f|^p)^{1/p}; p = infinity gives the max over nodes in the
/// closed ball. Cells cut by the circle use their exact intersection moments
/// (area, first and second moments) with finite-difference derivatives of |f|^p.
/// Throws BallError when R > L/4 or R <= 0, std::invalid_argument when p < 1.
double ball_norm(const ScalarField& f, double p, double R, Point x0);
/// Same with |u| the Euclidean magnitude.
double ball_norm(const VectorField& u, double p, double R, Point x0);

/// sup over center_grid of ball_norm.
NormReport uniformly_local_norm(const ScalarField& f, double p, double R);
NormReport uniformly_local_norm(const VectorField& u, double p, double R);

/// (int phi |f|^p)^{1/p} by the periodic trapezoidal rule.
double weighted_norm(const ScalarField& f, double p, const WeightSpec& spec);
double weighted_norm(const VectorField& u, double p, const WeightSpec& spec);

/// |u|_{L^2_b} (unit balls) + sup |rot u|; flagged when u is not solenoidal.
NormReport hb_norm(const VectorField& u);

/// Uniformly local W^{1,p} norm on unit balls: sup_x0 (int_B |u|^p + |grad u|^p)^{1/p}
/// with |grad u| the Frobenius norm of the spectral Jacobian. p in [1, 64].
NormReport w1p_b_norm(const VectorField& u, double p);

/// Z_{R,y0}(u) = int theta_{R,y0}(x0) int q(|x - x0|/R) |u(x)|^2 dx dx0 with
/// the outer integral over center_grid(R, y0). Requires R >= 1 and 2R <= L/2.
double z_functional(const VectorField& u, double R, Point y0);
/// int theta_{R,y0}(y) |u|^2_{L^2(B(y, kappa R))} dy on the same center grid.
double theta_ball_functional(const VectorField& u, double R, Point y0, double kappa = 1.0);
/// int theta_{R,y0}(x) |f|_{L^p(B^R_x)} dx over center_grid(R, y0).
double theta_ball_lp(const ScalarField& f, double p, double R, Point y0);

}  // namespace delab

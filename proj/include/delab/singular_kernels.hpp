#pragma once

#include <vector>

#include "delab/spectral_core.hpp"

namespace delab {

/// Component indices of the pressure kernel, each in {1, 2}.
struct KernelIndex {
  int i = 1;
  int j = 1;
};

/// K_ij(x) = (|x|^2 delta_ij - 2 x_i x_j) / (2 pi |x|^4).
/// Throws std::domain_error at x = 0 and std::invalid_argument for bad indices.
double kernel_eval(KernelIndex idx, Point x);

/// Symmetric 2x2 tensor field (w12 = w21).
struct TensorField {
  ScalarField w11, w12, w22;
  static TensorField outer(const VectorField& u);
};

class SupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Direct whole-plane quadrature p(y) = sum_ij int K_ij(x - y) w_ij(x) dx over
/// the compact support of w. The cell containing y is skipped (symmetric
/// principal value: the kernel is trace-free and even, so its integral over a
/// centered square vanishes). Only cells with |x - y| <= cutoff_radius
/// contribute. Points are interpreted periodically around the support.
/// With correct = true, evaluation points on grid nodes also receive the
/// lattice correction for the skipped cell (uses second derivatives of w),
/// which raises the rule from O(h^2) to O(h^4) for smooth w.
/// Throws SupportError when the support diameter exceeds L/3.
std::vector<double> convolve_pressure_direct(const TensorField& w, const std::vector<Point>& eval_points,
                                             double cutoff_radius, bool correct = true);

struct PressureCrossCheck {
  double relative_l2 = 0;     // |grad p_direct - grad p_spectral|_2 / |grad p_spectral|_2 on the support
  std::size_t support_points = 0;
  std::size_t eval_points = 0;
};

/// Compares a 4th-order finite-difference gradient of the direct pressure of
/// u (x) u with pressure_gradient_spectral on the support of u.
PressureCrossCheck pressure_cross_validation(const VectorField& u);

/// Smoothing kernel rho_mu(x) proportional to (1 - |x|^2/mu^2)^4 on |x| < mu.
struct MollifierSpec {
  double mu = 0.1;
};

/// Discrete unit-mass convolution S_mu f = rho_mu * f. Throws
/// std::invalid_argument when mu < 2h or mu > L/2.
ScalarField mollify(const ScalarField& f, const MollifierSpec& spec);

/// Fourier multiplier of mollify for the mode (m1, m2).
double mollifier_symbol(const GridSpec& g, const MollifierSpec& spec, int m1, int m2);

/// R_mu = S_mu(u . grad omega) - u . grad(S_mu omega), both products dealiased.
ScalarField commutator_remainder(const VectorField& u, const ScalarField& omega, const MollifierSpec& spec);

}  // namespace delab

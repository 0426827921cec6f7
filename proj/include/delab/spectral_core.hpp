#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace delab {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;

/// Periodic square [0, box_length)^2 sampled with n points per side.
struct GridSpec {
  int n = 64;
  double box_length = 6.283185307179586;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws std::invalid_argument when n is not a power of two >= 16,
  /// box_length <= 0 or dealias_fraction outside (0, 1].
  void validate() const;

  double spacing() const { return box_length / n; }
  double cell_area() const { return spacing() * spacing(); }
  std::size_t points() const { return static_cast<std::size_t>(n) * n; }
  /// Number of complex coefficients in the half-spectrum layout n x (n/2+1).
  std::size_t modes() const { return static_cast<std::size_t>(n) * (n / 2 + 1); }
  /// Largest retained |mode index| per axis after dealiasing.
  int retained_modes() const;
  /// Signed mode index along axis 1 for row i of the half-spectrum layout.
  int mode1(int i) const { return i <= n / 2 ? i : i - n; }
  double wavenumber(int mode) const;
  Point position(int i, int j) const { return {i * spacing(), j * spacing()}; }

  bool operator==(const GridSpec& o) const {
    return n == o.n && box_length == o.box_length && dealias_fraction == o.dealias_fraction;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

enum class Representation { physical, spectral };

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a periodic Poisson problem has no solution (nonzero mean source).
class SolvabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Real field on a periodic grid. Physical samples are stored row-major with
/// index i*n + j at position (i h, j h); spectral coefficients use the FFTW
/// half-spectrum layout and are normalized so that f = sum c_k e^{i k.x}.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid);

  static ScalarField from_values(const GridSpec& grid, std::vector<double> values);
  static ScalarField from_coefficients(const GridSpec& grid, std::vector<Complex> coefficients);
  static ScalarField from_function(const GridSpec& grid,
                                   const std::function<double(double, double)>& f);
  static ScalarField constant(const GridSpec& grid, double c);

  const GridSpec& grid() const { return grid_; }
  Representation representation() const { return rep_; }

  ScalarField to_physical() const;
  ScalarField to_spectral() const;

  /// Physical samples; throws std::logic_error in spectral representation.
  const std::vector<double>& values() const;
  /// Spectral coefficients; throws std::logic_error in physical representation.
  const std::vector<Complex>& coefficients() const;

  /// Physical samples regardless of the stored representation.
  std::vector<double> sampled() const;
  /// Spectral coefficients regardless of the stored representation.
  std::vector<Complex> spectrum() const;

  double at(int i, int j) const;
  double max_abs() const;
  double mean() const;
  /// Box L2 norm (sqrt of sum |f|^2 h^2).
  double l2() const;
  /// Sup of the trigonometric interpolant, refined from grid extrema by Newton steps.
  double sup_norm() const;

  ScalarField operator+(const ScalarField& o) const;
  ScalarField operator-(const ScalarField& o) const;
  ScalarField operator*(double s) const;
  ScalarField operator-() const { return *this * -1.0; }
  /// Pointwise product in physical space.
  ScalarField times(const ScalarField& o) const;

 private:
  GridSpec grid_{};
  Representation rep_ = Representation::physical;
  std::vector<double> phys_;
  std::vector<Complex> spec_;
};

struct VectorField {
  ScalarField u1;
  ScalarField u2;

  VectorField() = default;
  VectorField(ScalarField a, ScalarField b);

  const GridSpec& grid() const { return u1.grid(); }
  VectorField operator+(const VectorField& o) const { return {u1 + o.u1, u2 + o.u2}; }
  VectorField operator-(const VectorField& o) const { return {u1 - o.u1, u2 - o.u2}; }
  VectorField operator*(double s) const { return {u1 * s, u2 * s}; }
  VectorField to_physical() const { return {u1.to_physical(), u2.to_physical()}; }
  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const;
  /// Max over the grid of the pointwise magnitude.
  double max_abs() const;
  /// Box L2 norm of the vector field.
  double l2() const;
  /// Add a spatially constant vector.
  VectorField shifted(double c1, double c2) const;
};

/// Spectral derivative along axis 1 or 2. Nyquist modes are dropped.
ScalarField derivative(const ScalarField& f, int axis);
/// rot u = d2 u1 - d1 u2.
ScalarField rot(const VectorField& u);
ScalarField divergence(const VectorField& u);
VectorField gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
/// Zero the modes outside the retained band.
ScalarField dealias(const ScalarField& f);

/// Zero-mean velocity u = (-d2 psi, d1 psi) with -Lap psi = omega.
/// Throws SolvabilityError when omega has a nonzero box mean.
VectorField biot_savart(const ScalarField& omega);
/// Zero-mean streamfunction solving -Lap psi = omega.
ScalarField streamfunction(const ScalarField& omega);

struct PressureResult {
  ScalarField pressure;       // zero mean
  VectorField gradient;       // grad p
  double divergence_max = 0;  // max |div u| of the input
  bool non_solenoidal = false;
};

/// Solves -Lap p = sum_ij d_i d_j (u_i u_j) spectrally with zero-mean gauge.
PressureResult pressure_gradient_spectral(const VectorField& u);

/// Dealiased pseudo-spectral u . grad omega.
ScalarField nonlinear_term(const VectorField& u, const ScalarField& omega);

/// Relative divergence tolerance used to flag non-solenoidal inputs.
inline constexpr double kSolenoidalTolerance = 1e-8;

/// Maximum of |div u| relative to (max |grad u| + 1).
double relative_divergence(const VectorField& u);

}  // namespace delab

#pragma once

#include <complex>
#include <vector>

#include "delab/spectral_core.hpp"

namespace delab::detail {

using Spectrum = std::vector<Complex>;
using Samples = std::vector<double>;

/// Normalized forward transform: c_k = n^-2 sum f e^{-i k.x}.
Spectrum forward(const GridSpec& g, const Samples& f);
/// Inverse transform of a normalized spectrum.
Samples inverse(const GridSpec& g, const Spectrum& c);

/// Multiply by i k_axis; Nyquist modes along that axis are zeroed.
Spectrum differentiate(const GridSpec& g, const Spectrum& c, int axis);
/// Zero every mode with |m1| or |m2| above the retained band.
void truncate(const GridSpec& g, Spectrum& c);
/// Streamfunction coefficients psi = omega / |k|^2 with zero mean.
Spectrum invert_laplacian(const GridSpec& g, const Spectrum& omega);

struct Velocity {
  Samples u1, u2;
};
/// Zero-mean Biot-Savart velocity samples from vorticity coefficients.
Velocity velocity_from_vorticity(const GridSpec& g, const Spectrum& omega);

/// |m| == n/2 along axis 1 (rows) or axis 2 (columns).
inline bool is_nyquist(const GridSpec& g, int i, int j) {
  return g.mode1(i) == g.n / 2 || j == g.n / 2;
}

/// Evaluate the trigonometric interpolant and its first and second
/// derivatives at an arbitrary point.
struct PointEval {
  double f = 0, fx = 0, fy = 0, fxx = 0, fxy = 0, fyy = 0;
};
PointEval evaluate(const GridSpec& g, const Spectrum& c, double x1, double x2);

}  // namespace delab::detail

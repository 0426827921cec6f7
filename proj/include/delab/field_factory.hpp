#pragma once

#include <cstdint>

#include "delab/spectral_core.hpp"

namespace delab {

/// Taylor-Green velocity A(-sin kx1 cos kx2, cos kx1 sin kx2) with k = 2 pi / L.
VectorField taylor_green_velocity(const GridSpec& g, double amplitude = 1.0);
/// Its vorticity 2 A k sin kx1 sin kx2.
ScalarField taylor_green_vorticity(const GridSpec& g, double amplitude = 1.0);

/// Zero-mean band-limited random vorticity built from a random streamfunction
/// with modes 1 <= |m|_inf <= kmax, rescaled so that its grid max equals
/// vorticity_sup. Deterministic in the seed.
ScalarField random_vorticity(const GridSpec& g, std::uint64_t seed, int kmax, double vorticity_sup);
/// Biot-Savart velocity of random_vorticity.
VectorField random_velocity(const GridSpec& g, std::uint64_t seed, int kmax, double vorticity_sup);

/// Divergence-free velocity supported in the disk of the given radius around
/// center: u = (-d2 psi, d1 psi) for psi = (1 - |x-c|^2/radius^2)^8 times a
/// random trig polynomial. Normalized so that max |u| = 1.
VectorField compact_velocity(const GridSpec& g, std::uint64_t seed, Point center, double radius);

/// Smooth compactly supported bump exp(1 - 1/(1-s^2)) for s < 1, else 0.
double smooth_bump(double s);

/// Displacement x - c reduced to the periodic minimum image.
Point min_image(const GridSpec& g, Point x, Point c);

/// Integer-cell periodic translation of a field.
ScalarField translate(const ScalarField& f, int di, int dj);
VectorField translate(const VectorField& u, int di, int dj);

}  // namespace delab

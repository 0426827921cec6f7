#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "delab/field_factory.hpp"
#include "delab/singular_kernels.hpp"

using namespace delab;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid(int n, double L = 2 * kPi) {
  GridSpec g;
  g.n = n;
  g.box_length = L;
  return g;
}

double l1(const ScalarField& f) {
  double s = 0;
  for (double v : f.sampled()) s += std::abs(v);
  return s * f.grid().cell_area();
}

// phi(r) = (1 - r^2/rho^2)^8 and its flux m(r) = int_0^r s phi(s) ds.
double radial_phi(double r, double rho) {
  if (r >= rho) return 0;
  return std::pow(1 - r * r / (rho * rho), 8);
}
double radial_flux(double r, double rho) {
  if (r >= rho) return rho * rho / 18;
  return rho * rho / 18 * (1 - std::pow(1 - r * r / (rho * rho), 9));
}

// PV(K * w) for w11 = phi(|x - c|), w12 = w22 = 0, from the radial potential
// of phi: ((y1^2 - y2^2)/r^2) (phi/2 - m(r)/r^2).
double radial_reference(Point y, Point c, double rho) {
  const double d1 = y[0] - c[0], d2 = y[1] - c[1];
  const double r2 = d1 * d1 + d2 * d2;
  if (r2 == 0) return 0;
  const double r = std::sqrt(r2);
  return (d1 * d1 - d2 * d2) / r2 * (radial_phi(r, rho) / 2 - radial_flux(r, rho) / r2);
}

struct RadialRun {
  double max_err_corrected = 0;
  double max_err_plain = 0;
};

RadialRun radial_case(int n) {
  const auto g = grid(n);
  const Point c{kPi, kPi};
  const double rho = 0.9;
  auto phi = ScalarField::from_function(g, [&](double x, double y) { return radial_phi(std::hypot(x - c[0], y - c[1]), rho); });
  TensorField w{phi, ScalarField(g), ScalarField(g)};
  const double h = g.spacing();
  std::vector<Point> pts;
  // Nodes on a ring of offsets inside, on the edge of, and outside the support.
  for (int k = 0; k < 24; ++k) {
    const double r = 0.05 + 1.3 * k / 23.0, t = 0.37 + 0.5 * k;
    pts.push_back({std::round((c[0] + r * std::cos(t)) / h) * h, std::round((c[1] + r * std::sin(t)) / h) * h});
  }
  const auto pc = convolve_pressure_direct(w, pts, 10.0, true);
  const auto pp = convolve_pressure_direct(w, pts, 10.0, false);
  RadialRun out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double ref = radial_reference(pts[k], c, rho);
    out.max_err_corrected = std::max(out.max_err_corrected, std::abs(pc[k] - ref));
    out.max_err_plain = std::max(out.max_err_plain, std::abs(pp[k] - ref));
  }
  return out;
}

}  // namespace

TEST_CASE("kernel values and symmetries") {
  CHECK(kernel_eval({1, 1}, {1, 0}) == doctest::Approx(-1 / (2 * kPi)).epsilon(1e-15));
  CHECK(kernel_eval({1, 2}, {1, 1}) == doctest::Approx(-1 / (4 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(kernel_eval({1, 1}, {0, 0}), std::domain_error);
  CHECK_THROWS_AS(kernel_eval({0, 1}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_eval({1, 3}, {1, 0}), std::invalid_argument);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-3, 3), lam(0.1, 10);
  for (int s = 0; s < 200; ++s) {
    const Point x{uni(rng), uni(rng)};
    const double l = lam(rng);
    CHECK(kernel_eval({1, 1}, x) + kernel_eval({2, 2}, x) == 0.0);
    CHECK(kernel_eval({1, 2}, x) == kernel_eval({2, 1}, x));
    for (KernelIndex idx : {KernelIndex{1, 1}, KernelIndex{1, 2}, KernelIndex{2, 2}}) {
      CHECK(kernel_eval(idx, {l * x[0], l * x[1]}) * l * l == doctest::Approx(kernel_eval(idx, x)).epsilon(1e-12));
      CHECK(kernel_eval(idx, {-x[0], -x[1]}) == kernel_eval(idx, x));
    }
  }
}

TEST_CASE("direct convolution trivial cases and support checks") {
  const auto g = grid(64);
  TensorField zero{ScalarField(g), ScalarField(g), ScalarField(g)};
  const auto p = convolve_pressure_direct(zero, {{1.0, 2.0}, {0.0, 0.0}}, 5.0);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.0);

  // Isotropic w11 = w22 = phi, w12 = 0: both the quadrature and the radial
  // reduction give zero.
  auto phi = ScalarField::from_function(g, [](double x, double y) { return radial_phi(std::hypot(x - 3, y - 3), 0.8); });
  TensorField iso{phi, ScalarField(g), phi};
  for (double v : convolve_pressure_direct(iso, {{3.0, 3.0}, {3.3, 2.9}, {1.0, 1.0}}, 10.0)) CHECK(std::abs(v) <= 1e-6);

  auto wide = ScalarField::from_function(g, [](double x, double y) { return radial_phi(std::hypot(x - 3, y - 3), 1.5); });
  CHECK_THROWS_AS(convolve_pressure_direct(TensorField{wide, ScalarField(g), ScalarField(g)}, {{0, 0}}, 5.0),
                  SupportError);
  CHECK_THROWS_AS(convolve_pressure_direct(iso, {{0, 0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(convolve_pressure_direct(TensorField{phi, ScalarField(grid(32)), phi}, {{0, 0}}, 1.0), GridMismatch);
}

TEST_CASE("skipped-cell lattice constants match regularized lattice sums") {
  // Gaussian-regularized sums sum_{m != 0} g(m) e^{-|m|^2/M^2} - int g e^{-|x|^2/M^2},
  // extrapolated in M (error is O(M^-2)).
  auto regularized = [](double M) {
    const int R = static_cast<int>(7 * M);
    double a = 0, b = 0;
    for (int i = -R; i <= R; ++i)
      for (int j = -R; j <= R; ++j) {
        if (i == 0 && j == 0) continue;
        const double r2 = double(i) * i + double(j) * j, wgt = std::exp(-r2 / (M * M));
        a += (double(j) * j - double(i) * i) * i * i / (2 * kPi * r2 * r2) * wgt;
        b += -2.0 * i * i * j * j / (2 * kPi * r2 * r2) * wgt;
      }
    return std::pair{a + M * M / 8, b + M * M / 8};
  };
  const auto [a1, b1] = regularized(40);
  const auto [a2, b2] = regularized(80);
  const double za = a2 + (a2 - a1) / 3, zb = b2 + (b2 - b1) / 3;

  // Recover the constants from the applied correction, which at a node is
  // -h^2 (Z11/2 (d11 - d22) a + 2 Z12 d12 b) with analytic derivatives of phi.
  const auto g = grid(128);
  const double h = g.spacing();
  const Point c{kPi, kPi};
  auto bump = [&](double x, double y) { return radial_phi(std::hypot(x - c[0], y - c[1]), 0.9); };
  auto f = ScalarField::from_function(g, bump);
  const Point y{64 * h, 64 * h};
  const auto diag = convolve_pressure_direct({f, ScalarField(g), ScalarField(g)}, {y}, 10.0, true)[0] -
                    convolve_pressure_direct({f, ScalarField(g), ScalarField(g)}, {y}, 10.0, false)[0];
  const auto off = convolve_pressure_direct({ScalarField(g), f, ScalarField(g)}, {y}, 10.0, true)[0] -
                   convolve_pressure_direct({ScalarField(g), f, ScalarField(g)}, {y}, 10.0, false)[0];
  // At the center of phi, d11 phi = d22 phi and d12 phi = 0.
  CHECK(std::abs(diag) < 1e-12);
  CHECK(std::abs(off) < 1e-12);
  const Point y2{70 * h, 61 * h};
  const double d1 = y2[0] - c[0], d2 = y2[1] - c[1], rho2 = 0.81;
  const double r2 = d1 * d1 + d2 * d2, q = 1 - r2 / rho2;
  // phi = q^8: d_ab phi = 8 q^7 (-2 delta_ab / rho2) + 56 q^6 (4 d_a d_b / rho2^2)
  auto dab = [&](double da, double db, double delta) {
    return 8 * std::pow(q, 7) * (-2 * delta / rho2) + 56 * std::pow(q, 6) * 4 * da * db / (rho2 * rho2);
  };
  const double lap_diff = dab(d1, d1, 1) - dab(d2, d2, 1), mixed = dab(d1, d2, 0);
  const auto corr_a = convolve_pressure_direct({f, ScalarField(g), ScalarField(g)}, {y2}, 10.0, true)[0] -
                      convolve_pressure_direct({f, ScalarField(g), ScalarField(g)}, {y2}, 10.0, false)[0];
  const auto corr_b = convolve_pressure_direct({ScalarField(g), f, ScalarField(g)}, {y2}, 10.0, true)[0] -
                      convolve_pressure_direct({ScalarField(g), f, ScalarField(g)}, {y2}, 10.0, false)[0];
  CHECK(-corr_a / (h * h * 0.5 * lap_diff) == doctest::Approx(za).epsilon(1e-6));
  CHECK(-corr_b / (h * h * 2 * mixed) == doctest::Approx(zb).epsilon(1e-6));
}

TEST_CASE("direct convolution matches the radial reduction") {
  const auto coarse = radial_case(128);
  const auto fine = radial_case(256);
  // Plain skipped-cell rule is second order; the corrected rule is much more accurate.
  CHECK(coarse.max_err_plain / fine.max_err_plain == doctest::Approx(4.0).epsilon(0.25));
  CHECK(fine.max_err_corrected < fine.max_err_plain / 20);
  CHECK(fine.max_err_corrected <= 1e-6);
  MESSAGE("radial max error n=256 corrected " << fine.max_err_corrected << " plain " << fine.max_err_plain);
}

TEST_CASE("direct pressure gradient agrees with the spectral solver") {
  const auto g = grid(256);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto u = compact_velocity(g, seed, {3.0 + 0.1 * seed, 3.2}, g.box_length / 6);
    CHECK(divergence(u).max_abs() < 1e-6);
    const auto r = pressure_cross_validation(u);
    CHECK(r.support_points > 0);
    CHECK(r.relative_l2 <= 1e-3);
  }
  VectorField zero{ScalarField(g), ScalarField(g)};
  CHECK(pressure_cross_validation(zero).relative_l2 == 0.0);
}

TEST_CASE("mollify preserves means and contracts the sup norm") {
  const auto g = grid(128);
  const double h = g.spacing();
  auto c = ScalarField::constant(g, 2.5);
  CHECK((mollify(c, {4 * h}) - c).max_abs() <= 1e-13);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto f = random_vorticity(g, seed, 30, 1.0) + ScalarField::constant(g, 0.3 * seed);
    for (double mu : {2 * h, 5 * h, 0.7}) {
      auto s = mollify(f, {mu});
      CHECK(std::abs(s.mean() - f.mean()) <= 1e-12);
      CHECK(s.max_abs() <= f.max_abs() * (1 + 1e-14));
    }
  }
  CHECK_THROWS_AS(mollify(c, {1.5 * h}), std::invalid_argument);
  CHECK_THROWS_AS(mollify(c, {0.6 * g.box_length}), std::invalid_argument);
}

TEST_CASE("mollifier symbol equals the discrete Fourier sum of the profile") {
  const auto g = grid(64, 10.0);
  const double h = g.spacing(), mu = 6 * h;
  // Independent profile sum over the disk.
  double mass = 0;
  std::complex<double> acc1 = 0, acc2 = 0;
  const double k = 2 * kPi / g.box_length;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const double s2 = (double(i) * i + double(j) * j) * h * h / (mu * mu);
      if (s2 >= 1) continue;
      const double v = std::pow(1 - s2, 4);
      mass += v;
      acc1 += v * std::exp(std::complex<double>(0, -k * i * h));
      acc2 += v * std::exp(std::complex<double>(0, -k * (3 * i + 2 * j) * h));
    }
  const double s1 = acc1.real() / mass, s32 = acc2.real() / mass;
  CHECK(mollifier_symbol(g, {mu}, 1, 0) == doctest::Approx(s1).epsilon(1e-12));
  CHECK(mollifier_symbol(g, {mu}, 3, 2) == doctest::Approx(s32).epsilon(1e-12));
  CHECK(s1 > 0);
  CHECK(s1 <= 1);

  auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(k * x); });
  auto expect = ScalarField::from_function(g, [&](double x, double) { return s1 * std::sin(k * x); });
  CHECK((mollify(f, {mu}) - expect).max_abs() <= 1e-13);
}

TEST_CASE("mollification converges as mu halves") {
  const auto g = grid(128);
  const double h = g.spacing();
  auto f = random_vorticity(g, 11, 10, 1.0);
  double prev = 1e300;
  for (double mu : {8 * h, 4 * h, 2 * h}) {
    const double e = (mollify(f, {mu}) - f).l2();
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("commutator remainder") {
  const auto g = grid(128);
  auto u = random_velocity(g, 3, 8, 1.0);
  CHECK(commutator_remainder(u, ScalarField::constant(g, 1.7), {0.3}).max_abs() <= 1e-13);

  VectorField uc{ScalarField::constant(g, 0.7), ScalarField::constant(g, -1.1)};
  auto w = random_vorticity(g, 4, 20, 1.0);
  CHECK(commutator_remainder(uc, w, {0.3}).max_abs() <= 1e-13);

  CHECK_THROWS_AS(commutator_remainder(u, ScalarField(grid(64)), {0.3}), GridMismatch);
}

TEST_CASE("commutator remainder is second order in mu for smooth data") {
  // A Taylor-Green velocity transporting its own vorticity gives R = 0; use a
  // different smooth vorticity.
  const auto g = grid(256);
  auto u = taylor_green_velocity(g);
  auto w = ScalarField::from_function(g, [](double x, double y) { return std::sin(x) * std::sin(2 * y); });
  std::vector<double> norms;
  for (double mu : {0.8, 0.4, 0.2, 0.1}) norms.push_back(commutator_remainder(u, w, {mu}).l2());
  for (std::size_t k = 1; k < norms.size(); ++k) {
    CHECK(norms[k - 1] / norms[k] == doctest::Approx(4.0).epsilon(0.3));
  }
}

TEST_CASE("commutator remainder decreases for a steep bump") {
  const auto g = grid(256);
  auto u = taylor_green_velocity(g);
  auto w = ScalarField::from_function(g, [](double x, double y) { return radial_phi(std::hypot(x - 2.0, y - 3.5), 0.4); });
  double prev = 1e300;
  for (double mu : {0.4, 0.2, 0.1, 0.05}) {
    const double v = l1(commutator_remainder(u, w, {mu}));
    CHECK(v < prev);
    prev = v;
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delab/field_factory.hpp"
#include "delab/spectral_core.hpp"

using namespace delab;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid(int n, double L = 2 * kPi) {
  GridSpec g;
  g.n = n;
  g.box_length = L;
  return g;
}

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(grid(16).validate());
  CHECK_THROWS_AS(grid(8).validate(), std::invalid_argument);
  CHECK_THROWS_AS(grid(48).validate(), std::invalid_argument);
  CHECK_THROWS_AS(grid(64, 0.0).validate(), std::invalid_argument);
  GridSpec g = grid(64);
  g.dealias_fraction = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.dealias_fraction = 1.5;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  // 2/3 rule keeps |m| < n/3.
  CHECK(grid(64).retained_modes() == 21);
  CHECK(grid(256).retained_modes() == 85);
}

TEST_CASE("representation round trip and conjugate symmetry") {
  auto g = grid(32);
  auto w = random_vorticity(g, 3, 6, 1.0);
  auto s = w.to_spectral();
  CHECK(s.representation() == Representation::spectral);
  CHECK(max_diff(s.to_physical(), w) < 1e-14);
  // Real field: column j=0 must satisfy c(-m1) = conj(c(m1)).
  const auto& c = s.coefficients();
  const int h = g.n / 2 + 1;
  for (int i = 1; i < g.n; ++i) {
    CHECK(std::abs(c[i * h] - std::conj(c[(g.n - i) * h])) < 1e-15);
  }
  CHECK_THROWS_AS(s.values(), std::logic_error);
  CHECK_THROWS_AS(w.coefficients(), std::logic_error);
}

TEST_CASE("derivative of constants and single modes") {
  for (double L : {2 * kPi, 10.0}) {
    auto g = grid(64, L);
    CHECK(derivative(ScalarField::constant(g, 3.5), 1).max_abs() < 1e-14);
    CHECK(derivative(ScalarField::constant(g, 3.5), 2).max_abs() < 1e-14);
    const double k = 2 * kPi / L;
    auto f = ScalarField::from_function(g, [&](double x, double) { return std::sin(k * x); });
    auto exact = ScalarField::from_function(g, [&](double x, double) { return k * std::cos(k * x); });
    CHECK(max_diff(derivative(f, 1), exact) <= 1e-12);
    CHECK(derivative(f, 2).max_abs() <= 1e-12);
  }
  CHECK_THROWS_AS(derivative(ScalarField(grid(16)), 3), std::invalid_argument);
}

TEST_CASE("rot follows d2 u1 - d1 u2") {
  auto g = grid(64);
  CHECK(rot(VectorField{ScalarField(g), ScalarField(g)}).max_abs() == 0.0);
  auto tg = taylor_green_velocity(g);
  auto exact = ScalarField::from_function(g, [](double x, double y) { return 2 * std::sin(x) * std::sin(y); });
  CHECK(max_diff(rot(tg), exact) <= 1e-12);
  // Sign convention: u = (sin x2, 0) has rot u = cos x2.
  auto shear = VectorField{ScalarField::from_function(g, [](double, double y) { return std::sin(y); }),
                           ScalarField(g)};
  auto cosy = ScalarField::from_function(g, [](double, double y) { return std::cos(y); });
  CHECK(max_diff(rot(shear), cosy) <= 1e-12);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto f = random_vorticity(g, seed, 8, 1.0);
    CHECK(rot(gradient(f)).max_abs() <= 1e-12);
  }
  auto other = grid(32);
  CHECK_THROWS_AS(rot(VectorField{ScalarField(g), ScalarField(g)} + VectorField{ScalarField(other), ScalarField(other)}),
                  GridMismatch);
  CHECK_THROWS_AS((VectorField{ScalarField(g), ScalarField(other)}), GridMismatch);
}

TEST_CASE("biot_savart reconstructs the velocity") {
  auto g = grid(64);
  auto zero = biot_savart(ScalarField(g));
  CHECK(zero.max_abs() == 0.0);

  auto tg = biot_savart(taylor_green_vorticity(g));
  auto exact = taylor_green_velocity(g);
  CHECK(max_diff(tg.u1, exact.u1) <= 1e-12);
  CHECK(max_diff(tg.u2, exact.u2) <= 1e-12);

  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    auto w = random_vorticity(g, seed, 12, 3.0);
    auto u = biot_savart(w);
    CHECK((rot(u) - w).max_abs() <= 1e-10 * w.max_abs());
    CHECK(divergence(u).max_abs() <= 1e-10 * (w.max_abs() + 1));
    CHECK(std::abs(u.u1.mean()) < 1e-14);
    CHECK(std::abs(u.u2.mean()) < 1e-14);
  }

  auto shifted = taylor_green_vorticity(g) + ScalarField::constant(g, 0.1);
  CHECK_THROWS_AS(biot_savart(shifted), SolvabilityError);
}

TEST_CASE("pressure gradient of the Euler nonlinearity") {
  auto g = grid(64);
  auto constant = VectorField{ScalarField::constant(g, 1.5), ScalarField::constant(g, -0.5)};
  auto pc = pressure_gradient_spectral(constant);
  CHECK(pc.gradient.max_abs() < 1e-14);
  CHECK_FALSE(pc.non_solenoidal);

  auto tg = pressure_gradient_spectral(taylor_green_velocity(g));
  auto gx = ScalarField::from_function(g, [](double x, double) { return -0.5 * std::sin(2 * x); });
  auto gy = ScalarField::from_function(g, [](double, double y) { return -0.5 * std::sin(2 * y); });
  auto p = ScalarField::from_function(g, [](double x, double y) { return (std::cos(2 * x) + std::cos(2 * y)) / 4; });
  CHECK(max_diff(tg.gradient.u1, gx) <= 1e-12);
  CHECK(max_diff(tg.gradient.u2, gy) <= 1e-12);
  CHECK(max_diff(tg.pressure, p) <= 1e-12);
  CHECK_FALSE(tg.non_solenoidal);

  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    auto u = random_velocity(g, seed, 10, 2.0);
    auto r = pressure_gradient_spectral(u);
    auto lhs = laplacian(r.pressure) * -1.0;
    auto w11 = u.u1.times(u.u1), w12 = u.u1.times(u.u2), w22 = u.u2.times(u.u2);
    auto rhs = derivative(derivative(w11, 1), 1) + derivative(derivative(w12, 1), 2) * 2.0 +
               derivative(derivative(w22, 2), 2);
    CHECK((lhs - rhs).l2() <= 1e-10 * rhs.l2());
    CHECK(rot(r.gradient).max_abs() <= 1e-10 * r.gradient.max_abs());
    CHECK(std::abs(r.pressure.mean()) < 1e-14);
  }

  auto compressive = VectorField{ScalarField::from_function(g, [](double x, double) { return std::sin(x); }),
                                 ScalarField(g)};
  CHECK(pressure_gradient_spectral(compressive).non_solenoidal);
}

TEST_CASE("dealiased nonlinear term") {
  auto g = grid(64);
  auto u = random_velocity(g, 5, 8, 1.0);
  CHECK(nonlinear_term(u, ScalarField::constant(g, 2.0)).max_abs() < 1e-14);
  auto w = taylor_green_vorticity(g);
  CHECK(nonlinear_term(biot_savart(w), w).max_abs() <= 1e-11);
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    auto om = random_vorticity(g, seed, 15, 2.0);
    auto n = nonlinear_term(biot_savart(om), om);
    CHECK(std::abs(n.mean()) <= 1e-12);
    // Output lives in the retained band.
    auto c = n.spectrum();
    const int h = g.n / 2 + 1, k = g.retained_modes();
    double outside = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < h; ++j)
        if (std::abs(g.mode1(i)) > k || j > k) outside = std::max(outside, std::abs(c[i * h + j]));
    CHECK(outside < 1e-15);
  }
  CHECK_THROWS_AS(nonlinear_term(u, ScalarField(grid(32))), GridMismatch);
}

TEST_CASE("mixed partial derivatives commute") {
  auto g = grid(64);
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    auto f = random_vorticity(g, seed, 10, 1.0);
    auto a = derivative(derivative(f, 1), 2);
    auto b = derivative(derivative(f, 2), 1);
    CHECK((a - b).max_abs() <= 1e-12 * std::max(1.0, a.max_abs()));
  }
}

TEST_CASE("sup_norm refines grid extrema of the interpolant") {
  auto g = grid(16);
  auto f = ScalarField::from_function(g, [](double x, double y) { return std::cos(x - 0.3) * std::cos(2 * y + 0.11); });
  CHECK(f.max_abs() < 0.99);
  CHECK(f.sup_norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto tg = taylor_green_vorticity(grid(64));
  CHECK(tg.sup_norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ScalarField(g).sup_norm() == 0.0);
}

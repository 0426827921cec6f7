#include "delab/field_factory.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spectral_detail.hpp"

namespace delab {

VectorField taylor_green_velocity(const GridSpec& g, double amplitude) {
  const double k = 2.0 * std::numbers::pi / g.box_length;
  auto u1 = ScalarField::from_function(g, [&](double x, double y) {
    return -amplitude * std::sin(k * x) * std::cos(k * y);
  });
  auto u2 = ScalarField::from_function(g, [&](double x, double y) {
    return amplitude * std::cos(k * x) * std::sin(k * y);
  });
  return {u1, u2};
}

ScalarField taylor_green_vorticity(const GridSpec& g, double amplitude) {
  const double k = 2.0 * std::numbers::pi / g.box_length;
  return ScalarField::from_function(g, [&](double x, double y) {
    return 2.0 * amplitude * k * std::sin(k * x) * std::sin(k * y);
  });
}

ScalarField random_vorticity(const GridSpec& g, std::uint64_t seed, int kmax, double vorticity_sup) {
  g.validate();
  if (kmax < 1 || kmax > g.retained_modes()) throw std::invalid_argument("kmax outside the retained band");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = g.n, h = n / 2 + 1;
  detail::Spectrum c(g.modes(), 0.0);
  for (int i = 0; i < n; ++i) {
    const int m1 = g.mode1(i);
    for (int j = 0; j < h; ++j) {
      const double re = normal(rng), im = normal(rng);
      const int mi = std::max(std::abs(m1), j);
      if (mi < 1 || mi > kmax) continue;
      const double k1 = g.wavenumber(m1), k2 = g.wavenumber(j);
      const double kk = k1 * k1 + k2 * k2;
      c[static_cast<std::size_t>(i) * h + j] = Complex(re, im) / std::sqrt(kk);
    }
  }
  // Project onto real fields (enforces Hermitian symmetry of the j=0 column).
  auto values = detail::inverse(g, c);
  c = detail::forward(g, values);
  c[0] = 0.0;
  values = detail::inverse(g, c);
  double m = 0;
  for (double v : values) m = std::max(m, std::abs(v));
  const double scale = m > 0 ? vorticity_sup / m : 0.0;
  for (auto& v : c) v *= scale;
  c[0] = 0.0;
  return ScalarField::from_coefficients(g, std::move(c)).to_physical();
}

VectorField random_velocity(const GridSpec& g, std::uint64_t seed, int kmax, double vorticity_sup) {
  return biot_savart(random_vorticity(g, seed, kmax, vorticity_sup));
}

double smooth_bump(double s) {
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

Point min_image(const GridSpec& g, Point x, Point c) {
  const double L = g.box_length;
  Point d{x[0] - c[0], x[1] - c[1]};
  for (double& v : d) v -= L * std::round(v / L);
  return d;
}

VectorField compact_velocity(const GridSpec& g, std::uint64_t seed, Point center, double radius) {
  g.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  struct Mode {
    double a, k1, k2, phase;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < 4; ++m) {
    const double scale = 2.0 * std::numbers::pi / (2.0 * radius);
    modes.push_back({uni(rng), scale * 2.0 * uni(rng), scale * 2.0 * uni(rng), std::numbers::pi * uni(rng)});
  }
  const double offset = 1.5 + 0.5 * uni(rng);
  // Analytic derivatives keep the support exactly inside the disk.
  std::vector<double> a(g.points()), b(g.points());
  const double h = g.spacing();
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const Point d = min_image(g, {i * h, j * h}, center);
      const double r = std::hypot(d[0], d[1]);
      const double s = r / radius;
      if (s >= 1.0) continue;
      double p = offset, px = 0, py = 0;
      for (const auto& md : modes) {
        const double arg = md.k1 * d[0] + md.k2 * d[1] + md.phase;
        p += md.a * std::cos(arg);
        px -= md.a * md.k1 * std::sin(arg);
        py -= md.a * md.k2 * std::sin(arg);
      }
      // bump = (1 - s^2)^8; its radial derivative is -16 s (1 - s^2)^7 / radius.
      const double q = 1.0 - s * s;
      const double q7 = std::pow(q, 7);
      const double bump = q7 * q;
      const double dbdr = -16.0 * s * q7 / radius;
      const double bx = r > 0 ? dbdr * d[0] / r : 0.0;
      const double by = r > 0 ? dbdr * d[1] / r : 0.0;
      const std::size_t idx = static_cast<std::size_t>(i) * g.n + j;
      a[idx] = -(by * p + bump * py);
      b[idx] = bx * p + bump * px;
    }
  }
  VectorField u{ScalarField::from_values(g, std::move(a)), ScalarField::from_values(g, std::move(b))};
  const double m = u.max_abs();
  return m > 0 ? u * (1.0 / m) : u;
}

ScalarField translate(const ScalarField& f, int di, int dj) {
  const auto& g = f.grid();
  const int n = g.n;
  const auto v = f.sampled();
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int si = ((i - di) % n + n) % n, sj = ((j - dj) % n + n) % n;
      out[static_cast<std::size_t>(i) * n + j] = v[static_cast<std::size_t>(si) * n + sj];
    }
  return ScalarField::from_values(g, std::move(out));
}

VectorField translate(const VectorField& u, int di, int dj) {
  return {translate(u.u1, di, dj), translate(u.u2, di, dj)};
}

}  // namespace delab

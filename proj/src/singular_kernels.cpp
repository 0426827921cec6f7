#include "delab/singular_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "delab/field_factory.hpp"
#include "delab/parallel.hpp"
#include "spectral_detail.hpp"

namespace delab {

double kernel_eval(KernelIndex idx, Point x) {
  if (idx.i < 1 || idx.i > 2 || idx.j < 1 || idx.j > 2) throw std::invalid_argument("kernel index must be 1 or 2");
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0) throw std::domain_error("pressure kernel is singular at x = 0");
  const double den = 2.0 * std::numbers::pi * r2 * r2;
  // Diagonal entries written as +-(x2^2 - x1^2) so that K11 + K22 is exactly zero.
  if (idx.i != idx.j) return -2.0 * x[0] * x[1] / den;
  const double d = x[1] * x[1] - x[0] * x[0];
  return idx.i == 1 ? d / den : -d / den;
}

TensorField TensorField::outer(const VectorField& u) {
  return {u.u1.times(u.u1), u.u1.times(u.u2), u.u2.times(u.u2)};
}

namespace {

struct Support {
  Point center{};
  std::vector<double> x1, x2, a, b;  // a = w11 - w22, b = w12
  std::vector<std::size_t> nodes;
  double diameter = 0;
};

double circular_mean(const std::vector<double>& v, double L) {
  double s = 0, c = 0;
  for (double x : v) {
    s += std::sin(2 * std::numbers::pi * x / L);
    c += std::cos(2 * std::numbers::pi * x / L);
  }
  double m = std::atan2(s, c) * L / (2 * std::numbers::pi);
  return m < 0 ? m + L : m;
}

Support find_support(const TensorField& w) {
  const auto& g = w.w11.grid();
  const auto w11 = w.w11.sampled(), w12 = w.w12.sampled(), w22 = w.w22.sampled();
  double peak = 0;
  for (std::size_t k = 0; k < w11.size(); ++k)
    peak = std::max({peak, std::abs(w11[k]), std::abs(w12[k]), std::abs(w22[k])});
  Support s;
  if (peak == 0) return s;
  const double h = g.spacing();
  std::vector<double> c1, c2;
  for (std::size_t k = 0; k < w11.size(); ++k) {
    if (std::max({std::abs(w11[k]), std::abs(w12[k]), std::abs(w22[k])}) > 1e-13 * peak) {
      s.nodes.push_back(k);
      c1.push_back(static_cast<double>(k / g.n) * h);
      c2.push_back(static_cast<double>(k % g.n) * h);
    }
  }
  s.center = {circular_mean(c1, g.box_length), circular_mean(c2, g.box_length)};
  double rmax = 0;
  for (std::size_t q = 0; q < s.nodes.size(); ++q) {
    const auto d = min_image(g, {c1[q], c2[q]}, s.center);
    const std::size_t k = s.nodes[q];
    s.x1.push_back(d[0]);
    s.x2.push_back(d[1]);
    s.a.push_back(w11[k] - w22[k]);
    s.b.push_back(w12[k]);
    rmax = std::max(rmax, std::hypot(d[0], d[1]));
  }
  s.diameter = 2 * rmax;
  if (s.diameter > g.box_length / 3) {
    throw SupportError("tensor field support diameter " + std::to_string(s.diameter) +
                       " exceeds L/3; periodic images would contaminate the whole-plane kernel");
  }
  return s;
}

// Regularized lattice sums Z[K_11(m) m_1^2] and Z[K_12(m) m_1 m_2] over
// nonzero m in Z^2. Skipping the singular cell leaves an O(h^2) error
// h^2 [Z11/2 (d11 - d22)(w11 - w22) + 2 Z12 d12 w12](y); subtracting it
// makes the rule O(h^4) at grid nodes.
constexpr double kLatticeZ11 = -0.0237309032;
constexpr double kLatticeZ12 = 0.1033083748;

double direct_sum(const Support& s, Point y, double h, double cutoff) {
  const double half = 0.5 * h, c2 = cutoff * cutoff;
  double acc = 0;
  for (std::size_t q = 0; q < s.x1.size(); ++q) {
    const double d1 = s.x1[q] - y[0], d2 = s.x2[q] - y[1];
    if (std::abs(d1) < half && std::abs(d2) < half) continue;
    const double r2 = d1 * d1 + d2 * d2;
    if (r2 > c2) continue;
    acc += ((d2 * d2 - d1 * d1) * s.a[q] - 4.0 * d1 * d2 * s.b[q]) / (r2 * r2);
  }
  return acc * h * h / (2.0 * std::numbers::pi);
}

}  // namespace

std::vector<double> convolve_pressure_direct(const TensorField& w, const std::vector<Point>& eval_points,
                                             double cutoff_radius, bool correct) {
  const auto& g = w.w11.grid();
  if (w.w12.grid() != g || w.w22.grid() != g) throw GridMismatch("tensor components on different grids");
  if (!(cutoff_radius > 0)) throw std::invalid_argument("cutoff_radius must be positive");
  const Support s = find_support(w);
  std::vector<double> out(eval_points.size(), 0.0);
  if (s.nodes.empty()) return out;
  const double h = g.spacing();
  const auto a = w.w11 - w.w22;
  const auto caa = (derivative(derivative(a, 1), 1) - derivative(derivative(a, 2), 2)).sampled();
  const auto cb = derivative(derivative(w.w12, 1), 2).sampled();
  parallel_for(eval_points.size(), [&](std::size_t k) {
    const Point y = min_image(g, eval_points[k], s.center);
    out[k] = direct_sum(s, y, h, cutoff_radius);
    if (!correct) return;
    const double fi = eval_points[k][0] / h, fj = eval_points[k][1] / h;
    const double ri = std::round(fi), rj = std::round(fj);
    if (std::abs(fi - ri) > 1e-9 || std::abs(fj - rj) > 1e-9) return;
    const int n = g.n;
    const std::size_t node = static_cast<std::size_t>(((static_cast<long>(ri) % n) + n) % n) * n +
                             static_cast<std::size_t>(((static_cast<long>(rj) % n) + n) % n);
    out[k] -= h * h * (0.5 * kLatticeZ11 * caa[node] + 2.0 * kLatticeZ12 * cb[node]);
  });
  return out;
}

PressureCrossCheck pressure_cross_validation(const VectorField& u) {
  const auto& g = u.grid();
  const int n = g.n;
  const double h = g.spacing();
  const auto mag = u.magnitude().sampled();
  double peak = 0;
  for (double v : mag) peak = std::max(peak, v);
  PressureCrossCheck out;
  if (peak == 0) return out;

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < mag.size(); ++k)
    if (mag[k] > 1e-12 * peak) support.push_back(k);

  // Direct pressure on the support dilated by the 5-point stencil.
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<Point> pts;
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  for (std::size_t k : support) {
    const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
    for (int d = -2; d <= 2; ++d) {
      for (auto [ii, jj] : {std::pair{wrap(i + d), j}, std::pair{i, wrap(j + d)}}) {
        const std::size_t key = static_cast<std::size_t>(ii) * n + jj;
        if (slot.emplace(key, pts.size()).second) pts.push_back({ii * h, jj * h});
      }
    }
  }
  const auto w = TensorField::outer(u);
  // The whole-plane solution of -Lap p = sum d_i d_j w_ij is
  // p = -PV(K * w) - tr(w)/2: K_ij is (2 pi)^-1 d_i d_j log|x| away from the
  // origin, and the distributional derivative adds delta_ij delta / 2.
  auto p = convolve_pressure_direct(w, pts, 2.0 * g.box_length);
  const auto w11 = w.w11.sampled(), w22 = w.w22.sampled();
  for (const auto& [key, q] : slot) p[q] = -p[q] - 0.5 * (w11[key] + w22[key]);
  const auto spectral = pressure_gradient_spectral(u);
  const auto gs1 = spectral.gradient.u1.sampled(), gs2 = spectral.gradient.u2.sampled();

  auto pv = [&](int i, int j) { return p[slot.at(static_cast<std::size_t>(wrap(i)) * n + wrap(j))]; };
  double num = 0, den = 0;
  for (std::size_t k : support) {
    const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
    const double d1 = (-pv(i + 2, j) + 8 * pv(i + 1, j) - 8 * pv(i - 1, j) + pv(i - 2, j)) / (12 * h);
    const double d2 = (-pv(i, j + 2) + 8 * pv(i, j + 1) - 8 * pv(i, j - 1) + pv(i, j - 2)) / (12 * h);
    num += (d1 - gs1[k]) * (d1 - gs1[k]) + (d2 - gs2[k]) * (d2 - gs2[k]);
    den += gs1[k] * gs1[k] + gs2[k] * gs2[k];
  }
  out.relative_l2 = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  out.support_points = support.size();
  out.eval_points = pts.size();
  return out;
}

namespace {

void check_mollifier(const GridSpec& g, const MollifierSpec& spec) {
  if (!(spec.mu >= 2.0 * g.spacing() * (1 - 1e-12))) {
    throw std::invalid_argument("mollifier scale mu must be at least two grid spacings");
  }
  if (spec.mu > 0.5 * g.box_length) throw std::invalid_argument("mollifier scale mu exceeds half the box");
}

detail::Spectrum kernel_spectrum(const GridSpec& g, const MollifierSpec& spec) {
  const int n = g.n;
  const double h = g.spacing();
  std::vector<double> rho(g.points(), 0.0);
  double mass = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = (i <= n / 2 ? i : i - n) * h, x2 = (j <= n / 2 ? j : j - n) * h;
      const double s2 = (x1 * x1 + x2 * x2) / (spec.mu * spec.mu);
      if (s2 >= 1.0) continue;
      const double q = 1.0 - s2;
      const double v = q * q * q * q;
      rho[static_cast<std::size_t>(i) * n + j] = v;
      mass += v;
    }
  }
  for (auto& v : rho) v /= mass;
  auto c = detail::forward(g, rho);
  for (auto& v : c) v *= static_cast<double>(g.points());
  return c;
}

}  // namespace

double mollifier_symbol(const GridSpec& g, const MollifierSpec& spec, int m1, int m2) {
  check_mollifier(g, spec);
  const auto c = kernel_spectrum(g, spec);
  const int h = g.n / 2 + 1;
  const int i = ((m1 % g.n) + g.n) % g.n;
  int j = m2;
  Complex v;
  if (j >= 0) {
    v = c[static_cast<std::size_t>(i) * h + j];
  } else {
    const int ic = ((-m1 % g.n) + g.n) % g.n;
    v = std::conj(c[static_cast<std::size_t>(ic) * h + (-j)]);
  }
  return v.real();
}

ScalarField mollify(const ScalarField& f, const MollifierSpec& spec) {
  const auto& g = f.grid();
  check_mollifier(g, spec);
  const auto k = kernel_spectrum(g, spec);
  auto c = f.spectrum();
  for (std::size_t q = 0; q < c.size(); ++q) c[q] *= k[q];
  return ScalarField::from_values(g, detail::inverse(g, c));
}

ScalarField commutator_remainder(const VectorField& u, const ScalarField& omega, const MollifierSpec& spec) {
  if (u.grid() != omega.grid()) throw GridMismatch("commutator: velocity and vorticity on different grids");
  return mollify(nonlinear_term(u, omega), spec) - nonlinear_term(u, mollify(omega, spec));
}

}  // namespace delab

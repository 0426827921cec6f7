#include "ball_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace delab::detail {

namespace {

// 10-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGaussX{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                        0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGaussW{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                        0.1494513491505806, 0.0666713443086881};

void accumulate_strip(CellMoments& m, Point c, double h, double R, double t0, double t1) {
  // x = R sin t; on (t0, t1) the y-limits are either the cell edges or +-R cos t.
  const double lo = c[1] - 0.5 * h, hi = c[1] + 0.5 * h;
  const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
  for (int k = 0; k < 10; ++k) {
    const double t = mid + (k < 5 ? -1 : 1) * half * kGaussX[k % 5];
    const double w = half * kGaussW[k % 5];
    const double x = R * std::sin(t), s = R * std::cos(t);
    const double a = std::max(lo, -s), b = std::min(hi, s);
    if (b <= a) continue;
    const double i0 = b - a, i1 = 0.5 * (b * b - a * a), i2 = (b * b * b - a * a * a) / 3.0;
    const double jac = w * s;  // dx = R cos t dt
    const double dx = x - c[0];
    const double y1 = i1 - c[1] * i0, y2 = i2 - 2 * c[1] * i1 + c[1] * c[1] * i0;
    m.m0 += jac * i0;
    m.m1x += jac * dx * i0;
    m.m1y += jac * y1;
    m.m2xx += jac * dx * dx * i0;
    m.m2xy += jac * dx * y1;
    m.m2yy += jac * y2;
  }
}

}  // namespace

CellMoments cell_disk_moments(Point c, double h, double R) {
  CellMoments m;
  const double x0 = std::max(c[0] - 0.5 * h, -R), x1 = std::min(c[0] + 0.5 * h, R);
  if (x1 <= x0) return m;
  std::vector<double> cuts{x0, x1};
  for (double e : {c[1] - 0.5 * h, c[1] + 0.5 * h}) {
    if (std::abs(e) >= R) continue;
    const double xb = std::sqrt(R * R - e * e);
    for (double v : {-xb, xb})
      if (v > x0 && v < x1) cuts.push_back(v);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = std::asin(std::clamp(cuts[k] / R, -1.0, 1.0));
    const double t1 = std::asin(std::clamp(cuts[k + 1] / R, -1.0, 1.0));
    if (t1 > t0) accumulate_strip(m, c, h, R, t0, t1);
  }
  return m;
}

BallStencil ball_stencil(double h, double R, double fx, double fy) {
  BallStencil s;
  const double cx = fx * h, cy = fy * h;
  const int lo = static_cast<int>(std::floor(-R / h)) - 1, hi = static_cast<int>(std::ceil(R / h)) + 2;
  const double full2 = h * h * h * h / 12.0;
  const double diag = std::sqrt(0.5) * h;
  for (int i = lo; i <= hi; ++i) {
    for (int j = lo; j <= hi; ++j) {
      const Point c{i * h - cx, j * h - cy};
      if (std::hypot(c[0], c[1]) - diag >= R) continue;
      CellMoments m;
      const double far = std::hypot(std::abs(c[0]) + 0.5 * h, std::abs(c[1]) + 0.5 * h);
      if (far <= R) {
        m.m0 = h * h;
        m.m2xx = m.m2yy = full2;
      } else {
        m = cell_disk_moments(c, h, R);
        if (m.m0 == 0) continue;
      }
      s.di.push_back(i);
      s.dj.push_back(j);
      s.moments.push_back(m);
    }
  }
  return s;
}

BallIntegrand ball_integrand(const GridSpec& g, std::vector<double> v) {
  const int n = g.n;
  const double h = g.spacing();
  BallIntegrand f;
  f.grid = g;
  const std::size_t N = v.size();
  f.vx.resize(N);
  f.vy.resize(N);
  f.vxx.resize(N);
  f.vxy.resize(N);
  f.vyy.resize(N);
  auto at = [&](int i, int j) { return v[static_cast<std::size_t>((i + n) % n) * n + static_cast<std::size_t>((j + n) % n)]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const double c = v[k];
      f.vx[k] = (at(i + 1, j) - at(i - 1, j)) / (2 * h);
      f.vy[k] = (at(i, j + 1) - at(i, j - 1)) / (2 * h);
      f.vxx[k] = (at(i + 1, j) - 2 * c + at(i - 1, j)) / (h * h);
      f.vyy[k] = (at(i, j + 1) - 2 * c + at(i, j - 1)) / (h * h);
      f.vxy[k] = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4 * h * h);
    }
  }
  f.v = std::move(v);
  return f;
}

double ball_integral(const BallIntegrand& f, const BallStencil& s, int i0, int j0) {
  const int n = f.grid.n;
  double acc = 0;
  for (std::size_t q = 0; q < s.di.size(); ++q) {
    const int i = ((i0 + s.di[q]) % n + n) % n, j = ((j0 + s.dj[q]) % n + n) % n;
    const std::size_t k = static_cast<std::size_t>(i) * n + j;
    const auto& m = s.moments[q];
    acc += m.m0 * f.v[k] + m.m1x * f.vx[k] + m.m1y * f.vy[k] +
           0.5 * (m.m2xx * f.vxx[k] + 2 * m.m2xy * f.vxy[k] + m.m2yy * f.vyy[k]);
  }
  return acc;
}

NodeOffset node_offset(double h, Point x0) {
  const double a = x0[0] / h, b = x0[1] / h;
  NodeOffset o{static_cast<int>(std::floor(a)), static_cast<int>(std::floor(b)), 0, 0};
  o.fx = a - o.i;
  o.fy = b - o.j;
  return o;
}

const BallStencil& StencilCache::get(const NodeOffset& o) {
  const std::pair<long long, long long> key{std::llround(o.fx * 1e9), std::llround(o.fy * 1e9)};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, ball_stencil(h_, R_, o.fx, o.fy)).first->second;
}

double ball_integral(const GridSpec& g, const std::vector<double>& v, Point x0, double R) {
  const auto f = ball_integrand(g, v);
  const auto o = node_offset(g.spacing(), x0);
  return ball_integral(f, ball_stencil(g.spacing(), R, o.fx, o.fy), o.i, o.j);
}

double ball_max(const GridSpec& g, const std::vector<double>& v, Point x0, double R) {
  const int n = g.n;
  const double h = g.spacing();
  const int i0 = static_cast<int>(std::floor((x0[0] - R) / h)), i1 = static_cast<int>(std::ceil((x0[0] + R) / h));
  const int j0 = static_cast<int>(std::floor((x0[1] - R) / h)), j1 = static_cast<int>(std::ceil((x0[1] + R) / h));
  const double r2 = R * R * (1 + 1e-12);
  double out = 0;
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j) {
      const double d1 = i * h - x0[0], d2 = j * h - x0[1];
      if (d1 * d1 + d2 * d2 > r2) continue;
      out = std::max(out, v[static_cast<std::size_t>(((i % n) + n) % n) * n + static_cast<std::size_t>(((j % n) + n) % n)]);
    }
  return out;
}

}  // namespace delab::detail

#include "delab/weighted_norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <json.hpp>
#include <numbers>

#include "ball_quadrature.hpp"
#include "delab/field_factory.hpp"
#include "delab/parallel.hpp"

namespace delab {

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::theta: return "theta";
    case WeightKind::theta_scaled: return "theta_scaled";
    case WeightKind::exp: return "exp";
    case WeightKind::exp_smooth: return "exp_smooth";
    case WeightKind::cutoff: return "cutoff";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
  for (auto k : {WeightKind::theta, WeightKind::theta_scaled, WeightKind::exp, WeightKind::exp_smooth, WeightKind::cutoff})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown weight kind '" + name + "'");
}

void WeightSpec::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) throw std::invalid_argument("weight scale must be positive");
  if (kind == WeightKind::exp_smooth && !(core > 0)) throw std::invalid_argument("exp_smooth core must be positive");
}

double cutoff_profile(double s) {
  s = std::abs(s);
  if (s <= 1) return 1;
  if (s >= 2) return 0;
  const double t = s - 1;
  return std::max(0.0, 1 - t * t * t * (10 - 15 * t + 6 * t * t));
}

double cutoff_profile_derivative(double s) {
  s = std::abs(s);
  if (s <= 1 || s >= 2) return 0;
  const double t = s - 1;
  return -30 * t * t * (1 - t) * (1 - t);
}

double cutoff_gradient_constant() {
  double c = 0;
  const int samples = 200000;
  for (int k = 1; k < samples; ++k) {
    const double s = 1 + static_cast<double>(k) / samples;
    const double q = cutoff_profile(s);
    if (q <= 0) continue;
    c = std::max(c, std::abs(cutoff_profile_derivative(s)) / std::sqrt(q));
  }
  return c;
}

namespace {

struct Distance {
  double value;  // distance used by the weight
  Point grad;    // gradient of the distance with respect to x (zero at the center)
};

Distance distance_of(const WeightSpec& spec, Point d, double period) {
  if (spec.kind == WeightKind::exp_smooth && period > 0) {
    const double a = std::numbers::pi / period;
    const double s1 = std::sin(a * d[0]), s2 = std::sin(a * d[1]);
    const double v = std::sqrt(s1 * s1 + s2 * s2) / a;
    if (v == 0) return {0, {0, 0}};
    // d/dx1 of v^2 / 2 = sin(2 a d1) / (2 a)
    return {v, {std::sin(2 * a * d[0]) / (2 * a * v), std::sin(2 * a * d[1]) / (2 * a * v)}};
  }
  const double r = std::hypot(d[0], d[1]);
  if (r == 0) return {0, {0, 0}};
  return {r, {d[0] / r, d[1] / r}};
}

double weight_of(const WeightSpec& spec, double r) {
  switch (spec.kind) {
    case WeightKind::theta: return 1 / (1 + r * r * r);
    case WeightKind::theta_scaled: return 1 / (spec.scale * spec.scale * spec.scale + r * r * r);
    case WeightKind::exp: return std::exp(-spec.scale * r);
    case WeightKind::exp_smooth: return std::exp(-spec.scale * (std::sqrt(spec.core * spec.core + r * r) - spec.core));
    case WeightKind::cutoff: return cutoff_profile(r / spec.scale);
  }
  return 0;
}

// d weight / d r
double weight_slope(const WeightSpec& spec, double r) {
  switch (spec.kind) {
    case WeightKind::theta: {
      const double q = 1 + r * r * r;
      return -3 * r * r / (q * q);
    }
    case WeightKind::theta_scaled: {
      const double q = spec.scale * spec.scale * spec.scale + r * r * r;
      return -3 * r * r / (q * q);
    }
    case WeightKind::exp: return -spec.scale * std::exp(-spec.scale * r);
    case WeightKind::exp_smooth: {
      const double rho = std::sqrt(spec.core * spec.core + r * r);
      return -spec.scale * r / rho * std::exp(-spec.scale * (rho - spec.core));
    }
    case WeightKind::cutoff: return cutoff_profile_derivative(r / spec.scale) / spec.scale;
  }
  return 0;
}

}  // namespace

double weight_eval(const WeightSpec& spec, Point x, double period) {
  spec.validate();
  return weight_of(spec, distance_of(spec, {x[0] - spec.center[0], x[1] - spec.center[1]}, period).value);
}

Point weight_gradient(const WeightSpec& spec, Point x, double period) {
  spec.validate();
  const auto d = distance_of(spec, {x[0] - spec.center[0], x[1] - spec.center[1]}, period);
  const double s = weight_slope(spec, d.value);
  return {s * d.grad[0], s * d.grad[1]};
}

ScalarField weight_field(const GridSpec& g, const WeightSpec& spec) {
  spec.validate();
  return ScalarField::from_function(g, [&](double x, double y) {
    return weight_of(spec, distance_of(spec, min_image(g, {x, y}, spec.center), g.box_length).value);
  });
}

VectorField weight_gradient_field(const GridSpec& g, const WeightSpec& spec) {
  spec.validate();
  auto component = [&](int k) {
    return ScalarField::from_function(g, [&](double x, double y) {
      const auto d = distance_of(spec, min_image(g, {x, y}, spec.center), g.box_length);
      return weight_slope(spec, d.value) * d.grad[k];
    });
  };
  return {component(0), component(1)};
}

std::string NormReport::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["params"] = {{"p", std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p)},
                 {"R", radius},
                 {"x0", {center[0], center[1]}},
                 {"weight", weight}};
  j["value"] = value;
  j["sample_centers"] = sample_centers;
  if (flagged) j["flagged"] = true;
  return j.dump();
}

std::vector<Point> center_grid(const GridSpec& g, double R, Point anchor) {
  if (!(R > 0)) throw BallError("ball radius must be positive");
  const double L = g.box_length;
  // Smallest count dividing n keeps every center at the same offset from the grid.
  int m = static_cast<int>(std::ceil(2 * L / R - 1e-9));
  for (int c = m; c <= g.n; ++c) {
    if (g.n % c == 0) {
      m = c;
      break;
    }
  }
  const double stride = L / m;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      out.push_back({std::fmod(anchor[0] + a * stride, L), std::fmod(anchor[1] + b * stride, L)});
  return out;
}

namespace {

void check_ball(const GridSpec& g, double p, double R) {
  if (!(R > 0)) throw BallError("ball radius must be positive");
  if (R > 0.25 * g.box_length * (1 + 1e-12))
    throw BallError("ball radius " + std::to_string(R) + " exceeds L/4 = " + std::to_string(0.25 * g.box_length));
  if (!(p >= 1)) throw std::invalid_argument("norm exponent p must be >= 1");
}

// |v|^p scaled by the field maximum to keep large p finite; returns the scale.
double powered(const std::vector<double>& mag, double p, std::vector<double>& out) {
  double m = 0;
  for (double v : mag) m = std::max(m, v);
  out.resize(mag.size());
  if (m == 0 || std::isinf(p)) {
    out = mag;
    return m == 0 ? 0 : 1;
  }
  for (std::size_t k = 0; k < mag.size(); ++k) out[k] = std::pow(mag[k] / m, p);
  return m;
}

double ball_value(const GridSpec& g, const std::vector<double>& pw, double scale, double p, double R, Point x0) {
  if (scale == 0) return 0;
  if (std::isinf(p)) return detail::ball_max(g, pw, x0, R);
  return scale * std::pow(std::max(0.0, detail::ball_integral(g, pw, x0, R)), 1 / p);
}

std::vector<double> ball_integrals(const GridSpec& g, std::vector<double> v, const std::vector<Point>& centers, double R) {
  const auto f = detail::ball_integrand(g, std::move(v));
  detail::StencilCache cache(g.spacing(), R);
  std::vector<detail::NodeOffset> off(centers.size());
  std::vector<const detail::BallStencil*> st(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    off[k] = detail::node_offset(g.spacing(), centers[k]);
    st[k] = &cache.get(off[k]);
  }
  std::vector<double> out(centers.size());
  parallel_for(centers.size(), [&](std::size_t k) { out[k] = detail::ball_integral(f, *st[k], off[k].i, off[k].j); });
  return out;
}

std::vector<double> magnitude_samples(const ScalarField& f) {
  auto v = f.sampled();
  for (auto& x : v) x = std::abs(x);
  return v;
}

NormReport sup_over_centers(const GridSpec& g, const std::vector<double>& mag, double p, double R,
                            const std::string& family) {
  check_ball(g, p, R);
  std::vector<double> pw;
  const double scale = powered(mag, p, pw);
  const auto centers = center_grid(g, R);
  std::vector<double> vals(centers.size(), 0.0);
  if (scale > 0) {
    if (std::isinf(p)) {
      parallel_for(centers.size(), [&](std::size_t k) { vals[k] = detail::ball_max(g, pw, centers[k], R); });
    } else {
      vals = ball_integrals(g, std::move(pw), centers, R);
      for (auto& v : vals) v = scale * std::pow(std::max(0.0, v), 1 / p);
    }
  }
  NormReport r;
  r.family = family;
  r.p = p;
  r.radius = R;
  r.sample_centers = centers.size();
  std::size_t best = 0;
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (vals[k] > vals[best]) best = k;
  r.value = vals.empty() ? 0 : vals[best];
  if (!centers.empty()) r.center = centers[best];
  return r;
}

}  // namespace

double ball_norm(const ScalarField& f, double p, double R, Point x0) {
  check_ball(f.grid(), p, R);
  std::vector<double> pw;
  const double scale = powered(magnitude_samples(f), p, pw);
  return ball_value(f.grid(), pw, scale, p, R, x0);
}

double ball_norm(const VectorField& u, double p, double R, Point x0) {
  return ball_norm(u.magnitude(), p, R, x0);
}

NormReport uniformly_local_norm(const ScalarField& f, double p, double R) {
  return sup_over_centers(f.grid(), magnitude_samples(f), p, R, "L^p_b");
}

NormReport uniformly_local_norm(const VectorField& u, double p, double R) {
  return sup_over_centers(u.grid(), u.magnitude().sampled(), p, R, "L^p_b");
}

namespace {

double weighted_from_magnitude(const GridSpec& g, const std::vector<double>& mag, double p, const WeightSpec& spec) {
  if (!(p >= 1) || std::isinf(p)) throw std::invalid_argument("weighted norm exponent must be finite and >= 1");
  const auto w = weight_field(g, spec).sampled();
  double m = 0;
  for (double v : mag) m = std::max(m, v);
  if (m == 0) return 0;
  double acc = 0;
  for (std::size_t k = 0; k < mag.size(); ++k) acc += w[k] * std::pow(mag[k] / m, p);
  return m * std::pow(acc * g.cell_area(), 1 / p);
}

}  // namespace

double weighted_norm(const ScalarField& f, double p, const WeightSpec& spec) {
  return weighted_from_magnitude(f.grid(), magnitude_samples(f), p, spec);
}

double weighted_norm(const VectorField& u, double p, const WeightSpec& spec) {
  return weighted_from_magnitude(u.grid(), u.magnitude().sampled(), p, spec);
}

NormReport hb_norm(const VectorField& u) {
  auto l2b = uniformly_local_norm(u, 2, 1.0);
  NormReport r;
  r.family = "H_b";
  r.p = 2;
  r.radius = 1;
  r.center = l2b.center;
  r.sample_centers = l2b.sample_centers;
  r.value = l2b.value + rot(u).sup_norm();
  r.flagged = relative_divergence(u) > kSolenoidalTolerance;
  return r;
}

NormReport w1p_b_norm(const VectorField& u, double p) {
  if (!(p >= 1 && p <= 64)) throw std::invalid_argument("w1p_b_norm needs p in [1, 64]");
  const auto& g = u.grid();
  const auto mag = u.magnitude().sampled();
  const auto a = derivative(u.u1, 1).sampled(), b = derivative(u.u1, 2).sampled();
  const auto c = derivative(u.u2, 1).sampled(), d = derivative(u.u2, 2).sampled();
  std::vector<double> grad(mag.size());
  double m = 0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    grad[k] = std::sqrt(a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k]);
    m = std::max({m, mag[k], grad[k]});
  }
  NormReport r;
  r.family = "W^{1,p}_b";
  r.p = p;
  r.radius = 1;
  check_ball(g, p, 1.0);
  const auto centers = center_grid(g, 1.0);
  r.sample_centers = centers.size();
  if (m == 0) return r;
  std::vector<double> pw(mag.size());
  for (std::size_t k = 0; k < mag.size(); ++k) pw[k] = std::pow(mag[k] / m, p) + std::pow(grad[k] / m, p);
  auto vals = ball_integrals(g, std::move(pw), centers, 1.0);
  for (auto& v : vals) v = m * std::pow(std::max(0.0, v), 1 / p);
  const auto best = std::max_element(vals.begin(), vals.end()) - vals.begin();
  r.value = vals[best];
  r.center = centers[best];
  return r;
}

namespace {

double outer_theta_sum(const GridSpec& g, double R, Point y0, const std::vector<Point>& centers,
                       const std::vector<double>& inner) {
  const double stride = g.box_length / std::sqrt(static_cast<double>(centers.size()));
  const WeightSpec theta{WeightKind::theta_scaled, y0, R};
  double acc = 0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const auto d = min_image(g, centers[k], y0);
    acc += weight_eval(theta, {y0[0] + d[0], y0[1] + d[1]}) * inner[k];
  }
  return acc * stride * stride;
}

}  // namespace

double z_functional(const VectorField& u, double R, Point y0) {
  const auto& g = u.grid();
  if (!(R >= 1)) throw std::invalid_argument("z_functional needs R >= 1");
  if (2 * R > 0.5 * g.box_length * (1 + 1e-12)) throw BallError("cutoff support 2R exceeds L/2");
  const int n = g.n;
  const double h = g.spacing();
  auto sq = u.magnitude().sampled();
  for (auto& v : sq) v *= v;
  const auto centers = center_grid(g, R, y0);
  struct Taps {
    std::vector<int> di, dj;
    std::vector<double> q;
  };
  std::map<std::pair<long long, long long>, Taps> cache;
  std::vector<detail::NodeOffset> off(centers.size());
  std::vector<const Taps*> taps(centers.size());
  const int reach = static_cast<int>(std::ceil(2 * R / h)) + 1;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    off[k] = detail::node_offset(h, centers[k]);
    const std::pair<long long, long long> key{std::llround(off[k].fx * 1e9), std::llround(off[k].fy * 1e9)};
    auto it = cache.find(key);
    if (it == cache.end()) {
      Taps t;
      for (int i = -reach; i <= reach + 1; ++i)
        for (int j = -reach; j <= reach + 1; ++j) {
          const double q = cutoff_profile(std::hypot((i - off[k].fx) * h, (j - off[k].fy) * h) / R);
          if (q == 0) continue;
          t.di.push_back(i);
          t.dj.push_back(j);
          t.q.push_back(q);
        }
      it = cache.emplace(key, std::move(t)).first;
    }
    taps[k] = &it->second;
  }
  std::vector<double> inner(centers.size());
  parallel_for(centers.size(), [&](std::size_t k) {
    const Taps& t = *taps[k];
    double acc = 0;
    for (std::size_t q = 0; q < t.q.size(); ++q) {
      const int i = ((off[k].i + t.di[q]) % n + n) % n, j = ((off[k].j + t.dj[q]) % n + n) % n;
      acc += t.q[q] * sq[static_cast<std::size_t>(i) * n + j];
    }
    inner[k] = acc * h * h;
  });
  return outer_theta_sum(g, R, y0, centers, inner);
}

double theta_ball_functional(const VectorField& u, double R, Point y0, double kappa) {
  const auto& g = u.grid();
  check_ball(g, 2, kappa * R);
  auto sq = u.magnitude().sampled();
  for (auto& v : sq) v *= v;
  const auto centers = center_grid(g, R, y0);
  auto inner = ball_integrals(g, std::move(sq), centers, kappa * R);
  for (auto& v : inner) v = std::max(0.0, v);
  return outer_theta_sum(g, R, y0, centers, inner);
}

double theta_ball_lp(const ScalarField& f, double p, double R, Point y0) {
  const auto& g = f.grid();
  check_ball(g, p, R);
  if (std::isinf(p)) throw std::invalid_argument("theta_ball_lp needs finite p");
  std::vector<double> pw;
  const double scale = powered(magnitude_samples(f), p, pw);
  if (scale == 0) return 0;
  const auto centers = center_grid(g, R, y0);
  auto inner = ball_integrals(g, std::move(pw), centers, R);
  for (auto& v : inner) v = scale * std::pow(std::max(0.0, v), 1 / p);
  return outer_theta_sum(g, R, y0, centers, inner);
}

}  // namespace delab

#include "delab/spectral_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "spectral_detail.hpp"

namespace delab {

namespace {

class FftPlans {
 public:
  explicit FftPlans(int n) : n_(n) {
    std::vector<double> re(static_cast<std::size_t>(n) * n);
    std::vector<Complex> co(static_cast<std::size_t>(n) * (n / 2 + 1));
    auto* cp = reinterpret_cast<fftw_complex*>(co.data());
    forward_ = fftw_plan_dft_r2c_2d(n, n, re.data(), cp, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inverse_ = fftw_plan_dft_c2r_2d(n, n, cp, re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void forward(double* in, Complex* out) const {
    fftw_execute_dft_r2c(forward_, in, reinterpret_cast<fftw_complex*>(out));
  }
  // c2r overwrites its input; callers pass a scratch copy.
  void inverse(Complex* in, double* out) const {
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  int n_;
  fftw_plan forward_{};
  fftw_plan inverse_{};
};

const FftPlans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<FftPlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlans>(n);
  return *slot;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (a != b) throw GridMismatch(std::string(what) + ": fields live on different grids");
}

}  // namespace

void GridSpec::validate() const {
  if (n < 16 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("grid.n must be a power of two >= 16 (got " + std::to_string(n) + ")");
  }
  if (!(box_length > 0) || !std::isfinite(box_length)) {
    throw std::invalid_argument("grid.box_length must be positive and finite");
  }
  if (!(dealias_fraction > 0 && dealias_fraction <= 1)) {
    throw std::invalid_argument("grid.dealias_fraction must lie in (0, 1]");
  }
}

int GridSpec::retained_modes() const {
  // Strict inequality keeps the 2/3 rule alias-free for quadratic products.
  double band = dealias_fraction * n / 2.0;
  int k = static_cast<int>(std::floor(band));
  if (dealias_fraction < 1.0 && k == band) --k;
  return std::min(k, n / 2);
}

double GridSpec::wavenumber(int mode) const { return 2.0 * std::numbers::pi * mode / box_length; }

namespace detail {

Spectrum forward(const GridSpec& g, const Samples& f) {
  Samples scratch = f;
  Spectrum c(g.modes());
  plans_for(g.n).forward(scratch.data(), c.data());
  const double norm = 1.0 / static_cast<double>(g.points());
  for (auto& v : c) v *= norm;
  return c;
}

Samples inverse(const GridSpec& g, const Spectrum& c) {
  Spectrum scratch = c;
  Samples f(g.points());
  plans_for(g.n).inverse(scratch.data(), f.data());
  return f;
}

Spectrum differentiate(const GridSpec& g, const Spectrum& c, int axis) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
  const int n = g.n, h = n / 2 + 1;
  Spectrum out(c.size());
  for (int i = 0; i < n; ++i) {
    const int m1 = g.mode1(i);
    for (int j = 0; j < h; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * h + j;
      const int m = axis == 1 ? m1 : j;
      if (std::abs(m) == n / 2) {
        out[idx] = 0.0;
      } else {
        out[idx] = c[idx] * Complex(0.0, g.wavenumber(m));
      }
    }
  }
  return out;
}

void truncate(const GridSpec& g, Spectrum& c) {
  const int n = g.n, h = n / 2 + 1, k = g.retained_modes();
  for (int i = 0; i < n; ++i) {
    const bool row_out = std::abs(g.mode1(i)) > k;
    for (int j = 0; j < h; ++j) {
      if (row_out || j > k) c[static_cast<std::size_t>(i) * h + j] = 0.0;
    }
  }
}

Spectrum invert_laplacian(const GridSpec& g, const Spectrum& omega) {
  const int n = g.n, h = n / 2 + 1;
  Spectrum psi(omega.size());
  for (int i = 0; i < n; ++i) {
    const double k1 = g.wavenumber(g.mode1(i));
    for (int j = 0; j < h; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * h + j;
      const double k2 = g.wavenumber(j);
      const double kk = k1 * k1 + k2 * k2;
      psi[idx] = kk > 0 ? omega[idx] / kk : Complex(0.0);
    }
  }
  return psi;
}

Velocity velocity_from_vorticity(const GridSpec& g, const Spectrum& omega) {
  Spectrum psi = invert_laplacian(g, omega);
  Spectrum d2 = differentiate(g, psi, 2);
  Spectrum d1 = differentiate(g, psi, 1);
  for (auto& v : d2) v = -v;
  return {inverse(g, d2), inverse(g, d1)};
}

PointEval evaluate(const GridSpec& g, const Spectrum& c, double x1, double x2) {
  const int n = g.n, h = n / 2 + 1;
  std::vector<Complex> e1(n), e2(h);
  for (int i = 0; i < n; ++i) {
    const double k = g.wavenumber(g.mode1(i));
    e1[i] = {std::cos(k * x1), std::sin(k * x1)};
  }
  for (int j = 0; j < h; ++j) {
    const double k = g.wavenumber(j);
    e2[j] = {std::cos(k * x2), std::sin(k * x2)};
  }
  Complex f{}, fx{}, fy{}, fxx{}, fxy{}, fyy{};
  for (int i = 0; i < n; ++i) {
    if (std::abs(g.mode1(i)) == n / 2) continue;
    const double k1 = g.wavenumber(g.mode1(i));
    for (int j = 0; j < h - 1; ++j) {
      const Complex v = c[static_cast<std::size_t>(i) * h + j] * e1[i] * e2[j] * (j == 0 ? 1.0 : 2.0);
      const double k2 = g.wavenumber(j);
      f += v;
      fx += v * Complex(0, k1);
      fy += v * Complex(0, k2);
      fxx -= v * (k1 * k1);
      fxy -= v * (k1 * k2);
      fyy -= v * (k2 * k2);
    }
  }
  return {f.real(), fx.real(), fy.real(), fxx.real(), fxy.real(), fyy.real()};
}

}  // namespace detail

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), phys_(grid.points(), 0.0) {
  grid_.validate();
}

ScalarField ScalarField::from_values(const GridSpec& grid, std::vector<double> values) {
  grid.validate();
  if (values.size() != grid.points()) throw std::invalid_argument("value count does not match grid");
  ScalarField f;
  f.grid_ = grid;
  f.rep_ = Representation::physical;
  f.phys_ = std::move(values);
  return f;
}

ScalarField ScalarField::from_coefficients(const GridSpec& grid, std::vector<Complex> coefficients) {
  grid.validate();
  if (coefficients.size() != grid.modes()) throw std::invalid_argument("coefficient count does not match grid");
  ScalarField f;
  f.grid_ = grid;
  f.rep_ = Representation::spectral;
  f.spec_ = std::move(coefficients);
  return f;
}

ScalarField ScalarField::from_function(const GridSpec& grid,
                                       const std::function<double(double, double)>& fn) {
  grid.validate();
  std::vector<double> v(grid.points());
  const double h = grid.spacing();
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) v[static_cast<std::size_t>(i) * grid.n + j] = fn(i * h, j * h);
  return from_values(grid, std::move(v));
}

ScalarField ScalarField::constant(const GridSpec& grid, double c) {
  grid.validate();
  return from_values(grid, std::vector<double>(grid.points(), c));
}

ScalarField ScalarField::to_physical() const {
  if (rep_ == Representation::physical) return *this;
  return from_values(grid_, detail::inverse(grid_, spec_));
}

ScalarField ScalarField::to_spectral() const {
  if (rep_ == Representation::spectral) return *this;
  return from_coefficients(grid_, detail::forward(grid_, phys_));
}

const std::vector<double>& ScalarField::values() const {
  if (rep_ != Representation::physical) throw std::logic_error("field is in spectral representation");
  return phys_;
}

const std::vector<Complex>& ScalarField::coefficients() const {
  if (rep_ != Representation::spectral) throw std::logic_error("field is in physical representation");
  return spec_;
}

std::vector<double> ScalarField::sampled() const {
  return rep_ == Representation::physical ? phys_ : detail::inverse(grid_, spec_);
}

std::vector<Complex> ScalarField::spectrum() const {
  return rep_ == Representation::spectral ? spec_ : detail::forward(grid_, phys_);
}

double ScalarField::at(int i, int j) const {
  const int n = grid_.n;
  i = ((i % n) + n) % n;
  j = ((j % n) + n) % n;
  if (rep_ == Representation::physical) return phys_[static_cast<std::size_t>(i) * n + j];
  return sampled()[static_cast<std::size_t>(i) * n + j];
}

double ScalarField::max_abs() const {
  double m = 0;
  for (double v : sampled()) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::mean() const {
  if (rep_ == Representation::spectral) return spec_[0].real();
  double s = 0;
  for (double v : phys_) s += v;
  return s / static_cast<double>(phys_.size());
}

double ScalarField::l2() const {
  double s = 0;
  for (double v : sampled()) s += v * v;
  return std::sqrt(s * grid_.cell_area());
}

double ScalarField::sup_norm() const {
  const auto v = sampled();
  const auto c = spectrum();
  const int n = grid_.n;
  const double h = grid_.spacing();
  double best = 0;
  for (double x : v) best = std::max(best, std::abs(x));
  if (best == 0) return 0;

  struct Cand {
    double value;
    int i, j;
  };
  std::vector<Cand> cands;
  auto val = [&](int i, int j) {
    i = (i + n) % n;
    j = (j + n) % n;
    return std::abs(v[static_cast<std::size_t>(i) * n + j]);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = val(i, j);
      bool peak = true;
      for (int di = -1; di <= 1 && peak; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && val(i + di, j + dj) > a) {
            peak = false;
            break;
          }
      if (peak) cands.push_back({a, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.value > b.value; });
  if (cands.size() > 8) cands.resize(8);

  for (const auto& cd : cands) {
    double x1 = cd.i * h, x2 = cd.j * h;
    auto e = detail::evaluate(grid_, c, x1, x2);
    const double s = e.f >= 0 ? 1.0 : -1.0;
    double cur = s * e.f;
    for (int it = 0; it < 40; ++it) {
      const double gx = s * e.fx, gy = s * e.fy;
      const double hxx = s * e.fxx, hxy = s * e.fxy, hyy = s * e.fyy;
      const double det = hxx * hyy - hxy * hxy;
      double sx, sy;
      if (hxx < 0 && det > 0) {
        sx = -(hyy * gx - hxy * gy) / det;
        sy = -(-hxy * gx + hxx * gy) / det;
      } else {
        const double gn = std::hypot(gx, gy);
        if (gn == 0) break;
        sx = 0.25 * h * gx / gn;
        sy = 0.25 * h * gy / gn;
      }
      const double len = std::hypot(sx, sy);
      if (len > h) {
        sx *= h / len;
        sy *= h / len;
      }
      bool moved = false;
      for (int half = 0; half < 30; ++half) {
        auto trial = detail::evaluate(grid_, c, x1 + sx, x2 + sy);
        if (s * trial.f >= cur) {
          x1 += sx;
          x2 += sy;
          e = trial;
          cur = s * trial.f;
          moved = true;
          break;
        }
        sx *= 0.5;
        sy *= 0.5;
      }
      if (!moved || std::hypot(sx, sy) < 1e-14 * grid_.box_length) break;
    }
    best = std::max(best, cur);
  }
  return best;
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
  require_same_grid(grid_, o.grid_, "addition");
  if (rep_ == Representation::spectral && o.rep_ == Representation::spectral) {
    auto c = spec_;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.spec_[k];
    return from_coefficients(grid_, std::move(c));
  }
  auto a = sampled();
  const auto b = o.sampled();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return from_values(grid_, std::move(a));
}

ScalarField ScalarField::operator-(const ScalarField& o) const { return *this + o * -1.0; }

ScalarField ScalarField::operator*(double s) const {
  if (rep_ == Representation::spectral) {
    auto c = spec_;
    for (auto& v : c) v *= s;
    return from_coefficients(grid_, std::move(c));
  }
  auto a = phys_;
  for (auto& v : a) v *= s;
  return from_values(grid_, std::move(a));
}

ScalarField ScalarField::times(const ScalarField& o) const {
  require_same_grid(grid_, o.grid_, "product");
  auto a = sampled();
  const auto b = o.sampled();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  return from_values(grid_, std::move(a));
}

VectorField::VectorField(ScalarField a, ScalarField b) : u1(std::move(a)), u2(std::move(b)) {
  require_same_grid(u1.grid(), u2.grid(), "vector field");
}

ScalarField VectorField::magnitude() const {
  auto a = u1.sampled();
  const auto b = u2.sampled();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::hypot(a[k], b[k]);
  return ScalarField::from_values(grid(), std::move(a));
}

double VectorField::max_abs() const { return magnitude().max_abs(); }

double VectorField::l2() const {
  return std::hypot(u1.l2(), u2.l2());
}

VectorField VectorField::shifted(double c1, double c2) const {
  return {u1 + ScalarField::constant(grid(), c1), u2 + ScalarField::constant(grid(), c2)};
}

ScalarField derivative(const ScalarField& f, int axis) {
  const auto& g = f.grid();
  return ScalarField::from_values(g, detail::inverse(g, detail::differentiate(g, f.spectrum(), axis)));
}

ScalarField rot(const VectorField& u) {
  require_same_grid(u.u1.grid(), u.u2.grid(), "rot");
  const auto& g = u.grid();
  auto a = detail::differentiate(g, u.u1.spectrum(), 2);
  const auto b = detail::differentiate(g, u.u2.spectrum(), 1);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return ScalarField::from_values(g, detail::inverse(g, a));
}

ScalarField divergence(const VectorField& u) {
  require_same_grid(u.u1.grid(), u.u2.grid(), "divergence");
  const auto& g = u.grid();
  auto a = detail::differentiate(g, u.u1.spectrum(), 1);
  const auto b = detail::differentiate(g, u.u2.spectrum(), 2);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return ScalarField::from_values(g, detail::inverse(g, a));
}

VectorField gradient(const ScalarField& f) { return {derivative(f, 1), derivative(f, 2)}; }

ScalarField laplacian(const ScalarField& f) {
  const auto& g = f.grid();
  auto c = f.spectrum();
  const int n = g.n, h = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const double k1 = g.wavenumber(g.mode1(i));
    for (int j = 0; j < h; ++j) {
      const double k2 = g.wavenumber(j);
      c[static_cast<std::size_t>(i) * h + j] *= -(k1 * k1 + k2 * k2);
    }
  }
  return ScalarField::from_values(g, detail::inverse(g, c));
}

ScalarField dealias(const ScalarField& f) {
  auto c = f.spectrum();
  detail::truncate(f.grid(), c);
  return ScalarField::from_values(f.grid(), detail::inverse(f.grid(), c));
}

namespace {

void require_zero_mean(const ScalarField& omega, const std::vector<Complex>& c) {
  const double scale = omega.max_abs() + 1.0;
  if (std::abs(c[0].real()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "vorticity has box mean " << c[0].real()
       << "; the periodic Poisson problem -Lap psi = omega requires zero mean";
    throw SolvabilityError(os.str());
  }
}

}  // namespace

ScalarField streamfunction(const ScalarField& omega) {
  const auto& g = omega.grid();
  const auto c = omega.spectrum();
  require_zero_mean(omega, c);
  return ScalarField::from_values(g, detail::inverse(g, detail::invert_laplacian(g, c)));
}

VectorField biot_savart(const ScalarField& omega) {
  const auto& g = omega.grid();
  const auto c = omega.spectrum();
  require_zero_mean(omega, c);
  auto vel = detail::velocity_from_vorticity(g, c);
  return {ScalarField::from_values(g, std::move(vel.u1)), ScalarField::from_values(g, std::move(vel.u2))};
}

double relative_divergence(const VectorField& u) {
  const auto& g = u.grid();
  const auto c1 = u.u1.spectrum(), c2 = u.u2.spectrum();
  double grad_max = 0;
  for (const auto* c : {&c1, &c2}) {
    for (int axis = 1; axis <= 2; ++axis) {
      for (double v : detail::inverse(g, detail::differentiate(g, *c, axis)))
        grad_max = std::max(grad_max, std::abs(v));
    }
  }
  return divergence(u).max_abs() / (grad_max + 1.0);
}

PressureResult pressure_gradient_spectral(const VectorField& u) {
  require_same_grid(u.u1.grid(), u.u2.grid(), "pressure");
  const auto& g = u.grid();
  const auto a = u.u1.sampled(), b = u.u2.sampled();
  detail::Samples w11(a.size()), w12(a.size()), w22(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    w11[k] = a[k] * a[k];
    w12[k] = a[k] * b[k];
    w22[k] = b[k] * b[k];
  }
  const auto c11 = detail::forward(g, w11), c12 = detail::forward(g, w12), c22 = detail::forward(g, w22);
  const int n = g.n, h = n / 2 + 1;
  detail::Spectrum p(g.modes());
  for (int i = 0; i < n; ++i) {
    const double k1 = g.wavenumber(g.mode1(i));
    for (int j = 0; j < h; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * h + j;
      const double k2 = g.wavenumber(j);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0 || detail::is_nyquist(g, i, j)) {
        p[idx] = 0.0;
        continue;
      }
      p[idx] = -(k1 * k1 * c11[idx] + 2.0 * k1 * k2 * c12[idx] + k2 * k2 * c22[idx]) / kk;
    }
  }
  PressureResult r;
  r.pressure = ScalarField::from_values(g, detail::inverse(g, p));
  r.gradient = {ScalarField::from_values(g, detail::inverse(g, detail::differentiate(g, p, 1))),
                ScalarField::from_values(g, detail::inverse(g, detail::differentiate(g, p, 2)))};
  r.divergence_max = divergence(u).max_abs();
  r.non_solenoidal = relative_divergence(u) > kSolenoidalTolerance;
  return r;
}

ScalarField nonlinear_term(const VectorField& u, const ScalarField& omega) {
  require_same_grid(u.u1.grid(), u.u2.grid(), "nonlinear term");
  require_same_grid(u.grid(), omega.grid(), "nonlinear term");
  const auto& g = omega.grid();
  auto cw = omega.spectrum();
  auto c1 = u.u1.spectrum(), c2 = u.u2.spectrum();
  detail::truncate(g, cw);
  detail::truncate(g, c1);
  detail::truncate(g, c2);
  const auto wx = detail::inverse(g, detail::differentiate(g, cw, 1));
  const auto wy = detail::inverse(g, detail::differentiate(g, cw, 2));
  const auto a = detail::inverse(g, c1), b = detail::inverse(g, c2);
  detail::Samples prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a[k] * wx[k] + b[k] * wy[k];
  auto cp = detail::forward(g, prod);
  detail::truncate(g, cp);
  return ScalarField::from_values(g, detail::inverse(g, cp));
}

}  // namespace delab

#include "kms/synthesis.hpp"

#include "kms/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace kms {

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double bump_profile_derivative(double r) {
  if (r >= 1.0) return 0.0;
  const double d = 1.0 - r * r;
  return bump_profile(r) * (-2.0 * r / (d * d));
}

double Bump::value(const Vec3& x) const {
  const double r = (x - center).norm() / radius;
  if (r >= 1.0) return 0.0;
  return std::exp(power * (1.0 - 1.0 / (1.0 - r * r)));
}

Vec3 Bump::gradient(const Vec3& x) const {
  const Vec3 d = x - center;
  const double dist = d.norm();
  if (dist == 0.0 || dist >= radius) return Vec3::Zero();
  const double r = dist / radius;
  const double q = 1.0 - r * r;
  const double dvalue = std::exp(power * (1.0 - 1.0 / q)) * power * (-2.0 * r / (q * q));
  return (dvalue / (radius * dist)) * d;
}

TrigPolynomial::TrigPolynomial(int components, int kmax, std::array<double, 3> period,
                               Vec3 origin, std::vector<Complex> coefficients)
    : components_(components),
      kmax_(kmax),
      period_(period),
      origin_(std::move(origin)),
      coeffs_(std::move(coefficients)) {
  if (components_ < 1 || kmax_ < 0) throw std::invalid_argument("invalid trig polynomial shape");
  for (double p : period_)
    if (!(p > 0.0)) throw std::invalid_argument("trig polynomial period must be positive");
  const std::size_t m = modes_per_axis();
  if (coeffs_.size() != static_cast<std::size_t>(components_) * m * m * m)
    throw std::invalid_argument("trig polynomial coefficient count mismatch");
}

TrigPolynomial TrigPolynomial::random(std::uint64_t seed, int components, int kmax,
                                      std::array<double, 3> period, Vec3 origin, bool zero_mean) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t m = 2 * kmax + 1;
  std::vector<Complex> c(static_cast<std::size_t>(components) * m * m * m);
  for (auto& z : c) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = {re, im};
  }
  TrigPolynomial p(components, kmax, period, std::move(origin), std::move(c));
  if (zero_mean)
    for (int comp = 0; comp < components; ++comp) p.coefficient(comp, 0, 0, 0) = 0.0;
  return p;
}

std::size_t TrigPolynomial::offset(int c, int kx, int ky, int kz) const {
  const std::size_t m = modes_per_axis();
  return ((static_cast<std::size_t>(c) * m + (kx + kmax_)) * m + (ky + kmax_)) * m + (kz + kmax_);
}

TrigPolynomial::Complex& TrigPolynomial::coefficient(int c, int kx, int ky, int kz) {
  return coeffs_[offset(c, kx, ky, kz)];
}

TrigPolynomial::Complex TrigPolynomial::coefficient(int c, int kx, int ky, int kz) const {
  return coeffs_[offset(c, kx, ky, kz)];
}

std::vector<double> TrigPolynomial::sample(const GridGeometry& g, int c, int derivative_axis) const {
  const int m = modes_per_axis();
  const auto& n = g.dims();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // table[a][k][i] = exp(2 pi i k (x_i - o_a)/P_a), with the derivative factor
  // folded into the differentiated axis.
  std::array<std::vector<Complex>, 3> table;
  for (int a = 0; a < 3; ++a) {
    table[a].resize(static_cast<std::size_t>(m) * n[a]);
    for (int k = -kmax_; k <= kmax_; ++k) {
      const double w = two_pi * k / period_[a];
      const Complex factor = a == derivative_axis ? Complex(0.0, w) : Complex(1.0, 0.0);
      for (int i = 0; i < n[a]; ++i) {
        const double phase = w * (g.coordinate(a, i) - origin_(a));
        table[a][static_cast<std::size_t>(k + kmax_) * n[a] + i] =
            factor * Complex(std::cos(phase), std::sin(phase));
      }
    }
  }

  const std::size_t mm = m;
  // s1[(ax*m + ay)*nz + iz] = sum_kz a * Ez
  std::vector<Complex> s1(mm * mm * n[2]);
  for (int ax = 0; ax < m; ++ax)
    for (int ay = 0; ay < m; ++ay)
      for (int az = 0; az < m; ++az) {
        const Complex coef = coeffs_[offset(c, ax - kmax_, ay - kmax_, az - kmax_)];
        const Complex* ez = &table[2][static_cast<std::size_t>(az) * n[2]];
        Complex* dst = &s1[(static_cast<std::size_t>(ax) * m + ay) * n[2]];
        for (int iz = 0; iz < n[2]; ++iz) dst[iz] += coef * ez[iz];
      }
  // s2[(ax*ny + iy)*nz + iz] = sum_ky s1 * Ey
  std::vector<Complex> s2(mm * n[1] * n[2]);
  for (int ax = 0; ax < m; ++ax)
    for (int ay = 0; ay < m; ++ay) {
      const Complex* src = &s1[(static_cast<std::size_t>(ax) * m + ay) * n[2]];
      for (int iy = 0; iy < n[1]; ++iy) {
        const Complex ey = table[1][static_cast<std::size_t>(ay) * n[1] + iy];
        Complex* dst = &s2[(static_cast<std::size_t>(ax) * n[1] + iy) * n[2]];
        for (int iz = 0; iz < n[2]; ++iz) dst[iz] += src[iz] * ey;
      }
    }
  std::vector<double> out(g.size(), 0.0);
  const std::size_t plane = static_cast<std::size_t>(n[1]) * n[2];
  for (int ax = 0; ax < m; ++ax) {
    const Complex* src = &s2[static_cast<std::size_t>(ax) * plane];
    for (int ix = 0; ix < n[0]; ++ix) {
      const Complex ex = table[0][static_cast<std::size_t>(ax) * n[0] + ix];
      double* dst = &out[static_cast<std::size_t>(ix) * plane];
      for (std::size_t j = 0; j < plane; ++j) dst[j] += (src[j] * ex).real();
    }
  }
  return out;
}

std::vector<TrigPolynomial::Complex> trig_moments(const GridGeometry& g, std::span<const double> u,
                                                   int kmax, const std::array<double, 3>& period,
                                                   const Vec3& origin) {
  using Complex = TrigPolynomial::Complex;
  if (u.size() != g.size()) throw std::invalid_argument("trig_moments: size mismatch");
  const int m = 2 * kmax + 1;
  const auto& n = g.dims();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::array<std::vector<Complex>, 3> table;
  for (int a = 0; a < 3; ++a) {
    table[a].resize(static_cast<std::size_t>(m) * n[a]);
    for (int k = -kmax; k <= kmax; ++k)
      for (int i = 0; i < n[a]; ++i) {
        const double phase = two_pi * k / period[a] * (g.coordinate(a, i) - origin(a));
        table[a][static_cast<std::size_t>(k + kmax) * n[a] + i] = {std::cos(phase), std::sin(phase)};
      }
  }
  const std::size_t plane = static_cast<std::size_t>(n[1]) * n[2];
  // t1[(ax*ny + iy)*nz + iz] = sum_ix u * Ex
  std::vector<Complex> t1(static_cast<std::size_t>(m) * plane);
  for (int ax = 0; ax < m; ++ax) {
    Complex* dst = &t1[static_cast<std::size_t>(ax) * plane];
    for (int ix = 0; ix < n[0]; ++ix) {
      const Complex ex = table[0][static_cast<std::size_t>(ax) * n[0] + ix];
      const double* src = &u[static_cast<std::size_t>(ix) * plane];
      for (std::size_t j = 0; j < plane; ++j) dst[j] += src[j] * ex;
    }
  }
  // t2[(ax*m + ay)*nz + iz] = sum_iy t1 * Ey
  std::vector<Complex> t2(static_cast<std::size_t>(m) * m * n[2]);
  for (int ax = 0; ax < m; ++ax)
    for (int ay = 0; ay < m; ++ay) {
      Complex* dst = &t2[(static_cast<std::size_t>(ax) * m + ay) * n[2]];
      for (int iy = 0; iy < n[1]; ++iy) {
        const Complex ey = table[1][static_cast<std::size_t>(ay) * n[1] + iy];
        const Complex* src = &t1[(static_cast<std::size_t>(ax) * n[1] + iy) * n[2]];
        for (int iz = 0; iz < n[2]; ++iz) dst[iz] += src[iz] * ey;
      }
    }
  std::vector<Complex> out(static_cast<std::size_t>(m) * m * m);
  for (int ax = 0; ax < m; ++ax)
    for (int ay = 0; ay < m; ++ay) {
      const Complex* src = &t2[(static_cast<std::size_t>(ax) * m + ay) * n[2]];
      for (int az = 0; az < m; ++az) {
        const Complex* ez = &table[2][static_cast<std::size_t>(az) * n[2]];
        Complex acc = 0.0;
        for (int iz = 0; iz < n[2]; ++iz) acc += src[iz] * ez[iz];
        out[(static_cast<std::size_t>(ax) * m + ay) * m + az] = acc;
      }
    }
  return out;
}

double TrigPolynomial::evaluate(const Vec3& x, int c) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double sum = 0.0;
  for (int kx = -kmax_; kx <= kmax_; ++kx)
    for (int ky = -kmax_; ky <= kmax_; ++ky)
      for (int kz = -kmax_; kz <= kmax_; ++kz) {
        const double phase = two_pi * (kx * (x(0) - origin_(0)) / period_[0] +
                                       ky * (x(1) - origin_(1)) / period_[1] +
                                       kz * (x(2) - origin_(2)) / period_[2]);
        sum += (coefficient(c, kx, ky, kz) * Complex(std::cos(phase), std::sin(phase))).real();
      }
  return sum;
}

WindowedTrig::WindowedTrig(TrigPolynomial poly, std::optional<Bump> window)
    : poly_(std::move(poly)), window_(std::move(window)) {}

namespace {

std::vector<double> sample_window(const Bump& b, const GridGeometry& g) {
  std::vector<double> w(g.size());
  const auto& n = g.dims();
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < n[2]; ++iz) w[g.index(ix, iy, iz)] = b.value(g.node(ix, iy, iz));
  return w;
}

}  // namespace

Field WindowedTrig::sample(const GridGeometry& g) const {
  Field f(g, components());
  std::vector<double> w;
  if (window_) w = sample_window(*window_, g);
  for (int c = 0; c < components(); ++c) {
    auto v = poly_.sample(g, c);
    if (window_)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
    std::ranges::copy(v, f.component(c).begin());
  }
  return f;
}

Field WindowedTrig::sample_jacobian(const GridGeometry& g) const {
  Field jac(g, 3 * components());
  std::vector<double> w;
  std::array<std::vector<double>, 3> dw;
  if (window_) {
    w = sample_window(*window_, g);
    for (auto& d : dw) d.resize(g.size());
    const auto& n = g.dims();
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) {
          const std::size_t idx = g.index(ix, iy, iz);
          const Vec3 gr = window_->gradient(g.node(ix, iy, iz));
          for (int a = 0; a < 3; ++a) dw[a][idx] = gr(a);
        }
  }
  for (int c = 0; c < components(); ++c) {
    std::vector<double> value;
    if (window_) value = poly_.sample(g, c);
    for (int j = 0; j < 3; ++j) {
      auto d = poly_.sample(g, c, j);
      if (window_)
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = d[i] * w[i] + value[i] * dw[j][i];
      std::ranges::copy(d, jac.component(3 * c + j).begin());
    }
  }
  return jac;
}

std::array<double, 3> default_period(const GridGeometry& g) {
  const double scale = g.periodic() ? 1.0 : 2.0;
  return {scale * g.length(0), scale * g.length(1), scale * g.length(2)};
}

WindowedTrig band_limited_generator(std::uint64_t seed, const GridGeometry& g, int kmax,
                                    double support_radius) {
  const int min_dim = std::min({g.dims()[0], g.dims()[1], g.dims()[2]});
  if (kmax < 0 || 4 * kmax > min_dim)
    throw std::invalid_argument("kmax must satisfy 0 <= kmax <= min(dims)/4, got " +
                                std::to_string(kmax));
  const double half_width = 0.5 * std::min({g.length(0), g.length(1), g.length(2)});
  if (!(support_radius > 0.0) || !(support_radius < half_width))
    throw std::invalid_argument("support radius must lie in (0, half box width)");
  auto poly = TrigPolynomial::random(seed, 9, kmax, default_period(g), g.center());
  return WindowedTrig(std::move(poly), Bump{g.center(), support_radius});
}

MatrixField random_band_limited(std::uint64_t seed, const GridGeometry& g, int kmax,
                                double support_radius) {
  return MatrixField(band_limited_generator(seed, g, kmax, support_radius).sample(g));
}

VectorField random_solenoidal(std::uint64_t seed, const GridGeometry& g, int kmax,
                              double support_radius) {
  const double half_width = 0.5 * std::min({g.length(0), g.length(1), g.length(2)});
  if (kmax < 0) throw std::invalid_argument("kmax must be nonnegative");
  if (!(support_radius > 0.0) || !(support_radius < half_width))
    throw std::invalid_argument("support radius must lie in (0, half box width)");
  WindowedTrig w(TrigPolynomial::random(seed, 3, kmax, default_period(g), g.center()),
                 Bump{g.center(), support_radius, 4.0});
  return curl_from_jacobian(MatrixField(w.sample_jacobian(g)));
}

Field random_trig_field(std::uint64_t seed, const GridGeometry& g, int components, int kmax,
                        bool zero_mean) {
  const int min_dim = std::min({g.dims()[0], g.dims()[1], g.dims()[2]});
  if (kmax < 0 || 4 * kmax > min_dim)
    throw std::invalid_argument("kmax must satisfy 0 <= kmax <= min(dims)/4");
  auto poly = TrigPolynomial::random(seed, components, kmax, default_period(g), g.center(),
                                     zero_mean);
  return WindowedTrig(std::move(poly), std::nullopt).sample(g);
}

}  // namespace kms

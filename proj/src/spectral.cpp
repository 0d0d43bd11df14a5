#include "kms/spectral.hpp"

#include "fft.hpp"
#include "kms/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>

namespace kms {

using detail::Complex;
using detail::RealFft3;

namespace {

void require_periodic(const GridGeometry& g, const char* what) {
  if (!g.periodic()) throw std::invalid_argument(std::string(what) + " requires a periodic geometry");
}

// Unnormalised half spectra of every component.
std::vector<std::vector<Complex>> transform_all(const Field& f, const RealFft3& fft) {
  std::vector<std::vector<Complex>> out(f.components(), std::vector<Complex>(fft.half_size()));
  for (int c = 0; c < f.components(); ++c) fft.forward(f.component(c).data(), out[c].data());
  return out;
}

// Inverse of transform_all, including the 1/N normalisation; consumes `spec`.
Field inverse_all(std::vector<std::vector<Complex>>& spec, const GridGeometry& g,
                  const RealFft3& fft) {
  Field out(g, static_cast<int>(spec.size()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (int c = 0; c < out.components(); ++c) {
    auto dst = out.component(c);
    fft.inverse(spec[c].data(), dst.data());
    for (double& v : dst) v *= scale;
  }
  return out;
}

Eigen::Vector3d wavevector(const GridGeometry& g, int ix, int iy, int iz) {
  const auto k = detail::derivative_wavenumber(g, ix, iy, iz);
  return {k[0], k[1], k[2]};
}

}  // namespace

FourierField FourierField::forward(const Field& f) {
  const auto& g = f.geometry();
  require_periodic(g, "FourierField");
  RealFft3 fft(g.dims());
  auto spec = transform_all(f, fft);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto& n = g.dims();
  const double vol = g.cell_volume();
  // Node 0 sits at x0 + h/2; shifting the DFT phase there turns it into a
  // midpoint rule for the continuous transform.
  std::array<double, 3> shift{};
  for (int a = 0; a < 3; ++a) shift[a] = g.box()[a].lo + 0.5 * g.spacing(a);
  detail::for_each_mode(n, [&](int ix, int iy, int iz, std::size_t idx) {
    const double phase = -two_pi * (detail::signed_frequency(ix, n[0]) * shift[0] / g.length(0) +
                                    detail::signed_frequency(iy, n[1]) * shift[1] / g.length(1) +
                                    detail::signed_frequency(iz, n[2]) * shift[2] / g.length(2));
    const Complex factor = vol * Complex(std::cos(phase), std::sin(phase));
    for (auto& comp : spec) comp[idx] *= factor;
  });
  return FourierField(g, std::move(spec));
}

Field FourierField::inverse() const {
  RealFft3 fft(geometry_.dims());
  auto spec = coeffs_;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto& g = geometry_;
  const auto& n = g.dims();
  const double vol = g.cell_volume();
  std::array<double, 3> shift{};
  for (int a = 0; a < 3; ++a) shift[a] = g.box()[a].lo + 0.5 * g.spacing(a);
  detail::for_each_mode(n, [&](int ix, int iy, int iz, std::size_t idx) {
    const double phase = two_pi * (detail::signed_frequency(ix, n[0]) * shift[0] / g.length(0) +
                                   detail::signed_frequency(iy, n[1]) * shift[1] / g.length(1) +
                                   detail::signed_frequency(iz, n[2]) * shift[2] / g.length(2));
    const Complex factor = Complex(std::cos(phase), std::sin(phase)) / vol;
    for (auto& comp : spec) comp[idx] *= factor;
  });
  return inverse_all(spec, g, fft);
}

FourierField::Complex FourierField::coefficient(int c, int kx, int ky, int kz) const {
  const auto& n = geometry_.dims();
  auto wrap = [](int k, int m) { return ((k % m) + m) % m; };
  if (kz < 0 || kz > n[2] / 2) {
    kx = -kx;
    ky = -ky;
    kz = -kz;
    if (kz < 0 || kz > n[2] / 2) throw std::out_of_range("frequency outside the grid");
    const int ix = wrap(kx, n[0]), iy = wrap(ky, n[1]);
    return std::conj(coeffs_[c][(static_cast<std::size_t>(ix) * n[1] + iy) * (n[2] / 2 + 1) + kz]);
  }
  const int ix = wrap(kx, n[0]), iy = wrap(ky, n[1]);
  return coeffs_[c][(static_cast<std::size_t>(ix) * n[1] + iy) * (n[2] / 2 + 1) + kz];
}

HelmholtzParts helmholtz(const VectorField& v) {
  const auto& g = v.geometry();
  require_periodic(g, "helmholtz");
  RealFft3 fft(g.dims());
  auto div_spec = transform_all(v, fft);
  auto curl_spec = div_spec;
  detail::for_each_mode(g.dims(), [&](int ix, int iy, int iz, std::size_t idx) {
    const Eigen::Vector3d k = wavevector(g, ix, iy, iz);
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) {
      for (auto& c : curl_spec) c[idx] = 0.0;
      return;
    }
    const Complex proj = (k(0) * div_spec[0][idx] + k(1) * div_spec[1][idx] + k(2) * div_spec[2][idx]) / k2;
    for (int a = 0; a < 3; ++a) {
      curl_spec[a][idx] = k(a) * proj;
      div_spec[a][idx] -= curl_spec[a][idx];
    }
  });
  return {VectorField(inverse_all(div_spec, g, fft)), VectorField(inverse_all(curl_spec, g, fft))};
}

HelmholtzRows helmholtz_rows(const MatrixField& f) {
  MatrixField div_part(f.geometry());
  MatrixField curl_part(f.geometry());
  for (int i = 0; i < 3; ++i) {
    auto parts = helmholtz(f.row(i));
    div_part.set_row(i, parts.div_free);
    curl_part.set_row(i, parts.curl_free);
  }
  return {std::move(div_part), std::move(curl_part)};
}

Field riesz(const Field& f, double s) {
  const auto& g = f.geometry();
  require_periodic(g, "riesz");
  if (!(s > 0.0 && s < 3.0)) throw std::invalid_argument("riesz order must lie in (0, 3)");
  RealFft3 fft(g.dims());
  auto spec = transform_all(f, fft);
  detail::for_each_mode(g.dims(), [&](int ix, int iy, int iz, std::size_t idx) {
    const double k = wavevector(g, ix, iy, iz).norm();
    const double m = k == 0.0 ? 0.0 : std::pow(k, -s);
    for (auto& c : spec) c[idx] *= m;
  });
  return inverse_all(spec, g, fft);
}

double gamma_s(double s, int n) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (!(s > 0.0 && s < n)) throw std::invalid_argument("gamma_s requires 0 < s < n");
  const double half_n = 0.5 * n;
  return std::pow(std::numbers::pi, half_n) * std::exp2(s) * std::tgamma(0.5 * s) /
         std::tgamma(half_n - 0.5 * s);
}

namespace {

// Lattice frequency of a mode with the Nyquist index dropped, reduced to its
// primitive direction.
std::optional<std::array<int, 3>> reduced_direction(const std::array<int, 3>& n, int ix, int iy,
                                                    int iz) {
  std::array<int, 3> k{detail::derivative_frequency(ix, n[0]),
                       detail::derivative_frequency(iy, n[1]),
                       detail::derivative_frequency(iz, n[2])};
  if (k[0] == 0 && k[1] == 0 && k[2] == 0) return std::nullopt;
  const int d = std::gcd(std::gcd(std::abs(k[0]), std::abs(k[1])), std::abs(k[2]));
  for (int& v : k) v /= d;
  return k;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> unit_pseudoinverse(const MatrixRep& a, const Vec3& unit) {
  const SymbolMatrix s = symbol(a, unit);
  Eigen::JacobiSVD<SymbolMatrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector3d inv = svd.singularValues().cwiseInverse();
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Multiplier::Multiplier(const MatrixRep& a, const GridGeometry& geometry,
                       const EllipticityOptions& opts)
    : a_(a), geometry_(geometry), min_singular_(0.0) {
  require_periodic(geometry, "multiplier_T");
  const auto report = ellipticity(a, opts);
  min_singular_ = report.min_singular;
  if (!report.is_elliptic) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "operator '%s' is not elliptic: min_singular = %.6g <= tolerance %.3g",
                  a.name().c_str(), report.min_singular, report.tolerance);
    throw PreconditionError(buf);
  }
  const auto& n = geometry.dims();
  detail::for_each_mode(n, [&](int ix, int iy, int iz, std::size_t) {
    const auto k = reduced_direction(n, ix, iy, iz);
    if (!k || cache_.contains(*k)) return;
    const Vec3 xi(k->at(0) / geometry.length(0), k->at(1) / geometry.length(1),
                  k->at(2) / geometry.length(2));
    const Vec3 unit = xi.normalized();
    cache_.emplace(*k, Direction{unit, unit_pseudoinverse(a_, unit)});
  });
}

Eigen::Matrix<double, 3, Eigen::Dynamic> Multiplier::symbol(int i, const Vec3& xi) const {
  if (i < 0 || i > 2) throw std::invalid_argument("direction index must be 0, 1 or 2");
  const double r = xi.norm();
  if (!(r > 0.0)) throw std::invalid_argument("symbol undefined at xi = 0");
  const Vec3 unit = xi / r;
  return unit(i) * unit_pseudoinverse(a_, unit);
}

VectorField Multiplier::apply(int i, const Field& g) const {
  if (i < 0 || i > 2) throw std::invalid_argument("direction index must be 0, 1 or 2");
  if (g.components() != a_.n_out())
    throw std::invalid_argument("multiplier input must have n_out components");
  if (!(g.geometry() == geometry_)) throw std::invalid_argument("multiplier geometry mismatch");
  const auto& n = geometry_.dims();
  RealFft3 fft(n);
  auto in = transform_all(g, fft);
  std::vector<std::vector<Complex>> out(3, std::vector<Complex>(fft.half_size()));
  const int nn = a_.n_out();
  Eigen::VectorXcd ghat(nn);
  detail::for_each_mode(n, [&](int ix, int iy, int iz, std::size_t idx) {
    const auto k = reduced_direction(n, ix, iy, iz);
    if (!k) return;
    const Direction& d = cache_.at(*k);
    for (int c = 0; c < nn; ++c) ghat(c) = in[c][idx];
    const Eigen::Vector3cd r = (d.unit(i) * d.pinv).cast<Complex>() * ghat;
    for (int a = 0; a < 3; ++a) out[a][idx] = r(a);
  });
  return VectorField(inverse_all(out, geometry_, fft));
}

VectorField multiplier_T(const MatrixRep& a, int i, const Field& g) {
  return Multiplier(a, g.geometry()).apply(i, g);
}

}  // namespace kms

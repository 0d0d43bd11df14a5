#pragma once

#include "kms/fields.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kms {

/// chi(r) = exp(1 - 1/(1 - r^2)) for r < 1, else 0. chi(0) = 1.
double bump_profile(double r);
double bump_profile_derivative(double r);

/// Radial C-infinity bump chi(|x - center| / radius)^power. Powers above 1
/// concentrate the bump towards a Gaussian of width radius / sqrt(2 power)
/// whose spectrum decays much faster at moderate frequencies.
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double power = 1.0;

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
};

/// Real trigonometric polynomial with m components,
///   f_c(x) = Re sum_{|k|_inf <= kmax} a_{c,k} exp(2 pi i sum_d k_d (x_d - origin_d) / period_d).
///
/// The polynomial is defined in the continuum, so sampling the same
/// instance on different grids gives samples of the same function.
class TrigPolynomial {
 public:
  using Complex = std::complex<double>;

  TrigPolynomial(int components, int kmax, std::array<double, 3> period, Vec3 origin,
                 std::vector<Complex> coefficients);

  /// Real and imaginary part of each coefficient drawn from N(0, 1) with a
  /// mt19937_64 seeded by `seed`. With `zero_mean` the k = 0 coefficient is 0.
  static TrigPolynomial random(std::uint64_t seed, int components, int kmax,
                               std::array<double, 3> period, Vec3 origin, bool zero_mean = false);

  int components() const { return components_; }
  int kmax() const { return kmax_; }
  int modes_per_axis() const { return 2 * kmax_ + 1; }
  const std::array<double, 3>& period() const { return period_; }
  const Vec3& origin() const { return origin_; }

  /// Coefficient of component c at integer frequency k.
  Complex& coefficient(int c, int kx, int ky, int kz);
  Complex coefficient(int c, int kx, int ky, int kz) const;
  const std::vector<Complex>& coefficients() const { return coeffs_; }

  /// Values of component c at every grid node; `derivative_axis` in {0,1,2}
  /// samples d/dx_axis instead. Separable evaluation, O(kmax * nodes).
  std::vector<double> sample(const GridGeometry& g, int c, int derivative_axis = -1) const;
  /// Direct point evaluation, used by tests as an independent route.
  double evaluate(const Vec3& x, int c) const;

 private:
  std::size_t offset(int c, int kx, int ky, int kz) const;

  int components_;
  int kmax_;
  std::array<double, 3> period_;
  Vec3 origin_;
  std::vector<Complex> coeffs_;
};

/// Moments S_k = sum_x u(x) exp(2 pi i sum_d k_d (x_d - origin_d) / period_d)
/// over every node for |k|_inf <= kmax, laid out like single-component
/// TrigPolynomial coefficients. This is the adjoint of sampling: the
/// derivative of sum_x u(x) f(x) with respect to the real and imaginary
/// parts of coefficient a_k is (Re S_k, -Im S_k).
std::vector<std::complex<double>> trig_moments(const GridGeometry& g, std::span<const double> u,
                                               int kmax, const std::array<double, 3>& period,
                                               const Vec3& origin);

/// A trigonometric polynomial, optionally multiplied by a bump window, with
/// analytic first derivatives.
class WindowedTrig {
 public:
  WindowedTrig(TrigPolynomial poly, std::optional<Bump> window);

  const TrigPolynomial& poly() const { return poly_; }
  const std::optional<Bump>& window() const { return window_; }
  int components() const { return poly_.components(); }

  Field sample(const GridGeometry& g) const;
  /// Component 3c + j holds d_j of component c.
  Field sample_jacobian(const GridGeometry& g) const;

 private:
  TrigPolynomial poly_;
  std::optional<Bump> window_;
};

/// Default trigonometric period for a geometry: the box length on periodic
/// grids, twice the box length on cubes (so corpus fields are not periodic
/// on the cube).
std::array<double, 3> default_period(const GridGeometry& g);

/// Random smooth matrix field with compact support: each of the 9
/// components is a trig polynomial with |k|_inf <= kmax times
/// chi(|x - center| / support_radius), centred on the box.
///
/// Throws std::invalid_argument when kmax > min(dims)/4 or the support
/// radius is not below half the box width.
MatrixField random_band_limited(std::uint64_t seed, const GridGeometry& g, int kmax,
                                double support_radius);

/// Generator behind random_band_limited, exposed so callers can rescale
/// the period and support (dilations) or sample analytic derivatives.
WindowedTrig band_limited_generator(std::uint64_t seed, const GridGeometry& g, int kmax,
                                    double support_radius);

/// Divergence-free field curl(w), with w a random 3-component trig
/// polynomial (|k|_inf <= kmax, default period) times a bump chi^4 of the
/// given radius centred on the box. The curl is taken analytically, so the
/// field vanishes outside the support ball on every grid.
VectorField random_solenoidal(std::uint64_t seed, const GridGeometry& g, int kmax,
                              double support_radius);

/// Random trig polynomial field without window (m components, optionally
/// mean-free), sampled on g with the default period.
Field random_trig_field(std::uint64_t seed, const GridGeometry& g, int components, int kmax,
                        bool zero_mean);

}  // namespace kms

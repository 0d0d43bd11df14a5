#pragma once

#include "kms/fields.hpp"

#include <array>
#include <complex>
#include <vector>

namespace kms::detail {

using Complex = std::complex<double>;

/// Real-to-complex 3-D transform on a fixed grid shape, unnormalised in both
/// directions. Plans are cached per shape and shared across threads.
class RealFft3 {
 public:
  explicit RealFft3(std::array<int, 3> dims);

  std::size_t real_size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  std::size_t half_size() const {
    return static_cast<std::size_t>(n_[0]) * n_[1] * (n_[2] / 2 + 1);
  }
  int half_z() const { return n_[2] / 2 + 1; }
  const std::array<int, 3>& dims() const { return n_; }

  void forward(const double* in, Complex* out) const;
  /// Consumes `in` (FFTW's c2r transform overwrites its input).
  void inverse(Complex* in, double* out) const;

 private:
  std::array<int, 3> n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Signed integer frequency of index m on an n-point axis.
inline int signed_frequency(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Frequency used by spectral derivatives: the Nyquist index of an even axis
/// has no sign and is mapped to zero.
inline int derivative_frequency(int m, int n) {
  if (n % 2 == 0 && m == n / 2) return 0;
  return signed_frequency(m, n);
}

/// Visits every half-spectrum mode (ix, iy, iz<nz/2+1) with its flat index.
template <typename Fn>
void for_each_mode(const std::array<int, 3>& n, Fn&& fn) {
  const int hz = n[2] / 2 + 1;
  std::size_t idx = 0;
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < hz; ++iz, ++idx) fn(ix, iy, iz, idx);
}

/// Angular wavenumber 2*pi*k/L used for derivatives along each axis.
inline std::array<double, 3> derivative_wavenumber(const GridGeometry& g, int ix, int iy, int iz) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const auto& n = g.dims();
  return {two_pi * derivative_frequency(ix, n[0]) / g.length(0),
          two_pi * derivative_frequency(iy, n[1]) / g.length(1),
          two_pi * derivative_frequency(iz, n[2]) / g.length(2)};
}

/// All three spectral partial derivatives of one periodic component.
std::array<std::vector<double>, 3> spectral_partials(std::span<const double> values,
                                                     const GridGeometry& g);

}  // namespace kms::detail

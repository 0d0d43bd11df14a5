#pragma once

#include "kms/fields.hpp"
#include "kms/operators.hpp"

#include <complex>
#include <map>
#include <vector>

namespace kms {

/// Spectral coefficients of a periodic grid field (half spectrum along z).
///
/// The coefficient at integer frequency k approximates
///   integral f(x) exp(-2 pi i <x, k/L>) dx,
/// i.e. the DFT scaled by the cell volume and phase-corrected for the
/// cell-centred node offsets. Continuous frequency is xi = k / L.
class FourierField {
 public:
  using Complex = std::complex<double>;

  static FourierField forward(const Field& f);
  Field inverse() const;

  const GridGeometry& geometry() const { return geometry_; }
  int components() const { return static_cast<int>(coeffs_.size()); }
  /// Coefficient at signed frequency (kx, ky, kz); negative kz is read
  /// through Hermitian symmetry.
  Complex coefficient(int c, int kx, int ky, int kz) const;
  const std::vector<Complex>& half_spectrum(int c) const { return coeffs_[c]; }

 private:
  FourierField(GridGeometry g, std::vector<std::vector<Complex>> coeffs)
      : geometry_(std::move(g)), coeffs_(std::move(coeffs)) {}

  GridGeometry geometry_;
  std::vector<std::vector<Complex>> coeffs_;
};

struct HelmholtzParts {
  VectorField div_free;
  VectorField curl_free;
};

struct HelmholtzRows {
  MatrixField div_free;
  MatrixField curl_free;
};

/// Mode-wise Leray split on a periodic grid: curl_free(k) = k k^T v(k)/|k|^2
/// and div_free = v - curl_free. The mean (and any mode with no
/// differentiable frequency) goes entirely to div_free.
HelmholtzParts helmholtz(const VectorField& v);
HelmholtzRows helmholtz_rows(const MatrixField& f);

/// Riesz potential I_s with multiplier (2 pi |xi|)^{-s}, applied to every
/// component. The zero mode is dropped. Requires 0 < s < 3.
Field riesz(const Field& f, double s);

/// gamma(s) = pi^{n/2} 2^s Gamma(s/2) / Gamma(n/2 - s/2), for 0 < s < n.
double gamma_s(double s, int n);

/// The Fourier multipliers T^i with symbol xi_i (A*[xi] A[xi])^{-1} A*[xi].
///
/// The symbol is homogeneous of degree zero and is evaluated at unit xi
/// through a pseudoinverse; one pseudoinverse is cached per lattice
/// direction of the geometry.
class Multiplier {
 public:
  /// Throws PreconditionError (quoting min_singular) if A is not elliptic.
  Multiplier(const MatrixRep& a, const GridGeometry& geometry,
             const EllipticityOptions& opts = {});

  /// T^i applied to an N-component periodic field, i in {0, 1, 2}.
  VectorField apply(int i, const Field& g) const;

  /// The 3 x N symbol matrix at frequency xi (any nonzero xi).
  Eigen::Matrix<double, 3, Eigen::Dynamic> symbol(int i, const Vec3& xi) const;

  double min_singular() const { return min_singular_; }
  std::size_t cached_directions() const { return cache_.size(); }

 private:
  struct Direction {
    Vec3 unit;
    Eigen::Matrix<double, 3, Eigen::Dynamic> pinv;
  };

  MatrixRep a_;
  GridGeometry geometry_;
  double min_singular_;
  std::map<std::array<int, 3>, Direction> cache_;
};

/// One-shot form of Multiplier::apply.
VectorField multiplier_T(const MatrixRep& a, int i, const Field& g);

}  // namespace kms

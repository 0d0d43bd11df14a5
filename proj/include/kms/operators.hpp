#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kms {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// Row-major vectorisation of a 3x3 matrix: index 3*i + j holds M(i, j).
using Vec9 = Eigen::Matrix<double, 9, 1>;
using SymbolMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

Vec9 vectorize(const Mat3& m);
Mat3 unvectorize(const Vec9& v);

enum class BuiltinOperator { grad, sym, dev, skew, trace };

/// Matrix representative A of a first-order operator, A u = A[grad u].
///
/// `entries` is N x 9 and acts on the row-major vectorisation of a 3x3
/// matrix, so the coefficient matrices of the operator are recovered as
/// A[xi] v = A[v (x) xi].
class MatrixRep {
 public:
  MatrixRep(Eigen::Matrix<double, Eigen::Dynamic, 9> entries, std::string name = {});

  static MatrixRep builtin(BuiltinOperator op);

  int n_out() const { return static_cast<int>(entries_.rows()); }
  const Eigen::Matrix<double, Eigen::Dynamic, 9>& entries() const { return entries_; }
  const std::string& name() const { return name_; }

  Eigen::VectorXd apply(const Mat3& m) const;
  Eigen::VectorXd apply(const Vec9& vec_m) const { return entries_ * vec_m; }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, 9> entries_;
  std::string name_;
};

/// Throws std::invalid_argument for names outside {grad, sym, dev, skew, trace}.
MatrixRep builtin_operator(std::string_view name);

/// Parses the JSON operator description {"name", "n_out", "entries"}.
MatrixRep operator_from_json(std::string_view text);
std::string operator_to_json(const MatrixRep& a);

/// Resolves a builtin name first, then falls back to reading a JSON file.
MatrixRep load_operator(const std::string& name_or_path);

/// The symbol map A[xi] as an N x 3 matrix; linear in xi.
SymbolMatrix symbol(const MatrixRep& a, const Vec3& xi);

struct EllipticityReport {
  double min_singular = 0.0;
  Vec3 argmin_xi = Vec3::UnitX();
  Vec3 near_kernel_v = Vec3::UnitX();
  bool is_elliptic = false;
  double tolerance = 0.0;
};

struct EllipticityOptions {
  int sphere_samples = 2000;
  double refine_tol = 1e-8;
  double elliptic_tol = 1e-6;
};

/// Smallest singular value of A[xi] together with its right singular vector.
/// For N < 3 the map cannot be injective and the value is 0.
std::pair<double, Vec3> smallest_singular(const SymbolMatrix& s);

/// Points of the Fibonacci lattice on the unit sphere.
std::vector<Vec3> fibonacci_sphere(int count);

/// Minimises sigma_min(A[xi]) over the unit sphere: Fibonacci sweep, then
/// coordinate descent in the tangent plane until the step drops below
/// refine_tol.
EllipticityReport ellipticity(const MatrixRep& a, const EllipticityOptions& opts = {});

/// A pair (xi, v) with A[xi] v ~ 0, or nothing when A is elliptic.
std::optional<std::pair<Vec3, Vec3>> kernel_direction(const MatrixRep& a,
                                                      const EllipticityOptions& opts = {});

}  // namespace kms

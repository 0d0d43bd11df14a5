#pragma once

#include "kms/operators.hpp"

#include <array>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace kms {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Uniform cell-centred grid on a box; node k along an axis sits at
/// lo + (k + 1/2) h, so no node lies on the boundary.
class GridGeometry {
 public:
  GridGeometry(std::array<int, 3> dims, std::array<Interval, 3> box, bool periodic);

  /// Periodic box (-L/2, L/2)^3 with n nodes per axis.
  static GridGeometry periodic_box(int n, double length);
  static GridGeometry periodic_box(std::array<int, 3> dims, double length);
  /// Non-periodic cube side^3 with n nodes per axis.
  static GridGeometry cube(int n, Interval side = {0.0, 1.0});

  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<Interval, 3>& box() const { return box_; }
  bool periodic() const { return periodic_; }

  double spacing(int axis) const { return box_[axis].length() / dims_[axis]; }
  double length(int axis) const { return box_[axis].length(); }
  double coordinate(int axis, int k) const { return box_[axis].lo + (k + 0.5) * spacing(axis); }
  Vec3 node(int ix, int iy, int iz) const {
    return {coordinate(0, ix), coordinate(1, iy), coordinate(2, iz)};
  }
  Vec3 center() const;
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  /// z-fastest linear index.
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * dims_[1] + iy) * dims_[2] + iz;
  }
  bool is_cube() const;

  bool operator==(const GridGeometry&) const = default;

 private:
  std::array<int, 3> dims_;
  std::array<Interval, 3> box_;
  bool periodic_;
};

/// Grid-sampled field with m components stored component-major, each
/// component z-fastest.
class Field {
 public:
  Field(GridGeometry geometry, int components);
  Field(GridGeometry geometry, int components, std::vector<double> values);

  const GridGeometry& geometry() const { return geometry_; }
  int components() const { return components_; }
  std::size_t nodes() const { return geometry_.size(); }

  std::span<double> component(int c) {
    return {values_.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
  }
  std::span<const double> component(int c) const {
    return {values_.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
  }
  double& operator()(int c, std::size_t node) { return values_[c * nodes() + node]; }
  double operator()(int c, std::size_t node) const { return values_[c * nodes() + node]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const;
  /// Euclidean (Frobenius) magnitude across components at one node.
  double magnitude(std::size_t node) const;
  double max_magnitude() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 protected:
  void require_components(int m) const;

 private:
  void require_compatible(const Field& other) const;

  GridGeometry geometry_;
  int components_;
  std::vector<double> values_;
};

template <int M>
class FixedField : public Field {
 public:
  static_assert(M == 1 || M == 3 || M == 9);
  explicit FixedField(GridGeometry geometry) : Field(std::move(geometry), M) {}
  FixedField(GridGeometry geometry, std::vector<double> values)
      : Field(std::move(geometry), M, std::move(values)) {}
  explicit FixedField(Field f) : Field(std::move(f)) { require_components(M); }
};

using ScalarGrid = FixedField<1>;
using VectorField = FixedField<3>;

class MatrixField : public FixedField<9> {
 public:
  using FixedField<9>::FixedField;

  /// Component (i, j) of the matrix at each node.
  std::span<double> entry(int i, int j) { return component(3 * i + j); }
  std::span<const double> entry(int i, int j) const { return component(3 * i + j); }

  /// Row i as a vector field F^i.
  VectorField row(int i) const;
  void set_row(int i, const VectorField& v);
  Mat3 at(std::size_t node) const;
  void set(std::size_t node, const Mat3& m);

  static MatrixField from_rows(const VectorField& r0, const VectorField& r1, const VectorField& r2);
};

template <typename F>
  requires std::derived_from<F, Field>
F operator+(F a, const F& b) {
  a += b;
  return a;
}

template <typename F>
  requires std::derived_from<F, Field>
F operator-(F a, const F& b) {
  a -= b;
  return a;
}

template <typename F>
  requires std::derived_from<F, Field>
F operator*(double s, F a) {
  a *= s;
  return a;
}

/// Discrete L^2 inner product with midpoint weights h^3, summed over components.
double inner(const Field& a, const Field& b);

/// Pointwise A[F(x)]; the result has A.n_out() components.
Field apply_matrix_rep(const MatrixRep& a, const MatrixField& f);

/// Pointwise matrix parts, matching the builtin representatives.
MatrixField sym_part(const MatrixField& f);
MatrixField skew_part(const MatrixField& f);
MatrixField dev_part(const MatrixField& f);
ScalarGrid trace_part(const MatrixField& f);

/// Copy of f restricted to the index block [lo, lo + dims) with the
/// matching physical sub-box.
Field restrict_block(const Field& f, std::array<int, 3> lo, std::array<int, 3> dims);

}  // namespace kms

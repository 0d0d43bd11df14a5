#include "kms/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kms {

GridGeometry::GridGeometry(std::array<int, 3> dims, std::array<Interval, 3> box, bool periodic)
    : dims_(dims), box_(box), periodic_(periodic) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < 4)
      throw std::invalid_argument("grid needs at least 4 nodes per axis, got " +
                                  std::to_string(dims_[a]));
    if (!(box_[a].hi > box_[a].lo) || !std::isfinite(box_[a].lo) || !std::isfinite(box_[a].hi))
      throw std::invalid_argument("grid box is degenerate along axis " + std::to_string(a));
  }
}

GridGeometry GridGeometry::periodic_box(int n, double length) {
  return periodic_box({n, n, n}, length);
}

GridGeometry GridGeometry::periodic_box(std::array<int, 3> dims, double length) {
  const Interval side{-0.5 * length, 0.5 * length};
  return GridGeometry(dims, {side, side, side}, true);
}

GridGeometry GridGeometry::cube(int n, Interval side) {
  return GridGeometry({n, n, n}, {side, side, side}, false);
}

Vec3 GridGeometry::center() const {
  return {0.5 * (box_[0].lo + box_[0].hi), 0.5 * (box_[1].lo + box_[1].hi),
          0.5 * (box_[2].lo + box_[2].hi)};
}

bool GridGeometry::is_cube() const {
  return dims_[0] == dims_[1] && dims_[1] == dims_[2] && box_[0] == box_[1] && box_[1] == box_[2];
}

Field::Field(GridGeometry geometry, int components)
    : geometry_(std::move(geometry)), components_(components) {
  if (components_ < 1) throw std::invalid_argument("field needs at least one component");
  values_.assign(static_cast<std::size_t>(components_) * geometry_.size(), 0.0);
}

Field::Field(GridGeometry geometry, int components, std::vector<double> values)
    : geometry_(std::move(geometry)), components_(components), values_(std::move(values)) {
  if (components_ < 1) throw std::invalid_argument("field needs at least one component");
  if (values_.size() != static_cast<std::size_t>(components_) * geometry_.size())
    throw std::invalid_argument("field value count does not match geometry");
}

void Field::require_components(int m) const {
  if (components_ != m)
    throw std::invalid_argument("expected a field with " + std::to_string(m) +
                                " components, got " + std::to_string(components_));
}

void Field::require_compatible(const Field& other) const {
  if (!(geometry_ == other.geometry_) || components_ != other.components_)
    throw std::invalid_argument("fields have inconsistent geometry or component count");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::magnitude(std::size_t node) const {
  double s = 0.0;
  for (int c = 0; c < components_; ++c) {
    const double v = (*this)(c, node);
    s += v * v;
  }
  return std::sqrt(s);
}

double Field::max_magnitude() const {
  double m = 0.0;
  for (std::size_t i = 0; i < nodes(); ++i) m = std::max(m, magnitude(i));
  return m;
}

Field& Field::operator+=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

VectorField MatrixField::row(int i) const {
  VectorField r(geometry());
  for (int j = 0; j < 3; ++j) std::ranges::copy(entry(i, j), r.component(j).begin());
  return r;
}

void MatrixField::set_row(int i, const VectorField& v) {
  if (!(v.geometry() == geometry())) throw std::invalid_argument("row geometry mismatch");
  for (int j = 0; j < 3; ++j) std::ranges::copy(v.component(j), entry(i, j).begin());
}

Mat3 MatrixField::at(std::size_t node) const {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(3 * i + j, node);
  return m;
}

void MatrixField::set(std::size_t node, const Mat3& m) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) (*this)(3 * i + j, node) = m(i, j);
}

MatrixField MatrixField::from_rows(const VectorField& r0, const VectorField& r1,
                                   const VectorField& r2) {
  MatrixField f(r0.geometry());
  f.set_row(0, r0);
  f.set_row(1, r1);
  f.set_row(2, r2);
  return f;
}

double inner(const Field& a, const Field& b) {
  if (!(a.geometry() == b.geometry()) || a.components() != b.components())
    throw std::invalid_argument("inner product of incompatible fields");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a.values()[i] * b.values()[i];
  return s * a.geometry().cell_volume();
}

Field apply_matrix_rep(const MatrixRep& a, const MatrixField& f) {
  const int n_out = a.n_out();
  Field out(f.geometry(), n_out);
  const auto& e = a.entries();
  const std::size_t n = f.nodes();
  for (int k = 0; k < n_out; ++k) {
    auto dst = out.component(k);
    for (int c = 0; c < 9; ++c) {
      const double w = e(k, c);
      if (w == 0.0) continue;
      auto src = f.component(c);
      for (std::size_t i = 0; i < n; ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

MatrixField sym_part(const MatrixField& f) {
  return MatrixField(apply_matrix_rep(MatrixRep::builtin(BuiltinOperator::sym), f));
}

MatrixField skew_part(const MatrixField& f) {
  return MatrixField(apply_matrix_rep(MatrixRep::builtin(BuiltinOperator::skew), f));
}

MatrixField dev_part(const MatrixField& f) {
  return MatrixField(apply_matrix_rep(MatrixRep::builtin(BuiltinOperator::dev), f));
}

ScalarGrid trace_part(const MatrixField& f) {
  return ScalarGrid(apply_matrix_rep(MatrixRep::builtin(BuiltinOperator::trace), f));
}

Field restrict_block(const Field& f, std::array<int, 3> lo, std::array<int, 3> dims) {
  const auto& g = f.geometry();
  std::array<Interval, 3> box{};
  for (int a = 0; a < 3; ++a) {
    if (lo[a] < 0 || dims[a] < 1 || lo[a] + dims[a] > g.dims()[a])
      throw std::invalid_argument("restriction block outside the grid");
    const double h = g.spacing(a);
    box[a] = {g.box()[a].lo + lo[a] * h, g.box()[a].lo + (lo[a] + dims[a]) * h};
  }
  GridGeometry sub(dims, box, false);
  Field out(sub, f.components());
  for (int c = 0; c < f.components(); ++c)
    for (int ix = 0; ix < dims[0]; ++ix)
      for (int iy = 0; iy < dims[1]; ++iy)
        for (int iz = 0; iz < dims[2]; ++iz)
          out(c, sub.index(ix, iy, iz)) = f(c, g.index(lo[0] + ix, lo[1] + iy, lo[2] + iz));
  return out;
}

}  // namespace kms

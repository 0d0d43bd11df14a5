#include "kms/calculus.hpp"

#include "fft.hpp"

namespace kms {

namespace {

std::vector<double> finite_difference(std::span<const double> f, const GridGeometry& g, int axis) {
  const auto& n = g.dims();
  const double inv2h = 0.5 / g.spacing(axis);
  std::vector<double> d(f.size());
  const std::size_t stride = axis == 0   ? static_cast<std::size_t>(n[1]) * n[2]
                             : axis == 1 ? static_cast<std::size_t>(n[2])
                                         : 1;
  const int len = n[axis];
  // Walk every line along `axis` through its first node.
  for (int ix = 0; ix < (axis == 0 ? 1 : n[0]); ++ix)
    for (int iy = 0; iy < (axis == 1 ? 1 : n[1]); ++iy)
      for (int iz = 0; iz < (axis == 2 ? 1 : n[2]); ++iz) {
        const std::size_t base = g.index(ix, iy, iz);
        auto at = [&](int k) { return f[base + k * stride]; };
        d[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
        for (int k = 1; k < len - 1; ++k) d[base + k * stride] = (at(k + 1) - at(k - 1)) * inv2h;
        d[base + (len - 1) * stride] = (3.0 * at(len - 1) - 4.0 * at(len - 2) + at(len - 3)) * inv2h;
      }
  return d;
}

}  // namespace

std::array<std::vector<double>, 3> partials(std::span<const double> values,
                                            const GridGeometry& geometry) {
  if (geometry.periodic()) return detail::spectral_partials(values, geometry);
  return {finite_difference(values, geometry, 0), finite_difference(values, geometry, 1),
          finite_difference(values, geometry, 2)};
}

MatrixField gradient(const VectorField& u) {
  MatrixField g(u.geometry());
  for (int i = 0; i < 3; ++i) {
    auto d = partials(u.component(i), u.geometry());
    for (int j = 0; j < 3; ++j) std::ranges::copy(d[j], g.entry(i, j).begin());
  }
  return g;
}

VectorField gradient(const ScalarGrid& f) {
  VectorField g(f.geometry());
  auto d = partials(f.component(0), f.geometry());
  for (int j = 0; j < 3; ++j) std::ranges::copy(d[j], g.component(j).begin());
  return g;
}

VectorField curl_from_jacobian(const MatrixField& jac) {
  VectorField c(jac.geometry());
  const std::size_t n = jac.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    c(0, i) = jac(3 * 2 + 1, i) - jac(3 * 1 + 2, i);
    c(1, i) = jac(3 * 0 + 2, i) - jac(3 * 2 + 0, i);
    c(2, i) = jac(3 * 1 + 0, i) - jac(3 * 0 + 1, i);
  }
  return c;
}

MatrixField curl_rows_from_jacobians(const std::array<MatrixField, 3>& row_jacobians) {
  return MatrixField::from_rows(curl_from_jacobian(row_jacobians[0]),
                                curl_from_jacobian(row_jacobians[1]),
                                curl_from_jacobian(row_jacobians[2]));
}

VectorField curl(const VectorField& v) { return curl_from_jacobian(gradient(v)); }

ScalarGrid div(const VectorField& v) {
  ScalarGrid d(v.geometry());
  auto out = d.component(0);
  for (int i = 0; i < 3; ++i) {
    auto p = partials(v.component(i), v.geometry());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[i][k];
  }
  return d;
}

MatrixField curl_rows(const MatrixField& f) {
  MatrixField out(f.geometry());
  for (int i = 0; i < 3; ++i) out.set_row(i, curl(f.row(i)));
  return out;
}

VectorField div_rows(const MatrixField& f) {
  VectorField out(f.geometry());
  for (int i = 0; i < 3; ++i) std::ranges::copy(div(f.row(i)).component(0), out.component(i).begin());
  return out;
}

}  // namespace kms

#include "kms/projection.hpp"

#include "kms/errors.hpp"

#include <cmath>
#include <functional>

namespace kms {

namespace {

void require_cube(const GridGeometry& g) {
  if (g.periodic() || !g.is_cube())
    throw std::invalid_argument("projection bases need a non-periodic cube geometry");
}

MatrixField sample_matrix(const GridGeometry& g, const std::function<Mat3(const Vec3&)>& m) {
  MatrixField f(g);
  const auto& n = g.dims();
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < n[2]; ++iz) f.set(g.index(ix, iy, iz), m(g.node(ix, iy, iz)));
  return f;
}

std::vector<MatrixField> skew_generators(const GridGeometry& g) {
  std::vector<MatrixField> out;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    Mat3 e = Mat3::Zero();
    e(i, j) = 1.0;
    e(j, i) = -1.0;
    out.push_back(sample_matrix(g, [e](const Vec3&) { return e; }));
  }
  return out;
}

// Modified Gram-Schmidt, each vector orthogonalised twice.
std::vector<MatrixField> orthonormalize(std::vector<MatrixField> v) {
  std::vector<MatrixField> basis;
  for (auto& f : v) {
    const double initial = std::sqrt(inner(f, f));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : basis) f -= inner(f, e) * e;
    const double norm = std::sqrt(inner(f, f));
    if (!(norm > 1e-10 * initial)) throw NumericalError("projection generators are linearly dependent");
    f *= 1.0 / norm;
    basis.push_back(std::move(f));
  }
  return basis;
}

}  // namespace

const char* to_string(ProjectionSpace space) {
  return space == ProjectionSpace::rigid ? "rigid" : "conformal";
}

ProjectionBasis::ProjectionBasis(ProjectionSpace space, GridGeometry geometry,
                                 std::vector<MatrixField> fields)
    : space_(space), geometry_(std::move(geometry)), fields_(std::move(fields)) {
  for (const auto& f : fields_)
    if (!(f.geometry() == geometry_)) throw std::invalid_argument("basis fields must share the geometry");
}

std::vector<double> ProjectionBasis::gram() const {
  const int m = dimension();
  std::vector<double> g(static_cast<std::size_t>(m) * m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) g[k * m + l] = inner(fields_[k], fields_[l]);
  return g;
}

ProjectionBasis build_rigid_basis(const GridGeometry& g) {
  require_cube(g);
  return {ProjectionSpace::rigid, g, orthonormalize(skew_generators(g))};
}

ProjectionBasis build_conformal_basis(const GridGeometry& g) {
  require_cube(g);
  auto gens = skew_generators(g);
  gens.push_back(sample_matrix(g, [](const Vec3&) { return Mat3::Identity().eval(); }));
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = Vec3::Unit(a);
    gens.push_back(sample_matrix(g, [e](const Vec3& x) {
      return (2.0 * (x * e.transpose() + x.dot(e) * Mat3::Identity() - e * x.transpose())).eval();
    }));
  }
  return {ProjectionSpace::conformal, g, orthonormalize(std::move(gens))};
}

ProjectionBasis build_basis(ProjectionSpace space, const GridGeometry& g) {
  return space == ProjectionSpace::rigid ? build_rigid_basis(g) : build_conformal_basis(g);
}

MatrixField project_out(const MatrixField& f, const ProjectionBasis& basis) {
  if (!(f.geometry() == basis.geometry())) throw std::invalid_argument("field and basis geometries differ");
  MatrixField out = f;
  for (const auto& e : basis.fields()) out -= inner(f, e) * e;
  return out;
}

double max_basis_coefficient(const MatrixField& f, const ProjectionBasis& basis) {
  double worst = 0.0;
  for (const auto& e : basis.fields()) worst = std::max(worst, std::abs(inner(f, e)));
  return worst;
}

}  // namespace kms

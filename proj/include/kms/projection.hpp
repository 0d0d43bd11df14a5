#pragma once

#include "kms/fields.hpp"

#include <vector>

namespace kms {

enum class ProjectionSpace { rigid, conformal };

const char* to_string(ProjectionSpace space);

/// Orthonormal basis, in the discrete L^2 inner product of its grid, of the
/// gradients of rigid motions (constant skew matrices, dimension 3) or of
/// conformal Killing fields (dimension 7).
class ProjectionBasis {
 public:
  ProjectionBasis(ProjectionSpace space, GridGeometry geometry, std::vector<MatrixField> fields);

  ProjectionSpace space() const { return space_; }
  const GridGeometry& geometry() const { return geometry_; }
  int dimension() const { return static_cast<int>(fields_.size()); }
  const std::vector<MatrixField>& fields() const { return fields_; }
  const MatrixField& operator[](int l) const { return fields_[l]; }

  /// Gram matrix <e_k, e_l>, row-major dimension x dimension.
  std::vector<double> gram() const;

 private:
  ProjectionSpace space_;
  GridGeometry geometry_;
  std::vector<MatrixField> fields_;
};

/// Orthonormalised E_ij - E_ji. Requires a non-periodic cube geometry.
ProjectionBasis build_rigid_basis(const GridGeometry& g);

/// Gram-Schmidt on constant skew matrices, the identity, and
/// grad(2 <a,x> x - |x|^2 a) = 2 (x (x) a + <a,x> I - a (x) x) for a = e_1, e_2, e_3.
/// Requires a non-periodic cube geometry.
ProjectionBasis build_conformal_basis(const GridGeometry& g);

ProjectionBasis build_basis(ProjectionSpace space, const GridGeometry& g);

/// F - sum_l <F, e_l> e_l.
MatrixField project_out(const MatrixField& f, const ProjectionBasis& basis);

/// max_l |<F, e_l>|.
double max_basis_coefficient(const MatrixField& f, const ProjectionBasis& basis);

}  // namespace kms

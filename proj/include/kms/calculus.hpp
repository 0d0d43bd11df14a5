#pragma once

#include "kms/fields.hpp"

#include <array>
#include <span>
#include <vector>

namespace kms {

/// d/dx_a of one grid component for a = 0, 1, 2.
///
/// Periodic grids differentiate spectrally (Nyquist modes dropped). Cube grids
/// use second-order centred differences with second-order one-sided stencils
/// on the first and last node of each line.
std::array<std::vector<double>, 3> partials(std::span<const double> values,
                                            const GridGeometry& geometry);

/// (grad u)_{ij} = d_j u_i.
MatrixField gradient(const VectorField& u);
/// grad of a scalar.
VectorField gradient(const ScalarGrid& f);
VectorField curl(const VectorField& v);
ScalarGrid div(const VectorField& v);

/// Row-wise curl: row i of the result is curl(F^i).
MatrixField curl_rows(const MatrixField& f);
/// Row-wise divergence: component i is div(F^i).
VectorField div_rows(const MatrixField& f);

/// Curl read off a Jacobian J_{ij} = d_j v_i.
VectorField curl_from_jacobian(const MatrixField& jacobian);
/// Row-wise curl read off the 27 partials d_k F_{ij} laid out as three
/// Jacobians, one per row.
MatrixField curl_rows_from_jacobians(const std::array<MatrixField, 3>& row_jacobians);

}  // namespace kms

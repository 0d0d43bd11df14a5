#pragma once

#include "kms/operators.hpp"

#include <span>
#include <string>
#include <vector>

namespace kms {

struct CounterexampleRow {
  int k = 0;
  double grad_norm = 0.0;  ///< ||D psi_k||_p
  double op_norm = 0.0;    ///< ||A psi_k||_p
  double ratio = 0.0;
};

struct CounterexampleSequence {
  std::string operator_name;
  Vec3 xi = Vec3::UnitX();
  Vec3 v = Vec3::UnitX();
  /// |A[v (x) xi]|, the symbol at the kernel pair.
  double kernel_residual = 0.0;
  double p = 2.0;
  int grid = 0;
  double box_length = 0.0;
  std::vector<CounterexampleRow> rows;
};

inline constexpr double counterexample_box_length = 3.0;

/// psi_k(x) = rho(x) eta_k(<x, xi>) v with rho the radial bump of radius 1,
/// eta_k(t) = chi(t) sin(k t), sampled on the periodic box (-3/2, 3/2)^3 with
/// `grid` nodes per axis; D psi_k is the spectral gradient.
///
/// Throws PreconditionError for elliptic A and std::invalid_argument when a
/// k exceeds the resolvable range k L / (2 pi) <= grid / 4 or p < 1.
CounterexampleSequence counterexample_sequence(const MatrixRep& a, std::span<const int> ks,
                                               double p, int grid,
                                               const EllipticityOptions& opts = {});

}  // namespace kms

#include "kms/counterexample.hpp"

#include "kms/calculus.hpp"
#include "kms/errors.hpp"
#include "kms/norms.hpp"
#include "kms/synthesis.hpp"

#include <cmath>
#include <numbers>

namespace kms {

CounterexampleSequence counterexample_sequence(const MatrixRep& a, std::span<const int> ks,
                                               double p, int grid, const EllipticityOptions& opts) {
  if (!(p >= 1.0)) throw std::invalid_argument("counterexample needs p >= 1");
  if (ks.empty()) throw std::invalid_argument("counterexample needs at least one k");
  const double length = counterexample_box_length;
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (k * length / (2.0 * std::numbers::pi) > grid / 4.0)
      throw std::invalid_argument("k = " + std::to_string(k) + " is not resolved on grid " +
                                  std::to_string(grid) + " (need k L / 2pi <= grid / 4)");
  }
  const auto pair = kernel_direction(a, opts);
  if (!pair)
    throw PreconditionError("operator " + a.name() +
                            " is elliptic; the counterexample needs a kernel direction");

  CounterexampleSequence seq;
  seq.operator_name = a.name();
  seq.xi = pair->first.normalized();
  seq.v = pair->second.normalized();
  seq.kernel_residual = a.apply(Mat3(seq.v * seq.xi.transpose())).norm();
  seq.p = p;
  seq.grid = grid;
  seq.box_length = length;

  const auto g = GridGeometry::periodic_box(grid, length);
  const auto& n = g.dims();
  for (int k : ks) {
    VectorField psi(g);
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) {
          const Vec3 x = g.node(ix, iy, iz);
          const double t = x.dot(seq.xi);
          const double s = bump_profile(x.norm()) * bump_profile(std::abs(t)) * std::sin(k * t);
          const std::size_t idx = g.index(ix, iy, iz);
          for (int c = 0; c < 3; ++c) psi(c, idx) = s * seq.v(c);
        }
    const MatrixField d = gradient(psi);
    CounterexampleRow row;
    row.k = k;
    row.grad_norm = lp_norm(d, p);
    row.op_norm = lp_norm(apply_matrix_rep(a, d), p);
    row.ratio = row.grad_norm / row.op_norm;
    if (!std::isfinite(row.ratio)) throw NumericalError("counterexample ratio is not finite");
    seq.rows.push_back(row);
  }
  return seq;
}

}  // namespace kms

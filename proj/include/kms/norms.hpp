#pragma once

#include "kms/fields.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

namespace kms {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Index block [lo, lo + dims) of a grid; norms restricted to it see only
/// those nodes.
struct IndexBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> dims{0, 0, 0};

  std::size_t size() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }
};

/// Whole grid when `mask` is empty; throws if the mask leaves the grid.
IndexBox resolve_mask(const GridGeometry& g, const std::optional<IndexBox>& mask);

enum class NormKind { lp, lorentz, weak, bmo, holder, gagliardo };

const char* to_string(NormKind kind);

/// A norm together with exactly the parameters its kind uses.
struct NormSpec {
  NormKind kind = NormKind::lp;
  double p = 2.0;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> theta;
  std::optional<IndexBox> domain_mask;

  static NormSpec lp(double p);
  static NormSpec lorentz(double p, double q);
  static NormSpec weak(double p);
  static NormSpec bmo();
  static NormSpec holder(double alpha);
  static NormSpec gagliardo(double theta, double p);

  /// Throws std::invalid_argument on out-of-range or stray parameters.
  void validate() const;
};

/// (sum |f|^p h^3)^{1/p} over the mask, |.| the Euclidean norm across
/// components; p = infinity gives the maximum.
double lp_norm(const Field& f, double p, const std::optional<IndexBox>& mask = {});

/// p* = 3p/(3 - p) for 1 <= p < 3.
double sobolev_conjugate(double p);
/// p*(theta) = 3p/(3 - (1 - theta)p).
double frac_conjugate(double p, double theta);

/// Lorentz (p, q) norm, q = infinity for the weak space, evaluated exactly
/// on the step distribution function of the nodal values:
///   ||f||_{p,q} = p^{1/q} (int_0^inf (t lambda(t)^{1/p})^q dt/t)^{1/q}.
double lorentz_norm(const Field& f, double p, double q, const std::optional<IndexBox>& mask = {});

/// Supremum of the mean oscillation over grid-aligned dyadic cubes of
/// 2^m cells per side (m >= 1) inside the mask, together with the mask
/// itself when it is a cube.
double bmo_norm(const Field& f, const std::optional<IndexBox>& mask = {});

struct HolderEstimate {
  double value = 0.0;
  /// False when pairs were subsampled; the value is then a lower bound.
  bool exact = true;
};

/// max |f(x) - f(y)| / |x - y|^alpha over node pairs. All pairs when the
/// node count is at most `pair_budget`, otherwise pair_budget^2/2 seeded
/// random pairs.
HolderEstimate holder_seminorm(const Field& f, double alpha, const std::optional<IndexBox>& mask = {},
                               std::size_t pair_budget = 4096, std::uint64_t seed = 0);

/// (sum_{x != y} |f(x) - f(y)|^p / |x - y|^{3 + theta p} h^6)^{1/p}.
/// Requires at most 16^3 nodes in the mask.
double gagliardo_seminorm(const Field& f, double theta, double p,
                          const std::optional<IndexBox>& mask = {});

inline constexpr std::size_t gagliardo_node_limit = 16 * 16 * 16;

/// Dispatches on spec.kind (Hölder with the default pair budget).
double evaluate_norm(const NormSpec& spec, const Field& f);

}  // namespace kms

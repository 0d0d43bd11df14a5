#pragma once

#include "kms/fields.hpp"
#include "kms/operators.hpp"
#include "kms/projection.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kms {

enum class InequalityKind { first_kind, subcritical, bmo, morrey, lorentz, fractional, second_sym, second_dev };

const char* to_string(InequalityKind kind);

struct RatioRow {
  std::size_t index = 0;
  double lhs = 0.0;
  double rhs_elliptic = 0.0;
  double rhs_curl = 0.0;
  /// lhs / (rhs_elliptic + rhs_curl); 0 for flagged rows.
  double ratio = 0.0;
  /// Set when rhs_elliptic + rhs_curl < 1e-14 lhs (or both sides vanish);
  /// flagged rows are left out of sup_ratio.
  bool flagged = false;
};

struct GridRun {
  int grid = 0;
  std::vector<RatioRow> rows;
  double sup_ratio = 0.0;
  std::size_t flagged = 0;
};

/// Sup ratios of a dilated corpus, one per grid.
struct RescaledRun {
  double scale = 1.0;
  double support_radius = 0.0;
  std::vector<double> sup_ratio;
};

struct RatioReport {
  std::string operator_name;
  InequalityKind kind = InequalityKind::first_kind;
  double p = 2.0;
  std::optional<double> q;
  std::optional<double> theta;
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  std::size_t corpus_size = 0;
  int kmax = 0;
  double box_length = 0.0;
  double support_radius = 0.0;
  std::vector<GridRun> grids;
  /// sup_ratio of each grid over that of the previous one.
  std::vector<double> stability;
  std::vector<RescaledRun> rescaled;
  /// Fractional variant with theta > 0.9.
  bool ill_conditioned = false;
  /// Second kind: max over fields and basis elements of |<F, e_l>| / ||F||_2
  /// after projection.
  double max_orthogonality_residual = 0.0;
};

struct CorpusOptions {
  std::size_t size = 100;
  std::uint64_t seed = 0;
  /// Frequency cut-off shared by every grid; defaults to min(grids) / 8.
  std::optional<int> kmax;
  /// Whole-space corpora live on the periodic box (-L/2, L/2)^3.
  double box_length = 3.0;
  double support_radius = 0.5;
  int jobs = 1;
};

/// One row of the first-kind inequality
///   ||F||_{p*} <= c (||A[F]||_{p*} + ||curl F||_p)
/// for a periodic field F; p in [1, 3).
RatioRow kms_ratio_first(const MatrixRep& a, const MatrixField& f, double p);

/// Corpus item i uses seed + i and is the bump-windowed band-limited field
/// on the periodic box at every grid. Throws PreconditionError for
/// non-elliptic A.
RatioReport verify_first(const MatrixRep& a, double p, std::span<const int> grids,
                         const CorpusOptions& corpus = {});

inline constexpr double default_subcritical_scales_data[] = {1.0, 0.5};
inline constexpr std::span<const double> default_subcritical_scales{default_subcritical_scales_data};

/// All three norms at exponent p in (1, inf). Also reports sup ratios of
/// the corpus dilated by each of `scales` about the box centre.
RatioReport verify_subcritical(const MatrixRep& a, double p, std::span<const int> grids,
                               const CorpusOptions& corpus = {},
                               std::span<const double> scales = default_subcritical_scales);

enum class VariantKind { bmo, morrey, lorentz, fractional };

const char* to_string(VariantKind kind);

struct VariantParams {
  VariantKind kind = VariantKind::bmo;
  /// bmo: 3; morrey: p > 3; lorentz and fractional: p in [1, 3).
  double p = 3.0;
  /// Lorentz second index; empty uses each norm's own first index, which
  /// reduces to the Lebesgue inequality.
  std::optional<double> q;
  /// Fractional order in (0, 1).
  double theta = 0.5;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// bmo:        ||F||_BMO <= c (||A[F]||_BMO + ||curl F||_3)
/// morrey:     [F]_alpha <= c ([A[F]]_alpha + ||curl F||_p), alpha = 1 - 3/p
/// lorentz:    ||F||_{p*,q} <= c (||A[F]||_{p*,q} + ||curl F||_{p,q})
/// fractional: [F]_{theta,p*(theta)} <= c ([A[F]]_{theta,p*(theta)} + ||curl F||_p),
///             grids of at most 16 nodes per axis.
RatioReport verify_variant(const MatrixRep& a, const VariantParams& params, std::span<const int> grids,
                           const CorpusOptions& corpus = {});

enum class SecondKindMode { sym, dev };

const char* to_string(SecondKindMode mode);

/// ||F||_{p*}(Q) <= c (||F^sym or F^dev||_{p*}(Q) + ||curl F||_p(Q)) for
/// smooth fields on the unit cube without boundary conditions, after
/// projecting out the rigid (sym) or conformal (dev) basis. Corpus item i
/// is a 9-component trig polynomial (seed + i, period 2) on Q.
RatioReport verify_second(SecondKindMode mode, double p, std::span<const int> grids,
                          const CorpusOptions& corpus = {});

}  // namespace kms

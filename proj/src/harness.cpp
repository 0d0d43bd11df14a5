#include "kms/harness.hpp"

#include "kms/calculus.hpp"
#include "kms/errors.hpp"
#include "kms/norms.hpp"
#include "kms/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace kms {

namespace {

constexpr double kFlagThreshold = 1e-14;

RatioRow make_row(double lhs, double rhs_elliptic, double rhs_curl) {
  if (!std::isfinite(lhs) || !std::isfinite(rhs_elliptic) || !std::isfinite(rhs_curl))
    throw NumericalError("non-finite norm in a ratio row");
  RatioRow row;
  row.lhs = lhs;
  row.rhs_elliptic = rhs_elliptic;
  row.rhs_curl = rhs_curl;
  const double rhs = rhs_elliptic + rhs_curl;
  row.flagged = lhs == 0.0 || rhs < kFlagThreshold * lhs;
  row.ratio = row.flagged ? 0.0 : lhs / rhs;
  return row;
}

// Runs fn(i) for i < count on `jobs` threads; results land at their index,
// so the outcome does not depend on the schedule.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
  return out;
}

GridRun summarize(int grid, std::vector<RatioRow> rows) {
  GridRun run;
  run.grid = grid;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].index = i;
    if (rows[i].flagged)
      ++run.flagged;
    else
      run.sup_ratio = std::max(run.sup_ratio, rows[i].ratio);
  }
  run.rows = std::move(rows);
  return run;
}

void fill_stability(RatioReport& r) {
  for (std::size_t g = 1; g < r.grids.size(); ++g)
    r.stability.push_back(r.grids[g].sup_ratio / r.grids[g - 1].sup_ratio);
}

void require_grids(std::span<const int> grids) {
  if (grids.empty()) throw std::invalid_argument("at least one grid is required");
  for (int n : grids)
    if (n < 4) throw std::invalid_argument("grids need at least 4 nodes per axis");
}

void require_elliptic(const MatrixRep& a) {
  const auto report = ellipticity(a);
  if (!report.is_elliptic)
    throw PreconditionError("operator " + a.name() + " is not elliptic (min_singular " +
                            std::to_string(report.min_singular) +
                            "); use counterexample_sequence instead");
}

int corpus_kmax(const CorpusOptions& c, std::span<const int> grids) {
  const int k = c.kmax.value_or(std::max(1, *std::ranges::min_element(grids) / 8));
  if (k < 0) throw std::invalid_argument("kmax must be nonnegative");
  return k;
}

RatioReport base_report(const MatrixRep& a, InequalityKind kind, double p, const CorpusOptions& c, int kmax) {
  if (c.size == 0) throw std::invalid_argument("corpus must not be empty");
  RatioReport r;
  r.operator_name = a.name();
  r.kind = kind;
  r.p = p;
  r.seed = c.seed;
  r.corpus_size = c.size;
  r.kmax = kmax;
  r.box_length = c.box_length;
  r.support_radius = c.support_radius;
  return r;
}

// Whole-space corpus item: the band-limited generator dilated by `scale`
// about the box centre, sampled on the periodic box.
MatrixField whole_space_item(std::uint64_t seed, const GridGeometry& g, int kmax, double radius,
                             double scale) {
  const auto gen = band_limited_generator(seed, g, kmax, radius);
  if (scale == 1.0) return MatrixField(gen.sample(g));
  auto period = gen.poly().period();
  for (double& t : period) t *= scale;
  const TrigPolynomial poly(9, kmax, period, gen.poly().origin(), gen.poly().coefficients());
  const WindowedTrig dilated(poly, Bump{g.center(), radius * scale});
  return MatrixField(dilated.sample(g));
}

using RowFn = std::function<RatioRow(const MatrixField&)>;

std::vector<GridRun> run_whole_space(std::span<const int> grids, const CorpusOptions& c, int kmax,
                                     double scale, const RowFn& row) {
  std::vector<GridRun> runs;
  for (int n : grids) {
    const auto g = GridGeometry::periodic_box(n, c.box_length);
    auto rows = parallel_map<RatioRow>(c.size, c.jobs, [&](std::size_t i) {
      return row(whole_space_item(c.seed + i, g, kmax, c.support_radius, scale));
    });
    runs.push_back(summarize(n, std::move(rows)));
  }
  return runs;
}

}  // namespace

const char* to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::first_kind: return "first_kind";
    case InequalityKind::subcritical: return "subcritical";
    case InequalityKind::bmo: return "bmo";
    case InequalityKind::morrey: return "morrey";
    case InequalityKind::lorentz: return "lorentz";
    case InequalityKind::fractional: return "fractional";
    case InequalityKind::second_sym: return "second_sym";
    case InequalityKind::second_dev: return "second_dev";
  }
  return "unknown";
}

const char* to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::bmo: return "bmo";
    case VariantKind::morrey: return "morrey";
    case VariantKind::lorentz: return "lorentz";
    case VariantKind::fractional: return "fractional";
  }
  return "unknown";
}

const char* to_string(SecondKindMode mode) { return mode == SecondKindMode::sym ? "sym" : "dev"; }

RatioRow kms_ratio_first(const MatrixRep& a, const MatrixField& f, double p) {
  if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("first-kind inequality needs p in [1, 3)");
  const double ps = sobolev_conjugate(p);
  return make_row(lp_norm(f, ps), lp_norm(apply_matrix_rep(a, f), ps), lp_norm(curl_rows(f), p));
}

RatioReport verify_first(const MatrixRep& a, double p, std::span<const int> grids, const CorpusOptions& corpus) {
  if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("first-kind inequality needs p in [1, 3)");
  require_grids(grids);
  require_elliptic(a);
  const int kmax = corpus_kmax(corpus, grids);
  auto r = base_report(a, InequalityKind::first_kind, p, corpus, kmax);
  r.grids = run_whole_space(grids, corpus, kmax, 1.0,
                            [&](const MatrixField& f) { return kms_ratio_first(a, f, p); });
  fill_stability(r);
  return r;
}

RatioReport verify_subcritical(const MatrixRep& a, double p, std::span<const int> grids,
                               const CorpusOptions& corpus, std::span<const double> scales) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("subcritical inequality needs p in (1, inf)");
  require_grids(grids);
  require_elliptic(a);
  const int kmax = corpus_kmax(corpus, grids);
  auto r = base_report(a, InequalityKind::subcritical, p, corpus, kmax);
  const RowFn row = [&](const MatrixField& f) {
    return make_row(lp_norm(f, p), lp_norm(apply_matrix_rep(a, f), p), lp_norm(curl_rows(f), p));
  };
  r.grids = run_whole_space(grids, corpus, kmax, 1.0, row);
  fill_stability(r);
  for (double s : scales) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("rescaling factors must lie in (0, 1]");
    RescaledRun run{s, corpus.support_radius * s, {}};
    if (s == 1.0) {
      for (const auto& g : r.grids) run.sup_ratio.push_back(g.sup_ratio);
    } else {
      for (const auto& g : run_whole_space(grids, corpus, kmax, s, row)) run.sup_ratio.push_back(g.sup_ratio);
    }
    r.rescaled.push_back(std::move(run));
  }
  return r;
}

void VariantParams::validate() const {
  switch (kind) {
    case VariantKind::bmo:
      if (p != 3.0) throw std::invalid_argument("bmo variant fixes p = 3");
      break;
    case VariantKind::morrey:
      if (!(p > 3.0) || std::isinf(p)) throw std::invalid_argument("morrey variant needs 3 < p < inf");
      break;
    case VariantKind::lorentz:
      if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("lorentz variant needs p in [1, 3)");
      if (q && !(*q >= 1.0)) throw std::invalid_argument("lorentz variant needs q in [1, inf]");
      break;
    case VariantKind::fractional:
      if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("fractional variant needs theta in (0, 1)");
      if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("fractional variant needs p in [1, 3)");
      break;
  }
  if (kind != VariantKind::lorentz && q) throw std::invalid_argument("q is only used by the lorentz variant");
}

RatioReport verify_variant(const MatrixRep& a, const VariantParams& params, std::span<const int> grids,
                           const CorpusOptions& corpus) {
  params.validate();
  require_grids(grids);
  if (params.kind == VariantKind::fractional)
    for (int n : grids)
      if (static_cast<std::size_t>(n) * n * n > gagliardo_node_limit)
        throw std::invalid_argument("fractional variant needs grids of at most 16^3 nodes");
  require_elliptic(a);
  const int kmax = corpus_kmax(corpus, grids);
  const double p = params.p;
  RatioReport r;
  RowFn row;
  switch (params.kind) {
    case VariantKind::bmo:
      r = base_report(a, InequalityKind::bmo, p, corpus, kmax);
      row = [&](const MatrixField& f) {
        return make_row(bmo_norm(f), bmo_norm(apply_matrix_rep(a, f)), lp_norm(curl_rows(f), 3.0));
      };
      break;
    case VariantKind::morrey: {
      r = base_report(a, InequalityKind::morrey, p, corpus, kmax);
      const double alpha = 1.0 - 3.0 / p;
      r.alpha = alpha;
      row = [&a, alpha, p](const MatrixField& f) {
        return make_row(holder_seminorm(f, alpha).value, holder_seminorm(apply_matrix_rep(a, f), alpha).value,
                        lp_norm(curl_rows(f), p));
      };
      break;
    }
    case VariantKind::lorentz: {
      r = base_report(a, InequalityKind::lorentz, p, corpus, kmax);
      r.q = params.q;
      const double ps = sobolev_conjugate(p);
      const double q_lhs = params.q.value_or(ps);
      const double q_curl = params.q.value_or(p);
      row = [&a, p, ps, q_lhs, q_curl](const MatrixField& f) {
        return make_row(lorentz_norm(f, ps, q_lhs), lorentz_norm(apply_matrix_rep(a, f), ps, q_lhs),
                        lorentz_norm(curl_rows(f), p, q_curl));
      };
      break;
    }
    case VariantKind::fractional: {
      r = base_report(a, InequalityKind::fractional, p, corpus, kmax);
      const double theta = params.theta;
      r.theta = theta;
      r.ill_conditioned = theta > 0.9;
      const double pt = frac_conjugate(p, theta);
      row = [&a, p, pt, theta](const MatrixField& f) {
        return make_row(gagliardo_seminorm(f, theta, pt), gagliardo_seminorm(apply_matrix_rep(a, f), theta, pt),
                        lp_norm(curl_rows(f), p));
      };
      break;
    }
  }
  r.grids = run_whole_space(grids, corpus, kmax, 1.0, row);
  fill_stability(r);
  return r;
}

RatioReport verify_second(SecondKindMode mode, double p, std::span<const int> grids, const CorpusOptions& corpus) {
  if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("second-kind inequality needs p in [1, 3)");
  require_grids(grids);
  const int kmax = corpus_kmax(corpus, grids);
  const auto a = MatrixRep::builtin(mode == SecondKindMode::sym ? BuiltinOperator::sym : BuiltinOperator::dev);
  auto r = base_report(a, mode == SecondKindMode::sym ? InequalityKind::second_sym : InequalityKind::second_dev, p,
                       corpus, kmax);
  r.box_length = 1.0;
  r.support_radius = 0.0;
  const double ps = sobolev_conjugate(p);
  const auto space = mode == SecondKindMode::sym ? ProjectionSpace::rigid : ProjectionSpace::conformal;
  for (int n : grids) {
    const auto g = GridGeometry::cube(n);
    if (4 * kmax > n) throw std::invalid_argument("kmax must satisfy kmax <= grid / 4");
    const auto basis = build_basis(space, g);
    std::vector<double> residual(corpus.size);
    auto rows = parallel_map<RatioRow>(corpus.size, corpus.jobs, [&](std::size_t i) {
      const MatrixField f =
          project_out(MatrixField(random_trig_field(corpus.seed + i, g, 9, kmax, false)), basis);
      const double norm = std::sqrt(inner(f, f));
      residual[i] = norm > 0.0 ? max_basis_coefficient(f, basis) / norm : 0.0;
      const MatrixField part = mode == SecondKindMode::sym ? sym_part(f) : dev_part(f);
      return make_row(lp_norm(f, ps), lp_norm(part, ps), lp_norm(curl_rows(f), p));
    });
    for (double x : residual) r.max_orthogonality_residual = std::max(r.max_orthogonality_residual, x);
    r.grids.push_back(summarize(n, std::move(rows)));
  }
  fill_stability(r);
  return r;
}

}  // namespace kms

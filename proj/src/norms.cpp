#include "kms/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace kms {

namespace {

// Fixed-shape pairwise reduction; the result does not depend on how callers
// partition their work.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

template <typename Fn>
void for_each_node(const GridGeometry& g, const IndexBox& box, Fn&& fn) {
  for (int ix = box.lo[0]; ix < box.lo[0] + box.dims[0]; ++ix)
    for (int iy = box.lo[1]; iy < box.lo[1] + box.dims[1]; ++iy)
      for (int iz = box.lo[2]; iz < box.lo[2] + box.dims[2]; ++iz) fn(ix, iy, iz, g.index(ix, iy, iz));
}

std::vector<double> magnitudes(const Field& f, const IndexBox& box) {
  std::vector<double> out;
  out.reserve(box.size());
  for_each_node(f.geometry(), box, [&](int, int, int, std::size_t idx) { out.push_back(f.magnitude(idx)); });
  return out;
}

// Values (node-major, m per node) and positions of the masked nodes.
struct Samples {
  int m = 0;
  std::vector<double> values;
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  double distance_of_values(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (int c = 0; c < m; ++c) {
      const double d = values[i * m + c] - values[j * m + c];
      s += d * d;
    }
    return std::sqrt(s);
  }
};

Samples gather(const Field& f, const IndexBox& box) {
  Samples s;
  s.m = f.components();
  s.values.reserve(box.size() * s.m);
  s.points.reserve(box.size());
  const auto& g = f.geometry();
  for_each_node(g, box, [&](int ix, int iy, int iz, std::size_t idx) {
    for (int c = 0; c < s.m; ++c) s.values.push_back(f(c, idx));
    s.points.push_back(g.node(ix, iy, iz));
  });
  return s;
}

void require_p(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must satisfy p >= 1");
}

// Mean oscillation of f over the index block.
double oscillation(const Field& f, const IndexBox& box) {
  const int m = f.components();
  // Offsets from the first node keep constants exact.
  const std::size_t first = f.geometry().index(box.lo[0], box.lo[1], box.lo[2]);
  std::vector<double> mean(m, 0.0);
  for_each_node(f.geometry(), box, [&](int, int, int, std::size_t idx) {
    for (int c = 0; c < m; ++c) mean[c] += f(c, idx) - f(c, first);
  });
  const double count = static_cast<double>(box.size());
  for (double& v : mean) v /= count;
  double dev = 0.0;
  for_each_node(f.geometry(), box, [&](int, int, int, std::size_t idx) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) {
      const double d = (f(c, idx) - f(c, first)) - mean[c];
      s += d * d;
    }
    dev += std::sqrt(s);
  });
  return dev / count;
}

}  // namespace

IndexBox resolve_mask(const GridGeometry& g, const std::optional<IndexBox>& mask) {
  if (!mask) return {{0, 0, 0}, g.dims()};
  for (int a = 0; a < 3; ++a)
    if (mask->lo[a] < 0 || mask->dims[a] < 1 || mask->lo[a] + mask->dims[a] > g.dims()[a])
      throw std::invalid_argument("norm mask must be a nonempty block inside the grid");
  return *mask;
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::lp: return "lp";
    case NormKind::lorentz: return "lorentz";
    case NormKind::weak: return "weak";
    case NormKind::bmo: return "bmo";
    case NormKind::holder: return "holder";
    case NormKind::gagliardo: return "gagliardo";
  }
  return "unknown";
}

NormSpec NormSpec::lp(double p) { return {NormKind::lp, p, {}, {}, {}, {}}; }
NormSpec NormSpec::lorentz(double p, double q) { return {NormKind::lorentz, p, q, {}, {}, {}}; }
NormSpec NormSpec::weak(double p) { return {NormKind::weak, p, infinity, {}, {}, {}}; }
NormSpec NormSpec::bmo() { return {NormKind::bmo, 1.0, {}, {}, {}, {}}; }
NormSpec NormSpec::holder(double alpha) { return {NormKind::holder, 1.0, {}, alpha, {}, {}}; }
NormSpec NormSpec::gagliardo(double theta, double p) {
  return {NormKind::gagliardo, p, {}, {}, theta, {}};
}

void NormSpec::validate() const {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument(std::string(to_string(kind)) + " norm: " + what);
  };
  if (!(p >= 1.0)) fail("p must be >= 1");
  const bool wants_q = kind == NormKind::lorentz || kind == NormKind::weak;
  if (wants_q != q.has_value()) fail(wants_q ? "q is required" : "q is not used");
  if ((kind == NormKind::holder) != alpha.has_value()) fail("alpha is used by holder only");
  if ((kind == NormKind::gagliardo) != theta.has_value()) fail("theta is used by gagliardo only");
  if (q && !(*q >= 1.0)) fail("q must be >= 1");
  if (kind == NormKind::weak && *q != infinity) fail("weak norm has q = infinity");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (theta && !(*theta > 0.0 && *theta < 1.0)) fail("theta must lie in (0, 1)");
}

double lp_norm(const Field& f, double p, const std::optional<IndexBox>& mask) {
  require_p(p);
  const auto box = resolve_mask(f.geometry(), mask);
  auto mags = magnitudes(f, box);
  if (p == infinity) return mags.empty() ? 0.0 : *std::ranges::max_element(mags);
  for (double& v : mags) v = std::pow(v, p);
  return std::pow(pairwise_sum(mags) * f.geometry().cell_volume(), 1.0 / p);
}

double sobolev_conjugate(double p) {
  if (!(p >= 1.0 && p < 3.0)) throw std::invalid_argument("Sobolev conjugate needs 1 <= p < 3");
  return 3.0 * p / (3.0 - p);
}

double frac_conjugate(double p, double theta) {
  if (!(p >= 1.0)) throw std::invalid_argument("fractional conjugate needs p >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  const double d = 3.0 - (1.0 - theta) * p;
  if (!(d > 0.0)) throw std::invalid_argument("fractional conjugate needs (1 - theta) p < 3");
  return 3.0 * p / d;
}

double lorentz_norm(const Field& f, double p, double q, const std::optional<IndexBox>& mask) {
  require_p(p);
  if (!(q >= 1.0)) throw std::invalid_argument("Lorentz index must satisfy q >= 1");
  const auto box = resolve_mask(f.geometry(), mask);
  auto a = magnitudes(f, box);
  std::ranges::sort(a, std::greater<>());
  const double w = f.geometry().cell_volume();
  if (q == infinity) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      best = std::max(best, a[j] * std::pow((j + 1) * w, 1.0 / p));
    return best;
  }
  // On (a_{j+1}, a_j] the distribution function equals j w.
  std::vector<double> terms(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double next = j + 1 < a.size() ? a[j + 1] : 0.0;
    terms[j] = std::pow((j + 1) * w, q / p) * (std::pow(a[j], q) - std::pow(next, q)) / q;
  }
  return std::pow(p, 1.0 / q) * std::pow(pairwise_sum(terms), 1.0 / q);
}

double bmo_norm(const Field& f, const std::optional<IndexBox>& mask) {
  const auto box = resolve_mask(f.geometry(), mask);
  const int smallest = std::min({box.dims[0], box.dims[1], box.dims[2]});
  double best = 0.0;
  for (int side = 2; side <= smallest; side *= 2) {
    const std::array<int, 3> count{box.dims[0] / side, box.dims[1] / side, box.dims[2] / side};
    for (int a = 0; a < count[0]; ++a)
      for (int b = 0; b < count[1]; ++b)
        for (int c = 0; c < count[2]; ++c) {
          const IndexBox cube{{box.lo[0] + a * side, box.lo[1] + b * side, box.lo[2] + c * side},
                              {side, side, side}};
          best = std::max(best, oscillation(f, cube));
        }
  }
  const auto& g = f.geometry();
  const double sx = box.dims[0] * g.spacing(0);
  if (std::abs(box.dims[1] * g.spacing(1) - sx) <= 1e-12 * sx &&
      std::abs(box.dims[2] * g.spacing(2) - sx) <= 1e-12 * sx)
    best = std::max(best, oscillation(f, box));
  return best;
}

HolderEstimate holder_seminorm(const Field& f, double alpha, const std::optional<IndexBox>& mask,
                               std::size_t pair_budget, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Hölder exponent must lie in (0, 1)");
  const auto box = resolve_mask(f.geometry(), mask);
  const auto s = gather(f, box);
  const std::size_t n = s.size();
  auto ratio = [&](std::size_t i, std::size_t j) {
    return s.distance_of_values(i, j) / std::pow((s.points[i] - s.points[j]).norm(), alpha);
  };
  HolderEstimate out;
  if (n <= pair_budget) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out.value = std::max(out.value, ratio(i, j));
    return out;
  }
  out.exact = false;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t pairs = pair_budget * pair_budget / 2;
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i != j) out.value = std::max(out.value, ratio(i, j));
  }
  return out;
}

double gagliardo_seminorm(const Field& f, double theta, double p, const std::optional<IndexBox>& mask) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  require_p(p);
  const auto box = resolve_mask(f.geometry(), mask);
  if (box.size() > gagliardo_node_limit)
    throw std::invalid_argument("Gagliardo seminorm is an exact double sum limited to 16^3 nodes; "
                                "restrict the field to a smaller block first");
  const auto s = gather(f, box);
  const std::size_t n = s.size();
  const double expo = 3.0 + theta * p;
  std::vector<double> rows(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = s.distance_of_values(i, j);
      if (diff == 0.0) continue;
      acc += std::pow(diff, p) / std::pow((s.points[i] - s.points[j]).norm(), expo);
    }
    rows[i] = acc;
  }
  const double vol = f.geometry().cell_volume();
  return std::pow(2.0 * pairwise_sum(rows) * vol * vol, 1.0 / p);
}

double evaluate_norm(const NormSpec& spec, const Field& f) {
  spec.validate();
  switch (spec.kind) {
    case NormKind::lp: return lp_norm(f, spec.p, spec.domain_mask);
    case NormKind::lorentz:
    case NormKind::weak: return lorentz_norm(f, spec.p, *spec.q, spec.domain_mask);
    case NormKind::bmo: return bmo_norm(f, spec.domain_mask);
    case NormKind::holder: return holder_seminorm(f, *spec.alpha, spec.domain_mask).value;
    case NormKind::gagliardo: return gagliardo_seminorm(f, *spec.theta, spec.p, spec.domain_mask);
  }
  throw std::invalid_argument("unknown norm kind");
}

}  // namespace kms

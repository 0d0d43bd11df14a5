#include "kms/extension.hpp"

#include "kms/norms.hpp"
#include "kms/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace kms {

namespace {

void require_cube_grid(const GridGeometry& g) {
  if (g.periodic()) throw std::invalid_argument("extension needs a non-periodic cube geometry");
  const auto& n = g.dims();
  if (n[0] != n[1] || n[1] != n[2])
    throw std::invalid_argument("extension needs equal node counts on every axis");
  if (!g.is_cube()) throw std::invalid_argument("extension needs equal spacing on every axis");
}

std::array<double, 3> widths(const GridGeometry& g) { return {g.length(0), g.length(1), g.length(2)}; }

// Smoother windows keep the node-sum quadrature of the pairing accurate on
// coarse grids.
constexpr double kTestBumpPower = 4.0;

}  // namespace

VectorField extend_axis(const VectorField& phi, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
  const auto& g = phi.geometry();
  if (g.periodic()) throw std::invalid_argument("extension needs a non-periodic geometry");
  auto dims = g.dims();
  auto box = g.box();
  const int n = dims[axis];
  const double w = g.length(axis);
  dims[axis] = 3 * n;
  box[axis] = {box[axis].lo - w, box[axis].hi + w};
  const GridGeometry out_geometry(dims, box, false);
  VectorField out(out_geometry);
  const auto& src = g.dims();
  for (int ix = 0; ix < dims[0]; ++ix)
    for (int iy = 0; iy < dims[1]; ++iy)
      for (int iz = 0; iz < dims[2]; ++iz) {
        std::array<int, 3> s{ix, iy, iz};
        const int j = s[axis];
        const int slab = j / n;
        const int local = j % n;
        // Lower slab mirrors through the lower face, upper slab through the
        // upper face; both send local index l to n - 1 - l.
        s[axis] = slab == 1 ? local : n - 1 - local;
        const std::size_t from = (static_cast<std::size_t>(s[0]) * src[1] + s[1]) * src[2] + s[2];
        const std::size_t to = out_geometry.index(ix, iy, iz);
        for (int c = 0; c < 3; ++c) {
          const double v = phi(c, from);
          out(c, to) = (slab == 1 || c == axis) ? v : -v;
        }
      }
  return out;
}

ExtensionResult extend_divfree(const VectorField& phi, int n_tests, std::uint64_t seed) {
  require_cube_grid(phi.geometry());
  ExtensionResult r{extend_axis(extend_axis(extend_axis(phi, 0), 1), 2), 0.0, 0.0, 0.0};
  r.l1_input = lp_norm(phi, 1.0);
  r.l1_output = lp_norm(r.extended, 1.0);
  r.weak_div_defect = weak_divergence_defect(r.extended, n_tests, seed);
  return r;
}

double weak_divergence_defect(const VectorField& phi, int n_tests, std::uint64_t seed) {
  if (n_tests < 1) throw std::invalid_argument("weak divergence defect needs at least one test");
  const auto& g = phi.geometry();
  const auto w = widths(g);
  const double min_width = std::min({w[0], w[1], w[2]});
  const int kmax = std::max(1, std::min({g.dims()[0], g.dims()[1], g.dims()[2]}) / 8);
  double worst = 0.0;
  for (int t = 0; t < n_tests; ++t) {
    std::optional<WindowedTrig> test;
    if (t == 0) {
      TrigPolynomial one(1, 0, w, g.center(), {1.0});
      test.emplace(std::move(one), Bump{g.center(), 0.45 * min_width, kTestBumpPower});
    } else {
      std::mt19937_64 rng(seed + t);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double radius = min_width * (0.3 + 0.15 * unit(rng));
      Vec3 centre;
      for (int a = 0; a < 3; ++a) {
        const auto& iv = g.box()[a];
        centre(a) = iv.lo + radius + (iv.length() - 2 * radius) * unit(rng);
      }
      test.emplace(TrigPolynomial::random(seed + t, 1, kmax, w, centre), Bump{centre, radius, kTestBumpPower});
    }
    const VectorField grad(test->sample_jacobian(g));
    const double l1 = lp_norm(grad, 1.0);
    if (!(l1 > 0.0)) continue;
    worst = std::max(worst, std::abs(inner(phi, grad)) / l1);
  }
  return worst;
}

namespace {

using Complex = std::complex<double>;

// Objective sum <Phi, phi> h^3 / (||Phi||_1 ||grad phi||_3) for a vector trig
// polynomial times a fixed bump, with its gradient in the coefficients.
class PairingObjective {
 public:
  PairingObjective(const VectorField& phi, int kmax)
      : phi_(phi),
        g_(phi.geometry()),
        kmax_(kmax),
        period_(widths(g_)),
        bump_{g_.center(), 0.5 * std::min({g_.length(0), g_.length(1), g_.length(2)})},
        l1_(lp_norm(phi, 1.0)) {
    const std::size_t nodes = g_.size();
    bump_values_.resize(nodes);
    for (auto& d : bump_grad_) d.resize(nodes);
    const auto& n = g_.dims();
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) {
          const std::size_t idx = g_.index(ix, iy, iz);
          const Vec3 x = g_.node(ix, iy, iz);
          bump_values_[idx] = bump_.value(x);
          const Vec3 gr = bump_.gradient(x);
          for (int a = 0; a < 3; ++a) bump_grad_[a][idx] = gr(a);
        }
    // The numerator is linear; its gradient is fixed.
    numerator_grad_.reserve(coefficient_count());
    std::vector<double> u(nodes);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < nodes; ++i) u[i] = phi_(c, i) * bump_values_[i];
      for (const auto& s : trig_moments(g_, u, kmax_, period_, g_.center()))
        numerator_grad_.push_back(std::conj(s) * g_.cell_volume());
    }
  }

  std::size_t coefficient_count() const {
    const std::size_t m = 2 * kmax_ + 1;
    return 3 * m * m * m;
  }
  double l1() const { return l1_; }
  const std::vector<Complex>& numerator_gradient() const { return numerator_grad_; }

  struct Value {
    double ratio = 0.0;
    std::vector<Complex> gradient;
  };

  Value evaluate(const std::vector<Complex>& coeffs, bool with_gradient) const {
    WindowedTrig test(TrigPolynomial(3, kmax_, period_, g_.center(), coeffs), bump_);
    const Field jac = test.sample_jacobian(g_);
    double numerator = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      numerator += (std::conj(numerator_grad_[k]) * coeffs[k]).real();
    const double denom = lp_norm(jac, 3.0);
    Value v;
    if (!(denom > 0.0)) return v;
    v.ratio = numerator / (l1_ * denom);
    if (!with_gradient) return v;

    // d||grad phi||_3 / d coeff via the adjoint of sampling applied to
    // W = |grad phi| grad phi.
    const std::size_t nodes = g_.size();
    std::vector<double> mag(nodes);
    for (std::size_t i = 0; i < nodes; ++i) mag[i] = jac.magnitude(i);
    const double h3 = g_.cell_volume();
    const double scale = h3 / (denom * denom);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const int m = 2 * kmax_ + 1;
    std::vector<Complex> denom_grad;
    denom_grad.reserve(coeffs.size());
    std::vector<double> u(nodes);
    std::array<std::vector<double>, 3> vj;
    for (auto& x : vj) x.resize(nodes);
    for (int c = 0; c < 3; ++c) {
      std::fill(u.begin(), u.end(), 0.0);
      for (int j = 0; j < 3; ++j) {
        const auto wc = jac.component(3 * c + j);
        for (std::size_t i = 0; i < nodes; ++i) {
          const double wcj = mag[i] * wc[i];
          u[i] += wcj * bump_grad_[j][i];
          vj[j][i] = wcj * bump_values_[i];
        }
      }
      auto s = trig_moments(g_, u, kmax_, period_, g_.center());
      for (int j = 0; j < 3; ++j) {
        const auto sj = trig_moments(g_, vj[j], kmax_, period_, g_.center());
        for (int kx = 0; kx < m; ++kx)
          for (int ky = 0; ky < m; ++ky)
            for (int kz = 0; kz < m; ++kz) {
              const int k[3] = {kx - kmax_, ky - kmax_, kz - kmax_};
              const std::size_t idx = (static_cast<std::size_t>(kx) * m + ky) * m + kz;
              s[idx] += Complex(0.0, two_pi * k[j] / period_[j]) * sj[idx];
            }
      }
      for (const auto& x : s) denom_grad.push_back(std::conj(x) * scale);
    }
    v.gradient.resize(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      v.gradient[k] = (numerator_grad_[k] * denom - numerator * denom_grad[k]) / (l1_ * denom * denom);
    return v;
  }

 private:
  const VectorField& phi_;
  GridGeometry g_;
  int kmax_;
  std::array<double, 3> period_;
  Bump bump_;
  double l1_;
  std::vector<double> bump_values_;
  std::array<std::vector<double>, 3> bump_grad_;
  std::vector<Complex> numerator_grad_;
};

double norm_of(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

double bb_pairing_bound(const VectorField& phi, const PairingOptions& opts) {
  if (opts.trials < 1) throw std::invalid_argument("pairing bound needs at least one trial");
  if (opts.ascent_steps < 0 || opts.test_kmax < 0)
    throw std::invalid_argument("pairing bound needs nonnegative steps and kmax");
  const PairingObjective objective(phi, opts.test_kmax);
  if (!(objective.l1() > 0.0)) return 0.0;

  double best = 0.0;
  for (int trial = 0; trial < opts.trials; ++trial) {
    std::vector<Complex> c;
    if (trial == 0) {
      c = objective.numerator_gradient();
    } else {
      std::mt19937_64 rng(opts.seed + trial);
      std::normal_distribution<double> normal(0.0, 1.0);
      c.resize(objective.coefficient_count());
      for (auto& z : c) {
        const double re = normal(rng);
        z = {re, normal(rng)};
      }
    }
    if (!(norm_of(c) > 0.0)) continue;
    auto current = objective.evaluate(c, true);
    double step = 0.5;
    for (int s = 0; s < opts.ascent_steps && step > 1e-6; ++s) {
      const double gnorm = norm_of(current.gradient);
      if (!(gnorm > 0.0)) break;
      const double scale = step * norm_of(c) / gnorm;
      std::vector<Complex> trial_c(c.size());
      for (std::size_t k = 0; k < c.size(); ++k) trial_c[k] = c[k] + scale * current.gradient[k];
      auto next = objective.evaluate(trial_c, true);
      if (next.ratio > current.ratio) {
        c = std::move(trial_c);
        current = std::move(next);
        step = std::min(1.0, 1.5 * step);
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, current.ratio);
  }
  return best;
}

}  // namespace kms

#include <doctest.h>

#include "kms/extension.hpp"
#include "kms/norms.hpp"
#include "kms/synthesis.hpp"

#include <cmath>
#include <cstring>

using namespace kms;

namespace {

VectorField constant_e1(const GridGeometry& g) {
  VectorField f(g);
  for (double& v : f.component(0)) v = 1.0;
  return f;
}

}  // namespace

TEST_CASE("constant field extends with the reflection signs") {
  const auto g = GridGeometry::cube(6);
  const auto phi = constant_e1(g);
  const auto r = extend_divfree(phi, 2);
  CHECK(r.l1_output == doctest::Approx(27.0 * r.l1_input).epsilon(1e-12));
  const auto& eg = r.extended.geometry();
  CHECK(eg.dims()[0] == 18);
  CHECK(eg.box()[0].lo == doctest::Approx(-1.0));
  CHECK(eg.box()[2].hi == doctest::Approx(2.0));
  for (int ix = 0; ix < 18; ++ix)
    for (int iy = 0; iy < 18; ++iy)
      for (int iz = 0; iz < 18; ++iz) {
        const int flips = (iy / 6 != 1) + (iz / 6 != 1);
        const std::size_t idx = eg.index(ix, iy, iz);
        CHECK(r.extended(0, idx) == (flips % 2 ? -1.0 : 1.0));
        CHECK(r.extended(1, idx) == 0.0);
        CHECK(r.extended(2, idx) == 0.0);
      }
}

TEST_CASE("each step triples the L1 norm and restriction is the identity") {
  const auto g = GridGeometry::cube(8);
  const auto phi = random_solenoidal(3, g, 2, 0.4);
  VectorField cur = phi;
  double l1 = lp_norm(phi, 1.0);
  for (int axis = 0; axis < 3; ++axis) {
    cur = extend_axis(cur, axis);
    const double next = lp_norm(cur, 1.0);
    CHECK(std::abs(next - 3.0 * l1) <= 1e-12 * next);
    l1 = next;
  }
  const auto back = restrict_block(cur, {8, 8, 8}, {8, 8, 8});
  CHECK(back.geometry().box() == g.box());
  CHECK(std::memcmp(back.values().data(), phi.values().data(), 8 * phi.values().size()) == 0);
}

TEST_CASE("sign structure on a single-cell field") {
  const auto g = GridGeometry::cube(4);
  VectorField delta(g);
  const std::size_t at = g.index(1, 2, 3);
  delta(0, at) = 1.0;
  delta(1, at) = 2.0;
  delta(2, at) = 3.0;
  const auto e = extend_axis(delta, 1);
  const auto& eg = e.geometry();
  // Lower slab: y index 2 maps to local 4-1-2 = 1; upper slab local 1 at 8 + 1.
  for (int iy : {1, 9}) {
    const std::size_t idx = eg.index(1, iy, 3);
    CHECK(e(0, idx) == -1.0);
    CHECK(e(1, idx) == 2.0);
    CHECK(e(2, idx) == -3.0);
  }
  const std::size_t mid = eg.index(1, 6, 3);
  CHECK(e(0, mid) == 1.0);
  CHECK(e(1, mid) == 2.0);
  CHECK(e(2, mid) == 3.0);
  double total = 0;
  for (double v : e.values()) total += std::abs(v);
  CHECK(total == 18.0);
  // Node positions mirror exactly through y = 0 and y = 1.
  CHECK(eg.coordinate(1, 1) == doctest::Approx(-g.coordinate(1, 2)).epsilon(1e-15));
  CHECK(eg.coordinate(1, 9) == doctest::Approx(2.0 - g.coordinate(1, 2)).epsilon(1e-15));
}

TEST_CASE("extension preconditions") {
  CHECK_THROWS_AS(extend_divfree(VectorField(GridGeometry::periodic_box(8, 1.0))), std::invalid_argument);
  CHECK_THROWS_AS(extend_divfree(VectorField(GridGeometry({8, 8, 6}, {Interval{}, Interval{}, Interval{}}, false))),
                  std::invalid_argument);
}

TEST_CASE("weak divergence defect") {
  const auto g = GridGeometry::cube(24);
  CHECK(weak_divergence_defect(VectorField(g)) == 0.0);

  VectorField x(g);
  const auto& n = g.dims();
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy)
      for (int iz = 0; iz < n[2]; ++iz) {
        const Vec3 p = g.node(ix, iy, iz);
        for (int c = 0; c < 3; ++c) x(c, g.index(ix, iy, iz)) = p(c);
      }
  CHECK(weak_divergence_defect(x) >= 0.1);

  // The node sum resolves the pairing only on finer grids.
  const auto fine = GridGeometry::cube(40);
  auto phi = random_solenoidal(1, fine, 2, 0.45);
  phi *= 1.0 / lp_norm(phi, 1.0);
  CHECK(weak_divergence_defect(phi) <= 1e-6);
}

TEST_CASE("extension of solenoidal fields stays weakly solenoidal") {
  const auto g = GridGeometry::cube(24);
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    auto phi = random_solenoidal(seed, g, 2, 0.45);
    phi *= 1.0 / lp_norm(phi, 1.0);
    const double in = weak_divergence_defect(phi);
    const auto r = extend_divfree(phi);
    CHECK(r.weak_div_defect <= 1e-5);
    CHECK(r.weak_div_defect <= 5.0 * std::max(in, 1e-14));
  }
}

TEST_CASE("pairing bound") {
  const auto g = GridGeometry::cube(12);
  CHECK(bb_pairing_bound(VectorField(g)) == 0.0);
  const auto phi = random_solenoidal(4, g, 2, 0.4);
  const PairingOptions opts{.trials = 2, .ascent_steps = 15};
  const double base = bb_pairing_bound(phi, opts);
  CHECK(base > 0.0);
  CHECK(std::isfinite(base));
  CHECK(bb_pairing_bound(3.5 * phi, opts) == doctest::Approx(base).epsilon(1e-10));

  // The ascent never returns less than its first start, evaluated here
  // through an independent route.
  const double half = 0.5;
  const Bump bump{g.center(), half};
  const int kmax = opts.test_kmax;
  const int m = 2 * kmax + 1;
  std::vector<std::complex<double>> coeffs;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> u(g.size());
    const auto& n = g.dims();
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) {
          const std::size_t i = g.index(ix, iy, iz);
          u[i] = phi(c, i) * bump.value(g.node(ix, iy, iz));
        }
    for (const auto& s : trig_moments(g, u, kmax, {1.0, 1.0, 1.0}, g.center())) coeffs.push_back(std::conj(s));
  }
  REQUIRE(coeffs.size() == static_cast<std::size_t>(3 * m * m * m));
  WindowedTrig start(TrigPolynomial(3, kmax, {1.0, 1.0, 1.0}, g.center(), coeffs), bump);
  const auto test = start.sample(g);
  const auto jac = start.sample_jacobian(g);
  const double ratio = inner(phi, test) / (lp_norm(phi, 1.0) * lp_norm(jac, 3.0));
  CHECK(base >= ratio * (1 - 1e-12));
}

TEST_CASE("trig moments are the adjoint of sampling") {
  const auto g = GridGeometry::cube(6);
  const auto p = TrigPolynomial::random(2, 1, 2, {1.0, 1.3, 0.9}, g.center());
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(0.37 * i);
  const auto f = p.sample(g, 0);
  double direct = 0;
  for (std::size_t i = 0; i < u.size(); ++i) direct += u[i] * f[i];
  const auto s = trig_moments(g, u, 2, {1.0, 1.3, 0.9}, g.center());
  double via = 0;
  for (std::size_t k = 0; k < s.size(); ++k) via += (p.coefficients()[k] * s[k]).real();
  CHECK(via == doctest::Approx(direct).epsilon(1e-12));
}

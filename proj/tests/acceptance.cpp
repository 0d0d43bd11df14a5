// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "kms/calculus.hpp"
#include "kms/counterexample.hpp"
#include "kms/extension.hpp"
#include "kms/field_io.hpp"
#include "kms/harness.hpp"
#include "kms/norms.hpp"
#include "kms/projection.hpp"
#include "kms/report_io.hpp"
#include "kms/spectral.hpp"
#include "kms/synthesis.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace kms;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double l2(const Field& f) { return std::sqrt(inner(f, f)); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome helmholtz_exactness() {
  Outcome o;
  const auto t0 = Clock::now();
  const double length = 1.0;
  const int kmax = 4;
  const auto g = GridGeometry::periodic_box(32, length);
  const double scale = 2 * std::numbers::pi * kmax / length;
  double recon = 0, div_res = 0, curl_res = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const VectorField v(random_trig_field(seed, g, 3, kmax, false));
    const auto parts = helmholtz(v);
    const VectorField rest = v - parts.div_free - parts.curl_free;
    double vmax = 0, rmax = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      vmax = std::max(vmax, v.magnitude(i));
      rmax = std::max(rmax, rest.magnitude(i));
    }
    recon = std::max(recon, rmax / vmax);
    div_res = std::max(div_res, lp_norm(div(parts.div_free), 2.0) / (lp_norm(v, 2.0) * scale));
    curl_res = std::max(curl_res, lp_norm(curl(parts.curl_free), 2.0) / (lp_norm(v, 2.0) * scale));
  }
  const double elapsed = seconds_since(t0);
  o.require(recon <= 1e-12, "reconstruction " + fmt("%.2e", recon));
  o.require(div_res <= 1e-8, "div " + fmt("%.2e", div_res));
  o.require(curl_res <= 1e-8, "curl " + fmt("%.2e", curl_res));
  o.require(elapsed < 10.0, "time " + fmt("%.1fs", elapsed));
  return o;
}

Outcome multiplier_identity() {
  Outcome o;
  const auto g = GridGeometry::periodic_box(32, 1.0);
  for (const char* name : {"grad", "sym", "dev"}) {
    const auto a = builtin_operator(name);
    const Multiplier t(a, g);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const VectorField psi(random_trig_field(100 + seed, g, 3, 4, true));
      const auto du = gradient(psi);
      const auto apsi = apply_matrix_rep(a, du);
      for (int i = 0; i < 3; ++i) {
        VectorField di(g);
        for (int c = 0; c < 3; ++c) std::ranges::copy(du.entry(c, i), di.component(c).begin());
        worst = std::max(worst, l2(t.apply(i, apsi) - di) / l2(di));
      }
    }
    o.require(worst <= 1e-8, std::string(name) + " " + fmt("%.2e", worst));
  }
  return o;
}

Outcome ellipticity_oracle() {
  Outcome o;
  const double sym = ellipticity(builtin_operator("sym")).min_singular;
  const double grad = ellipticity(builtin_operator("grad")).min_singular;
  const double skew = ellipticity(builtin_operator("skew")).min_singular;
  const double trace = ellipticity(builtin_operator("trace")).min_singular;
  o.require(std::abs(sym - 0.70711) <= 1e-3, "sym " + fmt("%.6f", sym));
  o.require(std::abs(grad - 1.0) <= 1e-9, "grad " + fmt("%.12f", grad));
  o.require(skew <= 1e-6, "skew " + fmt("%.1e", skew));
  o.require(trace <= 1e-6, "trace " + fmt("%.1e", trace));
  return o;
}

Outcome first_kind_stability() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<int> grids{32, 48};
  CorpusOptions corpus;
  corpus.size = 100;
  for (const char* name : {"sym", "dev"})
    for (double p : {1.0, 2.0}) {
      const auto r = verify_first(builtin_operator(name), p, grids, corpus);
      const double q = r.stability[0];
      const bool finite = std::isfinite(r.grids[0].sup_ratio) && std::isfinite(r.grids[1].sup_ratio) &&
                          r.grids[0].sup_ratio > 0;
      o.require(finite && std::abs(q - 1.0) <= 0.10,
                std::string(name) + " p=" + fmt("%g", p) + " sup48/sup32=" + fmt("%.4f", q));
    }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 300.0, "time " + fmt("%.0fs", elapsed));
  return o;
}

Outcome counterexample_blowup() {
  Outcome o;
  const int ks[] = {4, 8, 16, 32};
  const auto s = counterexample_sequence(builtin_operator("skew"), ks, 2.0, 64);
  const double growth = s.rows.back().ratio / s.rows.front().ratio;
  double lo = s.rows[0].op_norm, hi = lo;
  for (const auto& r : s.rows) {
    lo = std::min(lo, r.op_norm);
    hi = std::max(hi, r.op_norm);
  }
  o.require(growth >= 4.0, "ratio(32)/ratio(4)=" + fmt("%.2f", growth));
  o.require(hi / lo - 1.0 <= 0.5, "op norm variation " + fmt("%.3f", hi / lo - 1.0));
  o.require(s.kernel_residual <= 1e-8, "kernel residual " + fmt("%.1e", s.kernel_residual));
  return o;
}

Outcome extension_lemma() {
  Outcome o;
  const auto g = GridGeometry::cube(24);
  bool bitwise = true;
  double worst_l1 = 0, worst_abs = 0, worst_factor = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto phi = random_solenoidal(seed, g, 2, 0.45);
    phi *= 1.0 / lp_norm(phi, 1.0);
    const double in = weak_divergence_defect(phi);
    const auto r = extend_divfree(phi);
    const auto back = restrict_block(r.extended, {24, 24, 24}, {24, 24, 24});
    bitwise = bitwise && std::memcmp(back.values().data(), phi.values().data(),
                                     sizeof(double) * phi.values().size()) == 0;
    worst_l1 = std::max(worst_l1, std::abs(r.l1_output / r.l1_input - 27.0) / 27.0);
    worst_abs = std::max(worst_abs, r.weak_div_defect);
    worst_factor = std::max(worst_factor, r.weak_div_defect / std::max(in, 1e-300));
  }
  o.require(bitwise, "restriction bitwise");
  o.require(worst_l1 <= 1e-12, "l1 ratio error " + fmt("%.1e", worst_l1));
  o.require(worst_factor <= 5.0, "defect out/in " + fmt("%.3f", worst_factor));
  o.require(worst_abs <= 1e-5, "defect " + fmt("%.2e", worst_abs));
  return o;
}

Outcome second_kind_stability() {
  Outcome o;
  const std::vector<int> grids{16, 32};
  CorpusOptions corpus;
  corpus.size = 50;
  for (auto mode : {SecondKindMode::sym, SecondKindMode::dev}) {
    const auto r = verify_second(mode, 2.0, grids, corpus);
    o.require(r.max_orthogonality_residual <= 1e-10,
              std::string(to_string(mode)) + " residual " + fmt("%.1e", r.max_orthogonality_residual));
    o.require(std::abs(r.stability[0] - 1.0) <= 0.10,
              std::string(to_string(mode)) + " sup32/sup16=" + fmt("%.4f", r.stability[0]));
  }
  const auto g = GridGeometry::cube(16);
  Mat3 skew;
  skew << 0, 1, -2, -1, 0, 3, 2, -3, 0;
  MatrixField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.set(i, skew);
  const bool obstruction = lp_norm(f, 6.0) > 0 && lp_norm(sym_part(f), 6.0) == 0 && lp_norm(curl_rows(f), 2.0) == 0;
  const double left = lp_norm(project_out(f, build_rigid_basis(g)), infinity) / lp_norm(f, infinity);
  o.require(obstruction && left <= 1e-12, "constant skew after projection " + fmt("%.1e", left));
  return o;
}

Outcome variant_sanity() {
  Outcome o;
  const auto g = GridGeometry::periodic_box(16, 3.0);
  double lorentz_gap = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = random_band_limited(seed, g, 2, 0.5);
    for (double p : {1.5, 2.0, 3.0})
      lorentz_gap = std::max(lorentz_gap, std::abs(lorentz_norm(f, p, p) - lp_norm(f, p)) / lp_norm(f, p));
  }
  o.require(lorentz_gap <= 1e-10, "L^{p,p}/L^p gap " + fmt("%.1e", lorentz_gap));

  MatrixField constant(GridGeometry::cube(8));
  for (double& x : constant.values()) x = 2.5;
  o.require(bmo_norm(constant) == 0.0, "bmo(const)");
  o.require(gagliardo_seminorm(constant, 0.5, 2.0) == 0.0, "gagliardo(const)");

  const auto small = GridGeometry::cube(12);
  const auto h = random_trig_field(3, small, 3, 2, false);
  const double base = holder_seminorm(h, 0.4).value;
  const double scaled = holder_seminorm(-3.25 * h, 0.4).value;
  o.require(std::abs(scaled - 3.25 * base) <= 1e-12 * scaled, "holder homogeneity");

  const auto sym = builtin_operator("sym");
  CorpusOptions corpus;
  corpus.size = 20;
  corpus.kmax = 1;
  struct Case {
    VariantParams params;
    std::vector<int> grids;
    const char* label;
  };
  const Case cases[] = {{{VariantKind::bmo, 3.0, {}, 0.5}, {16, 32}, "bmo"},
                        {{VariantKind::morrey, 6.0, {}, 0.5}, {16, 32}, "morrey"},
                        {{VariantKind::fractional, 2.0, {}, 0.5}, {8, 16}, "fractional"}};
  for (const auto& c : cases) {
    const auto r = verify_variant(sym, c.params, c.grids, corpus);
    const bool finite = std::isfinite(r.grids[0].sup_ratio) && std::isfinite(r.grids[1].sup_ratio) &&
                        r.grids[0].sup_ratio > 0;
    o.require(finite && std::abs(r.stability[0] - 1.0) <= 0.15,
              std::string(c.label) + " quotient " + fmt("%.4f", r.stability[0]));
  }
  return o;
}

Outcome pairing_estimator() {
  Outcome o;
  double best[2] = {0, 0};
  const int grids[2] = {16, 32};
  PairingOptions opts;
  opts.trials = 2;
  opts.ascent_steps = 20;
  for (int level = 0; level < 2; ++level) {
    const auto g = GridGeometry::cube(grids[level]);
    for (std::uint64_t seed = 0; seed < 50; ++seed)
      best[level] = std::max(best[level], bb_pairing_bound(random_solenoidal(seed, g, 2, 0.45), opts));
  }
  const double q = best[1] / best[0];
  o.require(std::isfinite(best[0]) && std::isfinite(best[1]) && best[0] > 0, "finite " + fmt("%.4f", best[0]));
  o.require(std::abs(q - 1.0) <= 0.15, "max32/max16=" + fmt("%.4f", q));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("kms_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };

  write_field(random_trig_field(1, GridGeometry::periodic_box(16, 1.0), 9, 2, false), p("f.kmsf"));
  write_field(random_solenoidal(1, GridGeometry::cube(12), 1, 0.45), p("phi.kmsf"));

  struct Cmd {
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::vector<Cmd> cmds = {
      {"check-elliptic --operator sym", {}},
      {"check-elliptic --operator skew", {}},
      {"decompose --in " + p("f.kmsf") + " --out-div " + p("d.kmsf") + " --out-curl " + p("c.kmsf"),
       {p("d.kmsf"), p("c.kmsf")}},
      {"--seed 7 verify --operator sym --p 1 --grids 32 --corpus 10 --out " + p("v.csv") + " --summary " +
           p("v.json"),
       {p("v.csv"), p("v.json")}},
      {"verify --operator dev --kind subcritical --p 2 --grids 16 --corpus 4 --out " + p("s.csv"), {p("s.csv")}},
      {"verify-variant --kind lorentz --p 1.5 --q 2 --grids 16 --corpus 4 --out " + p("l.csv"), {p("l.csv")}},
      {"verify2 --mode dev --p 2 --grids 16 --corpus 6 --out " + p("w.csv"), {p("w.csv")}},
      {"counterexample --operator skew --ks 4,8 --grid 32 --out " + p("k.csv"), {p("k.csv")}},
      {"extend --in " + p("phi.kmsf") + " --out " + p("e.kmsf") + " --report " + p("e.json"),
       {p("e.kmsf"), p("e.json")}},
  };
  for (const auto& cmd : cmds) {
    std::vector<std::string> first;
    bool same = true;
    int codes[2] = {-1, -1};
    for (int rep = 0; rep < 2; ++rep) {
      const std::string line = std::string(KMS_CLI_PATH) + " " + cmd.args + " >" + p("stdout") + " 2>" + p("stderr");
      const int status = std::system(line.c_str());
      codes[rep] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      std::vector<std::string> outs{slurp(p("stdout"))};
      for (const auto& f : cmd.outputs) outs.push_back(slurp(f));
      if (rep == 0)
        first = std::move(outs);
      else
        same = outs == first;
    }
    const std::string sub = cmd.args.starts_with("--seed") ? "verify" : cmd.args.substr(0, cmd.args.find(' '));
    o.require(same && codes[0] == codes[1] && codes[0] != 1 && codes[0] != 3, sub);
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 Helmholtz exactness", helmholtz_exactness},
      {"2 Multiplier identity", multiplier_identity},
      {"3 Ellipticity oracle", ellipticity_oracle},
      {"4 First-kind stability", first_kind_stability},
      {"5 Non-ellipticity blow-up", counterexample_blowup},
      {"6 Extension lemma", extension_lemma},
      {"7 Second-kind stability", second_kind_stability},
      {"8 Variant norms sanity", variant_sanity},
      {"9 Pairing estimator", pairing_estimator},
      {"10 CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", c.name, seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

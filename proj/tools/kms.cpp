#include "kms/counterexample.hpp"
#include "kms/errors.hpp"
#include "kms/extension.hpp"
#include "kms/field_io.hpp"
#include "kms/harness.hpp"
#include "kms/norms.hpp"
#include "kms/operators.hpp"
#include "kms/report_io.hpp"
#include "kms/spectral.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_not_elliptic = 2, exit_numerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(const char* tag, const std::string& what, int code) {
  std::string line = what;
  for (char& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "kms: " << tag << ": " << line << "\n";
  return code;
}

struct Common {
  std::uint64_t seed = 0;
  int jobs = 1;
  bool dump_config = false;
};

struct CheckElliptic {
  std::string op;
  int samples = 2000;
  double tol = 1e-6;
};

struct Decompose {
  std::string in, out_div, out_curl;
};

struct Corpus {
  std::vector<int> grids;
  std::size_t size = 100;
  int kmax = 0;
  double box_length = 3.0;
  double support_radius = 0.5;
  std::string out, summary;
};

Corpus corpus_defaults(std::vector<int> grids, std::size_t size) {
  Corpus c;
  c.grids = std::move(grids);
  c.size = size;
  return c;
}

struct Verify {
  std::string op;
  std::string kind = "first";
  double p = 2.0;
  Corpus corpus = corpus_defaults({32, 48}, 100);
};

struct VerifyVariant {
  std::string op = "sym";
  std::string kind;
  double p = 3.0;
  std::string q;
  double theta = 0.5;
  Corpus corpus = corpus_defaults({16, 32}, 20);
};

struct Verify2 {
  std::string mode;
  double p = 2.0;
  Corpus corpus = corpus_defaults({16, 32}, 50);
};

struct Counterexample {
  std::string op;
  std::vector<int> ks{4, 8, 16, 32};
  double p = 2.0;
  int grid = 64;
  std::string out, summary;
};

struct Extend {
  std::string in, out, report;
  int tests = 8;
};

void add_corpus_options(CLI::App* sub, Corpus& c) {
  sub->add_option("--grids", c.grids, "Nodes per axis of each grid, comma separated")->delimiter(',');
  sub->add_option("--corpus", c.size, "Number of corpus fields")->check(CLI::PositiveNumber);
  sub->add_option("--kmax", c.kmax, "Frequency cut-off of the corpus; 0 picks min(grids)/8")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--box-length", c.box_length, "Side of the periodic box for whole-space corpora")
      ->check(CLI::PositiveNumber);
  sub->add_option("--support-radius", c.support_radius, "Support radius of whole-space corpus fields")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Per-field rows as CSV");
  sub->add_option("--summary", c.summary, "Summary as JSON (also printed to stdout)");
}

kms::CorpusOptions corpus_options(const Corpus& c, const Common& common) {
  kms::CorpusOptions o;
  o.size = c.size;
  o.seed = common.seed;
  if (c.kmax > 0) o.kmax = c.kmax;
  o.box_length = c.box_length;
  o.support_radius = c.support_radius;
  o.jobs = common.jobs;
  return o;
}

void emit_report(const kms::RatioReport& r, const Corpus& c) {
  if (!c.out.empty()) kms::write_text(c.out, kms::ratio_rows_csv(r));
  const auto summary = kms::ratio_summary_json(r);
  if (!c.summary.empty()) kms::write_text(c.summary, summary);
  std::cout << summary;
}

double parse_double(const std::string& s, const char* what) {
  if (s == "inf" || s == "infinity") return kms::infinity;
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) throw UsageError(std::string("invalid ") + what + ": " + s);
  return x;
}

void require_finite(const kms::Field& f, const char* what) {
  if (!f.all_finite()) throw kms::NumericalError(std::string(what) + " contains NaN or infinity");
}

int run_check_elliptic(const CheckElliptic& o) {
  const auto a = kms::load_operator(o.op);
  kms::EllipticityOptions opts;
  opts.sphere_samples = o.samples;
  opts.elliptic_tol = o.tol;
  const auto r = kms::ellipticity(a, opts);
  std::cout << kms::ellipticity_json(a, r);
  return r.is_elliptic ? exit_ok : exit_not_elliptic;
}

int run_decompose(const Decompose& o) {
  const auto f = kms::read_field(o.in);
  kms::Field div_free(f.geometry(), f.components());
  kms::Field curl_free(f.geometry(), f.components());
  if (f.components() == 3) {
    auto parts = kms::helmholtz(kms::VectorField(f));
    div_free = std::move(parts.div_free);
    curl_free = std::move(parts.curl_free);
  } else if (f.components() == 9) {
    auto parts = kms::helmholtz_rows(kms::MatrixField(f));
    div_free = std::move(parts.div_free);
    curl_free = std::move(parts.curl_free);
  } else {
    throw UsageError("decompose needs a 3- or 9-component field");
  }
  require_finite(div_free, "divergence-free part");
  require_finite(curl_free, "curl-free part");
  kms::write_field(div_free, o.out_div);
  kms::write_field(curl_free, o.out_curl);
  return exit_ok;
}

int run_verify(const Verify& o, const Common& common) {
  const auto a = kms::load_operator(o.op);
  const auto corpus = corpus_options(o.corpus, common);
  kms::RatioReport r;
  if (o.kind == "first")
    r = kms::verify_first(a, o.p, o.corpus.grids, corpus);
  else
    r = kms::verify_subcritical(a, o.p, o.corpus.grids, corpus);
  emit_report(r, o.corpus);
  return exit_ok;
}

int run_verify_variant(const VerifyVariant& o, const Common& common) {
  const auto a = kms::load_operator(o.op);
  kms::VariantParams params;
  if (o.kind == "bmo")
    params.kind = kms::VariantKind::bmo;
  else if (o.kind == "morrey")
    params.kind = kms::VariantKind::morrey;
  else if (o.kind == "lorentz")
    params.kind = kms::VariantKind::lorentz;
  else
    params.kind = kms::VariantKind::fractional;
  params.p = o.p;
  if (!o.q.empty()) params.q = parse_double(o.q, "q");
  params.theta = o.theta;
  const auto r = kms::verify_variant(a, params, o.corpus.grids, corpus_options(o.corpus, common));
  emit_report(r, o.corpus);
  return exit_ok;
}

int run_verify2(const Verify2& o, const Common& common) {
  const auto mode = o.mode == "sym" ? kms::SecondKindMode::sym : kms::SecondKindMode::dev;
  const auto r = kms::verify_second(mode, o.p, o.corpus.grids, corpus_options(o.corpus, common));
  emit_report(r, o.corpus);
  return exit_ok;
}

int run_counterexample(const Counterexample& o) {
  const auto a = kms::load_operator(o.op);
  kms::CounterexampleSequence s;
  try {
    s = kms::counterexample_sequence(a, o.ks, o.p, o.grid);
  } catch (const kms::PreconditionError& e) {
    throw UsageError(e.what());
  }
  if (!o.out.empty()) kms::write_text(o.out, kms::counterexample_csv(s));
  const auto summary = kms::counterexample_json(s);
  if (!o.summary.empty()) kms::write_text(o.summary, summary);
  std::cout << summary;
  return exit_ok;
}

int run_extend(const Extend& o, const Common& common) {
  const auto f = kms::read_field(o.in);
  if (f.components() != 3) throw UsageError("extend needs a 3-component field");
  const auto r = kms::extend_divfree(kms::VectorField(f), o.tests, common.seed);
  require_finite(r.extended, "extended field");
  if (!std::isfinite(r.weak_div_defect)) throw kms::NumericalError("weak divergence defect is not finite");
  kms::write_field(r.extended, o.out);
  const auto report = kms::extension_json(r);
  if (!o.report.empty()) kms::write_text(o.report, report);
  std::cout << report;
  return exit_ok;
}

// Effective options as INI: globals, then a section for the selected
// subcommand. Reading the output back with --config reproduces the run.
std::string dump_config(const CLI::App& app, const CLI::App& sub) {
  const auto lines = [](const CLI::App& a) {
    std::string out;
    for (const CLI::Option* opt : a.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name == "dump-config") continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        if (r.size() == 1) {
          value = r.front();
        } else {
          value = "[";
          for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
          value += "]";
        }
      } else {
        value = opt->get_default_str();
      }
      if (value.empty()) continue;
      const bool text = opt->get_type_name().rfind("TEXT", 0) == 0;
      out += name + "=" + (text ? "\"" + value + "\"" : value) + "\n";
    }
    return out;
  };
  return lines(app) + "[" + sub.get_name() + "]\n" + lines(sub);
}

void apply_seed_override(Common& common) {
  const char* env = std::getenv("KMS_SEED");
  if (env == nullptr) return;
  const std::string s(env);
  std::uint64_t seed = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
    throw UsageError("KMS_SEED is not an unsigned integer: " + s);
  common.seed = seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification experiments for Korn-type inequalities with incompatible fields", "kms"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  app.add_option("--seed", common.seed, "Corpus seed (KMS_SEED overrides)");
  app.add_option("--jobs", common.jobs, "Worker threads for corpus items")->check(CLI::PositiveNumber);
  app.add_flag("--dump-config", common.dump_config, "Print the effective configuration and exit");

  const auto operator_help = "Builtin name (grad, sym, dev, skew, trace) or operator JSON file";
  const auto one_of = [](std::vector<std::string> v) { return CLI::IsMember(std::move(v)); };

  CheckElliptic ce;
  auto* check = app.add_subcommand("check-elliptic", "Sweep the symbol over the sphere for its smallest singular value");
  check->add_option("--operator", ce.op, operator_help)->required();
  check->add_option("--samples", ce.samples, "Fibonacci sphere samples")->check(CLI::PositiveNumber);
  check->add_option("--tol", ce.tol, "Ellipticity threshold on min_singular")->check(CLI::PositiveNumber);

  Decompose de;
  auto* decompose = app.add_subcommand("decompose", "Helmholtz split of a periodic KMSF vector or matrix field");
  decompose->add_option("--in", de.in, "Input KMSF field")->required();
  decompose->add_option("--out-div", de.out_div, "Divergence-free part")->required();
  decompose->add_option("--out-curl", de.out_curl, "Curl-free part")->required();

  Verify ve;
  auto* verify = app.add_subcommand("verify", "First-kind inequality over a seeded compactly supported corpus");
  verify->add_option("--operator", ve.op, operator_help)->required();
  verify->add_option("--kind", ve.kind, "first: exponents p* and p; subcritical: all at p")
      ->check(one_of({"first", "subcritical"}));
  verify->add_option("--p", ve.p, "Integrability exponent");
  add_corpus_options(verify, ve.corpus);

  VerifyVariant vv;
  auto* variant = app.add_subcommand("verify-variant", "BMO, Morrey, Lorentz or fractional variant");
  variant->add_option("--kind", vv.kind, "Variant")->required()->check(one_of({"bmo", "morrey", "lorentz", "fractional"}));
  variant->add_option("--operator", vv.op, operator_help);
  variant->add_option("--p", vv.p, "bmo: 3; morrey: p > 3; lorentz, fractional: 1 <= p < 3");
  variant->add_option("--q", vv.q, "Lorentz second index (number or inf); empty matches each norm's exponent");
  variant->add_option("--theta", vv.theta, "Fractional order in (0, 1)");
  add_corpus_options(variant, vv.corpus);

  Verify2 v2;
  auto* verify2 = app.add_subcommand("verify2", "Second-kind inequality on the unit cube after projection");
  verify2->add_option("--mode", v2.mode, "sym projects rigid motions, dev conformal Killing fields")
      ->required()
      ->check(one_of({"sym", "dev"}));
  verify2->add_option("--p", v2.p, "Integrability exponent in [1, 3)");
  add_corpus_options(verify2, v2.corpus);

  Counterexample cx;
  auto* counter = app.add_subcommand("counterexample", "Oscillating sequence along a kernel direction of a non-elliptic operator");
  counter->add_option("--operator", cx.op, operator_help)->required();
  counter->add_option("--ks", cx.ks, "Oscillation frequencies, comma separated")->delimiter(',');
  counter->add_option("--p", cx.p, "Integrability exponent");
  counter->add_option("--grid", cx.grid, "Nodes per axis on the periodic box of side 3")->check(CLI::PositiveNumber);
  counter->add_option("--out", cx.out, "Sequence as CSV");
  counter->add_option("--summary", cx.summary, "Summary as JSON (also printed to stdout)");

  Extend ex;
  auto* extend = app.add_subcommand("extend", "Solenoidal reflection extension from a cube to its threefold");
  extend->add_option("--in", ex.in, "Input KMSF vector field on a cube grid")->required();
  extend->add_option("--out", ex.out, "Extended KMSF field")->required();
  extend->add_option("--report", ex.report, "Report as JSON (also printed to stdout)");
  extend->add_option("--tests", ex.tests, "Test functions for the weak divergence defect")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage-error", e.what(), exit_usage);
  }

  if (common.dump_config) {
    std::cout << dump_config(app, *app.get_subcommands().front());
    return exit_ok;
  }

  try {
    apply_seed_override(common);
    if (check->parsed()) return run_check_elliptic(ce);
    if (decompose->parsed()) return run_decompose(de);
    if (verify->parsed()) return run_verify(ve, common);
    if (variant->parsed()) return run_verify_variant(vv, common);
    if (verify2->parsed()) return run_verify2(v2, common);
    if (counter->parsed()) return run_counterexample(cx);
    if (extend->parsed()) return run_extend(ex, common);
  } catch (const kms::NumericalError& e) {
    return fail("numerical-error", e.what(), exit_numerical);
  } catch (const kms::PreconditionError& e) {
    return fail("not-elliptic", e.what(), exit_not_elliptic);
  } catch (const kms::FieldIoError& e) {
    return fail("io-error", e.what(), exit_usage);
  } catch (const std::exception& e) {
    return fail("usage-error", e.what(), exit_usage);
  }
  return exit_usage;
}

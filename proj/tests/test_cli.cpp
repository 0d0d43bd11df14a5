#include <doctest.h>

#include "kms/field_io.hpp"
#include "kms/operators.hpp"
#include "kms/report_io.hpp"
#include "kms/synthesis.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace kms;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("kms_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  Sandbox(const Sandbox&) = delete;
  Sandbox& operator=(const Sandbox&) = delete;

  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Run run(const std::string& args, const std::string& env = "") const {
    const auto out = dir_ / "stdout";
    const auto err = dir_ / "stderr";
    const std::string cmd = env + " " + KMS_CLI_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

 private:
  fs::path dir_;
};

bool single_line(const std::string& s) { return !s.empty() && s.find('\n') == s.size() - 1; }

}  // namespace

TEST_CASE("help output matches the golden files") {
  Sandbox box;
  const fs::path golden = KMS_GOLDEN_DIR;
  CHECK(box.run("--help").out == slurp(golden / "help.txt"));
  for (const char* sub : {"check-elliptic", "decompose", "verify", "verify-variant", "verify2", "counterexample", "extend"}) {
    CAPTURE(sub);
    const auto r = box.run(std::string(sub) + " --help");
    CHECK(r.code == 0);
    CHECK(r.out == slurp(golden / ("help_" + std::string(sub) + ".txt")));
  }
}

TEST_CASE("check-elliptic exit codes") {
  Sandbox box;
  const auto sym = box.run("check-elliptic --operator sym");
  CHECK(sym.code == 0);
  const auto j = nlohmann::json::parse(sym.out);
  CHECK(j["min_singular"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(j["is_elliptic"] == true);
  CHECK(box.run("check-elliptic --operator skew").code == 2);
  CHECK(box.run("check-elliptic --operator trace").code == 2);
}

TEST_CASE("usage errors are one machine-readable line") {
  Sandbox box;
  for (const char* args : {"", "verify --operator sym --bogus 1", "verify", "verify2 --mode shear",
                           "check-elliptic --operator nosuchop", "verify-variant --kind bmo --p 2 --grids 16",
                           "counterexample --operator sym --grid 32"}) {
    CAPTURE(args);
    const auto r = box.run(args);
    CHECK(r.code == 1);
    CHECK(single_line(r.err));
    CHECK(r.err.rfind("kms: ", 0) == 0);
  }
  const auto r = box.run("verify --operator skew --grids 16 --corpus 2");
  CHECK(r.code == 2);
  CHECK(r.err.rfind("kms: not-elliptic: ", 0) == 0);
}

TEST_CASE("non-finite results exit with 3") {
  Sandbox box;
  const auto grad = builtin_operator("grad");
  const MatrixRep huge(1e308 * grad.entries(), "huge");
  write_text(box / "huge.json", operator_to_json(huge));
  const auto r = box.run("verify --operator " + (box / "huge.json").string() + " --grids 16 --corpus 2 --kmax 2");
  CHECK(r.code == 3);
  CHECK(r.err.rfind("kms: numerical-error: ", 0) == 0);
}

TEST_CASE("verify output is byte-identical across runs, threads and seed sources") {
  Sandbox box;
  const std::string base = "verify --operator sym --p 1 --grids 16 --corpus 4 --kmax 2";
  const auto csv = (box / "a.csv").string();
  REQUIRE(box.run("--seed 7 " + base + " --out " + csv).code == 0);
  const auto first = slurp(csv);
  REQUIRE(box.run("--seed 7 " + base + " --out " + csv).code == 0);
  CHECK(slurp(csv) == first);
  REQUIRE(box.run("--seed 7 --jobs 3 " + base + " --out " + csv).code == 0);
  CHECK(slurp(csv) == first);
  REQUIRE(box.run("--seed 1 " + base + " --out " + csv, "KMS_SEED=7").code == 0);
  CHECK(slurp(csv) == first);
  REQUIRE(box.run("--seed 1 " + base + " --out " + csv).code == 0);
  CHECK(slurp(csv) != first);
  CHECK(first.rfind("index,lhs,rhs_elliptic,rhs_curl,ratio,flag\n", 0) == 0);
  CHECK(box.run(base, "KMS_SEED=-3").code == 1);
}

TEST_CASE("config files round trip and reject unknown keys") {
  Sandbox box;
  const auto ini = (box / "run.ini").string();
  const std::string args = "verify --operator sym --p 1.5 --grids 16 --corpus 2 --kmax 2";
  const auto dumped = box.run("--seed 3 --dump-config " + args);
  REQUIRE(dumped.code == 0);
  write_text(ini, dumped.out);
  CHECK(box.run("--config " + ini + " --dump-config verify").out == dumped.out);
  const auto direct = box.run("--seed 3 " + args);
  const auto via = box.run("--config " + ini + " verify");
  CHECK(via.code == 0);
  CHECK(via.out == direct.out);
  write_text(ini, dumped.out + "unknown_key=1\n");
  const auto bad = box.run("--config " + ini + " verify");
  CHECK(bad.code == 1);
  CHECK(single_line(bad.err));
}

TEST_CASE("decompose splits a periodic field") {
  Sandbox box;
  const auto g = GridGeometry::periodic_box(12, 1.0);
  const VectorField v(random_trig_field(4, g, 3, 3, false));
  write_field(v, box / "v.kmsf");
  const auto r = box.run("decompose --in " + (box / "v.kmsf").string() + " --out-div " + (box / "d.kmsf").string() +
                         " --out-curl " + (box / "c.kmsf").string());
  REQUIRE(r.code == 0);
  const auto d = read_field(box / "d.kmsf");
  const auto c = read_field(box / "c.kmsf");
  double worst = 0;
  for (std::size_t i = 0; i < v.values().size(); ++i)
    worst = std::max(worst, std::abs(d.values()[i] + c.values()[i] - v.values()[i]));
  CHECK(worst <= 1e-12 * v.max_magnitude());

  write_field(VectorField(GridGeometry::cube(8)), box / "cube.kmsf");
  CHECK(box.run("decompose --in " + (box / "cube.kmsf").string() + " --out-div x --out-curl y").code == 1);
}

TEST_CASE("extend writes the tripled field and a report") {
  Sandbox box;
  const auto phi = random_solenoidal(2, GridGeometry::cube(8), 1, 0.45);
  write_field(phi, box / "phi.kmsf");
  const auto args = "extend --in " + (box / "phi.kmsf").string() + " --out " + (box / "ext.kmsf").string() +
                    " --report " + (box / "ext.json").string();
  REQUIRE(box.run(args).code == 0);
  const auto ext = read_field(box / "ext.kmsf");
  CHECK(ext.geometry().dims() == std::array<int, 3>{24, 24, 24});
  const auto report = slurp(box / "ext.json");
  const auto j = nlohmann::json::parse(report);
  CHECK(j["l1_ratio"].get<double>() == doctest::Approx(27.0).epsilon(1e-12));
  REQUIRE(box.run(args).code == 0);
  CHECK(slurp(box / "ext.json") == report);
}

TEST_CASE("counterexample writes its sequence") {
  Sandbox box;
  const auto csv = (box / "seq.csv").string();
  REQUIRE(box.run("counterexample --operator skew --ks 4,8 --grid 32 --out " + csv).code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("k,grad_norm,op_norm,ratio\n4,", 0) == 0);
}

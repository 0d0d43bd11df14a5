#include <doctest.h>

#include "kms/norms.hpp"
#include "kms/report_io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <sstream>

using namespace kms;

namespace {

RatioReport sample_report() {
  RatioReport r;
  r.operator_name = "sym";
  r.kind = InequalityKind::lorentz;
  r.p = 1.5;
  r.q = infinity;
  r.seed = 9;
  r.corpus_size = 2;
  GridRun g;
  g.grid = 16;
  g.rows = {{0, 0.1, 1.0 / 3.0, 2.0, 0.1 / (1.0 / 3.0 + 2.0), false}, {1, 0.0, 0.0, 0.0, 0.0, true}};
  g.sup_ratio = g.rows[0].ratio;
  g.flagged = 1;
  r.grids = {g, g};
  r.stability = {1.0};
  return r;
}

}  // namespace

TEST_CASE("doubles print with 17 significant digits and read back exactly") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 1.0}) {
    const auto s = format_double(x);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(std::memcmp(&back, &x, sizeof x) == 0);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("ratio CSV layout") {
  const auto csv = ratio_rows_csv(sample_report());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,lhs,rhs_elliptic,rhs_curl,ratio,flag");
  std::getline(in, line);
  CHECK(line.rfind("0,0.10000000000000001,0.33333333333333331,2,", 0) == 0);
  CHECK(line.back() == '0');
  std::getline(in, line);
  CHECK(line == "1,0,0,0,0,1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("ratio summary JSON") {
  const auto j = nlohmann::json::parse(ratio_summary_json(sample_report()));
  CHECK(j["operator"] == "sym");
  CHECK(j["kind"] == "lorentz");
  CHECK(j["q"] == "inf");
  CHECK(j["seed"] == 9);
  CHECK(j["grids"].size() == 2);
  CHECK(j["grids"][0]["flagged"] == 1);
  CHECK(j["grids"][0]["sup_ratio"].get<double>() == sample_report().grids[0].sup_ratio);
  CHECK(j["stability"][0] == 1.0);
  CHECK_FALSE(j.contains("rescaled"));
}

TEST_CASE("counterexample CSV") {
  CounterexampleSequence s;
  s.rows = {{4, 1.5, 0.5, 3.0}, {8, 3.0, 0.5, 6.0}};
  CHECK(counterexample_csv(s) == "k,grad_norm,op_norm,ratio\n4,1.5,0.5,3\n8,3,0.5,6\n");
  const auto j = nlohmann::json::parse(counterexample_json(s));
  CHECK(j["rows"][1]["k"] == 8);
}

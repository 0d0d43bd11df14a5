#include "kms/report_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace kms {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v(0), v(1), v(2)}); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string ratio_rows_csv(const RatioReport& r) {
  std::string out = "index,lhs,rhs_elliptic,rhs_curl,ratio,flag\n";
  for (const auto& g : r.grids)
    for (const auto& row : g.rows) {
      out += std::to_string(row.index);
      for (double x : {row.lhs, row.rhs_elliptic, row.rhs_curl, row.ratio}) out += "," + format_double(x);
      out += row.flagged ? ",1\n" : ",0\n";
    }
  return out;
}

std::string ratio_summary_json(const RatioReport& r) {
  ordered_json j;
  j["operator"] = r.operator_name;
  j["kind"] = to_string(r.kind);
  j["p"] = r.p;
  if (r.q) j["q"] = std::isinf(*r.q) ? ordered_json("inf") : ordered_json(*r.q);
  if (r.theta) j["theta"] = *r.theta;
  if (r.alpha) j["alpha"] = *r.alpha;
  j["seed"] = r.seed;
  j["corpus_size"] = r.corpus_size;
  j["kmax"] = r.kmax;
  j["box_length"] = r.box_length;
  j["support_radius"] = r.support_radius;
  auto grids = ordered_json::array();
  for (const auto& g : r.grids)
    grids.push_back({{"grid", g.grid}, {"rows", g.rows.size()}, {"flagged", g.flagged}, {"sup_ratio", g.sup_ratio}});
  j["grids"] = std::move(grids);
  j["stability"] = r.stability;
  if (!r.rescaled.empty()) {
    auto rescaled = ordered_json::array();
    for (const auto& s : r.rescaled)
      rescaled.push_back({{"scale", s.scale}, {"support_radius", s.support_radius}, {"sup_ratio", s.sup_ratio}});
    j["rescaled"] = std::move(rescaled);
  }
  if (r.kind == InequalityKind::fractional) j["ill_conditioned"] = r.ill_conditioned;
  if (r.kind == InequalityKind::second_sym || r.kind == InequalityKind::second_dev)
    j["max_orthogonality_residual"] = r.max_orthogonality_residual;
  return dump(j);
}

std::string counterexample_csv(const CounterexampleSequence& s) {
  std::string out = "k,grad_norm,op_norm,ratio\n";
  for (const auto& row : s.rows)
    out += std::to_string(row.k) + "," + format_double(row.grad_norm) + "," + format_double(row.op_norm) + "," +
           format_double(row.ratio) + "\n";
  return out;
}

std::string counterexample_json(const CounterexampleSequence& s) {
  ordered_json j;
  j["operator"] = s.operator_name;
  j["xi"] = vec_json(s.xi);
  j["v"] = vec_json(s.v);
  j["kernel_residual"] = s.kernel_residual;
  j["p"] = s.p;
  j["grid"] = s.grid;
  j["box_length"] = s.box_length;
  auto rows = ordered_json::array();
  for (const auto& row : s.rows)
    rows.push_back({{"k", row.k}, {"grad_norm", row.grad_norm}, {"op_norm", row.op_norm}, {"ratio", row.ratio}});
  j["rows"] = std::move(rows);
  return dump(j);
}

std::string ellipticity_json(const MatrixRep& a, const EllipticityReport& r) {
  ordered_json j;
  j["operator"] = a.name();
  j["min_singular"] = r.min_singular;
  j["argmin_xi"] = vec_json(r.argmin_xi);
  j["near_kernel_v"] = vec_json(r.near_kernel_v);
  j["is_elliptic"] = r.is_elliptic;
  j["tolerance"] = r.tolerance;
  return dump(j);
}

std::string extension_json(const ExtensionResult& r) {
  ordered_json j;
  const auto& d = r.extended.geometry().dims();
  j["extended_dims"] = {d[0], d[1], d[2]};
  j["l1_input"] = r.l1_input;
  j["l1_output"] = r.l1_output;
  j["l1_ratio"] = r.l1_output / r.l1_input;
  j["weak_div_defect"] = r.weak_div_defect;
  return dump(j);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace kms

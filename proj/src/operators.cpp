#include "kms/operators.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kms {

Vec9 vectorize(const Mat3& m) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
  return v;
}

Mat3 unvectorize(const Vec9& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
  return m;
}

MatrixRep::MatrixRep(Eigen::Matrix<double, Eigen::Dynamic, 9> entries, std::string name)
    : entries_(std::move(entries)), name_(std::move(name)) {
  if (entries_.rows() < 1) throw std::invalid_argument("matrix representative needs n_out >= 1");
  if (!entries_.allFinite())
    throw std::invalid_argument("matrix representative has non-finite entries");
}

Eigen::VectorXd MatrixRep::apply(const Mat3& m) const { return entries_ * vectorize(m); }

namespace {

// Row k of the representative is the image of the basis matrix E_k under
// the pointwise map, read back in row-major order.
template <typename Map>
Eigen::Matrix<double, Eigen::Dynamic, 9> tabulate(int n_out, Map map) {
  Eigen::Matrix<double, Eigen::Dynamic, 9> e(n_out, 9);
  for (int k = 0; k < 9; ++k) {
    Vec9 basis = Vec9::Zero();
    basis(k) = 1.0;
    e.col(k) = map(unvectorize(basis));
  }
  return e;
}

}  // namespace

MatrixRep MatrixRep::builtin(BuiltinOperator op) {
  switch (op) {
    case BuiltinOperator::grad:
      return MatrixRep(tabulate(9, [](const Mat3& m) { return Eigen::VectorXd(vectorize(m)); }),
                       "grad");
    case BuiltinOperator::sym:
      return MatrixRep(tabulate(9,
                                [](const Mat3& m) {
                                  return Eigen::VectorXd(vectorize(0.5 * (m + m.transpose())));
                                }),
                       "sym");
    case BuiltinOperator::dev:
      return MatrixRep(tabulate(9,
                                [](const Mat3& m) {
                                  Mat3 d = 0.5 * (m + m.transpose()) -
                                           (m.trace() / 3.0) * Mat3::Identity();
                                  return Eigen::VectorXd(vectorize(d));
                                }),
                       "dev");
    case BuiltinOperator::skew:
      return MatrixRep(tabulate(9,
                                [](const Mat3& m) {
                                  return Eigen::VectorXd(vectorize(0.5 * (m - m.transpose())));
                                }),
                       "skew");
    case BuiltinOperator::trace:
      return MatrixRep(tabulate(1,
                                [](const Mat3& m) {
                                  Eigen::VectorXd t(1);
                                  t(0) = m.trace();
                                  return t;
                                }),
                       "trace");
  }
  throw std::invalid_argument("unknown builtin operator");
}

MatrixRep builtin_operator(std::string_view name) {
  if (name == "grad") return MatrixRep::builtin(BuiltinOperator::grad);
  if (name == "sym") return MatrixRep::builtin(BuiltinOperator::sym);
  if (name == "dev") return MatrixRep::builtin(BuiltinOperator::dev);
  if (name == "skew") return MatrixRep::builtin(BuiltinOperator::skew);
  if (name == "trace") return MatrixRep::builtin(BuiltinOperator::trace);
  throw std::invalid_argument("unknown operator name '" + std::string(name) + "'");
}

MatrixRep operator_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("operator file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n_out") || !doc.contains("entries"))
    throw std::invalid_argument("operator file needs keys 'n_out' and 'entries'");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "n_out" && key != "entries")
      throw std::invalid_argument("operator file has unknown key '" + key + "'");
  }
  if (!doc["n_out"].is_number_integer()) throw std::invalid_argument("'n_out' must be an integer");
  const int n_out = doc["n_out"].get<int>();
  const auto& rows = doc["entries"];
  if (n_out < 1 || !rows.is_array() || static_cast<int>(rows.size()) != n_out)
    throw std::invalid_argument("'entries' must hold exactly n_out >= 1 rows");
  Eigen::Matrix<double, Eigen::Dynamic, 9> e(n_out, 9);
  for (int r = 0; r < n_out; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != 9)
      throw std::invalid_argument("every row of 'entries' must hold 9 numbers");
    for (int c = 0; c < 9; ++c) {
      if (!row[c].is_number()) throw std::invalid_argument("'entries' must be numeric");
      e(r, c) = row[c].get<double>();
    }
  }
  std::string name = doc.value("name", std::string{});
  return MatrixRep(std::move(e), std::move(name));
}

std::string operator_to_json(const MatrixRep& a) {
  nlohmann::json doc;
  doc["name"] = a.name();
  doc["n_out"] = a.n_out();
  doc["entries"] = nlohmann::json::array();
  for (int r = 0; r < a.n_out(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 9; ++c) row.push_back(a.entries()(r, c));
    doc["entries"].push_back(row);
  }
  return doc.dump();
}

MatrixRep load_operator(const std::string& name_or_path) {
  for (auto n : {"grad", "sym", "dev", "skew", "trace"})
    if (name_or_path == n) return builtin_operator(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw std::invalid_argument("no builtin operator or readable file named '" +
                                       name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return operator_from_json(buf.str());
}

SymbolMatrix symbol(const MatrixRep& a, const Vec3& xi) {
  // Column c is A[e_c (x) xi]; entry (c, j) of e_c (x) xi sits at 3c + j.
  SymbolMatrix s(a.n_out(), 3);
  for (int c = 0; c < 3; ++c)
    s.col(c) = a.entries().middleCols<3>(3 * c) * xi;
  return s;
}

std::pair<double, Vec3> smallest_singular(const SymbolMatrix& s) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double sigma = sv.size() < 3 ? 0.0 : sv(2);
  Vec3 v = svd.matrixV().col(2);
  return {sigma, v.normalized()};
}

std::vector<Vec3> fibonacci_sphere(int count) {
  std::vector<Vec3> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

namespace {

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 t1 = (helper - helper.dot(n) * n).normalized();
  Vec3 t2 = n.cross(t1);
  return {t1, t2};
}

double sigma_at(const MatrixRep& a, const Vec3& xi) {
  return smallest_singular(symbol(a, xi)).first;
}

}  // namespace

EllipticityReport ellipticity(const MatrixRep& a, const EllipticityOptions& opts) {
  if (opts.sphere_samples < 12) throw std::invalid_argument("ellipticity needs >= 12 sphere samples");
  if (!(opts.refine_tol > 0.0) || !(opts.elliptic_tol > 0.0))
    throw std::invalid_argument("ellipticity tolerances must be positive");

  const auto lattice = fibonacci_sphere(opts.sphere_samples);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(lattice.size());
  for (int i = 0; i < static_cast<int>(lattice.size()); ++i)
    scored.emplace_back(sigma_at(a, lattice[i]), i);
  const int seeds = std::min<int>(4, static_cast<int>(scored.size()));
  std::partial_sort(scored.begin(), scored.begin() + seeds, scored.end());

  double best = scored.front().first;
  Vec3 best_xi = lattice[scored.front().second];
  const double spacing = std::sqrt(4.0 * std::numbers::pi / opts.sphere_samples);

  for (int s = 0; s < seeds; ++s) {
    Vec3 xi = lattice[scored[s].second];
    double value = scored[s].first;
    double step = spacing;
    for (int iter = 0; iter < 100000 && step >= opts.refine_tol; ++iter) {
      auto [t1, t2] = tangent_basis(xi);
      double trial_best = value;
      Vec3 trial_xi = xi;
      for (const Vec3& dir : {t1, Vec3(-t1), t2, Vec3(-t2)}) {
        Vec3 cand = (xi + step * dir).normalized();
        double v = sigma_at(a, cand);
        if (v < trial_best) {
          trial_best = v;
          trial_xi = cand;
        }
      }
      if (trial_best < value) {
        value = trial_best;
        xi = trial_xi;
      } else {
        step *= 0.5;
      }
    }
    if (value < best) {
      best = value;
      best_xi = xi;
    }
  }

  EllipticityReport report;
  auto [sigma, v] = smallest_singular(symbol(a, best_xi));
  report.min_singular = std::max(0.0, sigma);
  report.argmin_xi = best_xi.normalized();
  report.near_kernel_v = v;
  report.tolerance = opts.elliptic_tol;
  report.is_elliptic = report.min_singular > opts.elliptic_tol;
  return report;
}

std::optional<std::pair<Vec3, Vec3>> kernel_direction(const MatrixRep& a,
                                                      const EllipticityOptions& opts) {
  const auto report = ellipticity(a, opts);
  if (report.min_singular > opts.elliptic_tol) return std::nullopt;
  return std::make_pair(report.argmin_xi, report.near_kernel_v);
}

}  // namespace kms

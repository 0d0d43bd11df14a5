#pragma once

#include "kms/counterexample.hpp"
#include "kms/extension.hpp"
#include "kms/harness.hpp"
#include "kms/operators.hpp"

#include <filesystem>
#include <string>

namespace kms {

/// printf("%.17g"), exact on read-back.
std::string format_double(double x);

/// Header `index,lhs,rhs_elliptic,rhs_curl,ratio,flag`, then the rows of
/// every grid in grid order.
std::string ratio_rows_csv(const RatioReport& r);
/// Parameters, seed, per-grid sup ratios and flag counts, stability
/// quotients and the kind-specific extras.
std::string ratio_summary_json(const RatioReport& r);

/// Header `k,grad_norm,op_norm,ratio`.
std::string counterexample_csv(const CounterexampleSequence& s);
std::string counterexample_json(const CounterexampleSequence& s);

std::string ellipticity_json(const MatrixRep& a, const EllipticityReport& r);
std::string extension_json(const ExtensionResult& r);

/// Writes bytes verbatim; throws std::runtime_error when the file cannot
/// be written.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kms

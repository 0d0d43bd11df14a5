#include "kms/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kms {

const char* to_string(FieldIoErrc code) {
  switch (code) {
    case FieldIoErrc::open_failed: return "open_failed";
    case FieldIoErrc::malformed_header: return "malformed_header";
    case FieldIoErrc::size_mismatch: return "size_mismatch";
    case FieldIoErrc::non_finite_payload: return "non_finite_payload";
  }
  return "unknown";
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char raw[8];
  std::memcpy(raw, &bits, 8);
  out.append(raw, 8);
}

double read_le(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

[[noreturn]] void header_error(const std::string& what) {
  throw FieldIoError(FieldIoErrc::malformed_header, what);
}

// Splits one header line into tokens, insisting on the leading keyword and
// the token count.
std::vector<std::string> header_tokens(const std::string& line, const std::string& keyword,
                                       std::size_t count) {
  std::istringstream ss(line);
  std::vector<std::string> tok;
  for (std::string t; ss >> t;) tok.push_back(t);
  if (tok.size() != count || tok.front() != keyword)
    header_error("expected '" + keyword + "' line, got '" + line + "'");
  return tok;
}

long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    header_error("not an integer: '" + s + "'");
  }
  if (pos != s.size()) header_error("not an integer: '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    header_error("not a number: '" + s + "'");
  }
  if (pos != s.size()) header_error("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string encode_field(const Field& f) {
  const auto& g = f.geometry();
  if (f.components() != 1 && f.components() != 3 && f.components() != 9)
    throw std::invalid_argument("KMSF stores 1, 3 or 9 components");
  if (!f.all_finite()) throw FieldIoError(FieldIoErrc::non_finite_payload, "refusing to write");
  std::string out = "KMSF1\n";
  out += "grid " + std::to_string(g.dims()[0]) + " " + std::to_string(g.dims()[1]) + " " +
         std::to_string(g.dims()[2]) + "\n";
  out += "domain";
  for (const auto& iv : g.box()) out += " " + format_double(iv.lo) + " " + format_double(iv.hi);
  out += "\n";
  out += "components " + std::to_string(f.components()) + " periodic " +
         (g.periodic() ? "1" : "0") + "\n";
  out += "data\n";
  out.reserve(out.size() + 8 * f.values().size());
  for (double v : f.values()) append_le(out, v);
  return out;
}

Field decode_field(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) header_error("truncated header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  if (next_line() != "KMSF1") header_error("missing KMSF1 magic");
  auto grid = header_tokens(next_line(), "grid", 4);
  auto domain = header_tokens(next_line(), "domain", 7);
  auto comps = header_tokens(next_line(), "components", 4);
  if (comps[2] != "periodic") header_error("expected 'periodic' flag");
  if (next_line() != "data") header_error("missing 'data' line");

  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const long n = parse_int(grid[a + 1]);
    if (n < 4 || n > (1 << 20)) header_error("grid size out of range");
    dims[a] = static_cast<int>(n);
  }
  std::array<Interval, 3> box{};
  for (int a = 0; a < 3; ++a) box[a] = {parse_double(domain[1 + 2 * a]), parse_double(domain[2 + 2 * a])};
  const long m = parse_int(comps[1]);
  if (m != 1 && m != 3 && m != 9) header_error("components must be 1, 3 or 9");
  const long periodic = parse_int(comps[3]);
  if (periodic != 0 && periodic != 1) header_error("periodic flag must be 0 or 1");

  GridGeometry geometry = [&] {
    try {
      return GridGeometry(dims, box, periodic == 1);
    } catch (const std::invalid_argument& e) {
      header_error(e.what());
    }
  }();
  const std::size_t count = static_cast<std::size_t>(m) * geometry.size();
  if (bytes.size() - pos != 8 * count)
    throw FieldIoError(FieldIoErrc::size_mismatch,
                       "expected " + std::to_string(8 * count) + " payload bytes, found " +
                           std::to_string(bytes.size() - pos));
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = read_le(bytes.data() + pos + 8 * i);
    if (!std::isfinite(values[i]))
      throw FieldIoError(FieldIoErrc::non_finite_payload,
                         "non-finite value at index " + std::to_string(i));
  }
  return Field(std::move(geometry), static_cast<int>(m), std::move(values));
}

void write_field(const Field& f, const std::filesystem::path& path) {
  const std::string bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FieldIoError(FieldIoErrc::open_failed, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FieldIoError(FieldIoErrc::open_failed, "write failed for " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldIoError(FieldIoErrc::open_failed, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_field(ss.str());
}

}  // namespace kms

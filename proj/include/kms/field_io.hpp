#pragma once

#include "kms/fields.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace kms {

enum class FieldIoErrc {
  open_failed = 1,
  malformed_header = 2,
  size_mismatch = 3,
  non_finite_payload = 4,
};

const char* to_string(FieldIoErrc code);

class FieldIoError : public std::runtime_error {
 public:
  FieldIoError(FieldIoErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  FieldIoErrc code() const { return code_; }

 private:
  FieldIoErrc code_;
};

/// KMSF1 layout: five ASCII header lines
///
///   KMSF1
///   grid nx ny nz
///   domain x0 x1 y0 y1 z0 z1        (17 significant digits)
///   components m periodic b         (m in {1,3,9}, b in {0,1})
///   data
///
/// followed by m*nx*ny*nz little-endian IEEE doubles, component-major and
/// z-fastest within each component.
void write_field(const Field& f, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

std::string encode_field(const Field& f);
Field decode_field(const std::string& bytes);

}  // namespace kms

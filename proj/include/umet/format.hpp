#pragma once
/// Shortest round-trip decimal formatting, shared by serializers and
/// parameter-string printers.

#include <charconv>
#include <string>
#include <system_error>

namespace umet {

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace umet

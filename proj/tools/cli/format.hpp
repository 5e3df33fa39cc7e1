#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace gearshift::cli {

/// Shortest decimal that round-trips; locale independent.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void append(std::string& out, double x) {
  char buf[32];
  if (!std::isfinite(x)) {
    out += fmt(x);
    return;
  }
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

}  // namespace gearshift::cli

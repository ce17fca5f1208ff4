#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rl {

// Shortest decimal form that round-trips to the same double. Keeps CSV and
// checkpoint-adjacent text output byte-stable across runs.
inline std::string format_double(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("format_double: non-finite value");
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) {
    throw std::logic_error("format_double: to_chars failed");
  }
  return std::string(buf, ptr);
}

}  // namespace rl

#pragma once

// Deterministic number formatting shared by every CSV/JSON writer: %.17g
// round-trips doubles exactly and produces identical bytes across runs.

#include <cstdio>
#include <string>

namespace nlsb {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace nlsb

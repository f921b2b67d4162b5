#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace rdlab {

// Shortest-round-trip formatting keeps report bodies reproducible across runs.
inline std::string csv_num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lg", &back);
  if (back == x) {
    // try shorter representations first
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
      std::sscanf(shorter, "%lg", &back);
      if (back == x) return shorter;
    }
  }
  return buf;
}

inline std::string csv_num(std::uint64_t x) { return std::to_string(x); }
inline std::string csv_num(int x) { return std::to_string(x); }

}  // namespace rdlab

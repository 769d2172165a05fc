#pragma once

#include <cstdio>
#include <string>

namespace distort {

// 12 significant digits, plain '.' decimal separator, no locale surprises.
// Used for every number the library prints, so identical inputs always
// serialize to identical bytes.
inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

}  // namespace distort

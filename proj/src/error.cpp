#include "qss/error.hpp"

#include <cstdio>

namespace qss {

std::string format_number(double value) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    double parsed = 0.0;
    if (std::sscanf(buf, "%lf", &parsed) == 1 && parsed == value) break;
  }
  return buf;
}

void require_probability(const std::string& field, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(field, "must be a probability in [0, 1] (got " + format_number(p) + ")");
  }
}

}  // namespace qss

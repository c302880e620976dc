#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qss {

// Invalid experiment configuration. `field()` names the offending setting
// using the same key as the JSON config format.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Shortest round-trip decimal form, for diagnostics.
std::string format_number(double value);

void require_probability(const std::string& field, double p);

}  // namespace qss

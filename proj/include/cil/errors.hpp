#pragma once

#include <stdexcept>
#include <string>

namespace cil {

// Invalid shapes, out-of-range parameters, or method/input bindings that the
// caller asked for. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite values, failed solves, iteration caps. Exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace cil

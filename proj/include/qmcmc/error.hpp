#pragma once

#include <stdexcept>
#include <string>

namespace qmcmc {

/// Invalid input, configuration, or a violated precondition.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation finished but its result failed a numerical sanity check.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace qmcmc

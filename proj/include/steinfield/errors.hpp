#pragma once

#include <stdexcept>
#include <string>

namespace steinfield {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError    -> exit 2 (invalid configuration / bad arguments)
//   RegimeError    -> exit 3 (a bound's validity condition is violated)
//   NumericalError -> exit 4 (factorization/convergence failures)

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steinfield

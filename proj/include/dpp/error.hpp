#pragma once

#include <stdexcept>
#include <string>

namespace dpp {

// Invalid user input: malformed configs, out-of-range parameters, bad files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not deliver its contract (non-convergence,
// degenerate projection, placement failure).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpp

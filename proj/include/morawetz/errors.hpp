#pragma once

#include <stdexcept>

namespace morawetz {

// Invalid configuration or arguments (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values during evolution (CLI exit code 1).
struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace morawetz

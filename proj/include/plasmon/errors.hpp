#pragma once

#include <stdexcept>
#include <string>

namespace plasmon {

/// A discretization or solve that ran but produced an unusable result
/// (indefinite Gram matrix, residual above tolerance, non-finite output).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid problem or run configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace plasmon

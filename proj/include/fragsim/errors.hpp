#pragma once

#include <stdexcept>
#include <string>

namespace fragsim {

/// Invalid parameters, malformed configs, grids that cannot resolve the kernel.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Runtime numerical failures: CFL violations, negative mass, non-convergence.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Quadrature failed to reach the requested tolerance; carries the partial estimate.
class QuadratureError : public NumericError {
public:
  QuadratureError(const std::string& what, double partial_estimate, double error_estimate)
      : NumericError(what), partial(partial_estimate), error(error_estimate) {}
  double partial;
  double error;
};

}  // namespace fragsim

#pragma once

#include <stdexcept>
#include <string>

namespace kerrcmm {

// Problem with a config file or an inconsistent parameter set supplied by the
// user. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solver or integrator failed to deliver its contract (residual too large,
// no convergence, ambiguous branch). Maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kerrcmm

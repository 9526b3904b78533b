#pragma once
// errors.hpp -- exception types shared across the library.

#include <stdexcept>
#include <string>

namespace rsl {

// Bad arguments: wrong sizes, non-finite numbers, malformed input files.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition does not hold (e.g. an operation that requires
// an infinitesimally minimally rigid framework was handed something else).
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// An iterative numerical routine failed to converge.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulated trajectory left the sane region (position magnitude above the
// divergence guard).  Carries the simulation time at which it happened.
struct DivergenceError : std::runtime_error {
  double time;
  DivergenceError(const std::string& msg, double t)
      : std::runtime_error(msg), time(t) {}
};

}  // namespace rsl

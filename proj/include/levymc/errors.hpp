#pragma once

#include <stdexcept>
#include <string>

namespace levymc {

// Error taxonomy shared across the library. Everything derives from
// std::runtime_error so callers can catch coarsely or by exact type.

struct NonSymmetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndefiniteMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyTailError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedMeasureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSmallJumpsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotConstantCoefficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State blew up to inf/nan during a scheme step; carries the grid time.
struct NonFiniteStateError : std::runtime_error {
  double time;
  NonFiniteStateError(const std::string& what, double t)
      : std::runtime_error(what), time(t) {}
};

// Scheduled build asked for a budget too small to produce a valid plan.
struct TauTooSmallError : std::runtime_error {
  double min_tau;
  TauTooSmallError(const std::string& what, double admissible)
      : std::runtime_error(what), min_tau(admissible) {}
};

}  // namespace levymc

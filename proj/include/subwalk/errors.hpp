#pragma once

#include <stdexcept>
#include <string>

namespace subwalk {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested tables or matrices exceed a configured memory or size cap.
struct SizingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature did not converge, a factorization failed, or a bound target was missed.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Computation refused because the walk is not transient for the given dimension.
struct TransienceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace subwalk

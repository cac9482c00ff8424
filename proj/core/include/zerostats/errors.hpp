#pragma once

#include <stdexcept>
#include <string>

namespace zerostats {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All coefficients zero, or a polynomial with no usable leading term.
struct DegenerateInput : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of the map.
struct DomainError : Error {
  using Error::Error;
};

// Evaluation at a pole of the limiting density / correlation.
struct SingularPoint : Error {
  using Error::Error;
};

// Repeated evaluation points, or n too small for the requested block size.
struct DegenerateConfig : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct MethodMismatch : Error {
  using Error::Error;
};

struct InsufficientStatistics : Error {
  using Error::Error;
};

}  // namespace zerostats

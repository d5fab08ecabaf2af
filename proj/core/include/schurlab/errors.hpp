#pragma once

#include <stdexcept>
#include <string>

namespace schurlab {

// Bad input: mismatched groups, malformed elements, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured size cap was hit (ball enumeration, Gram matrix size, ...).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Monte-Carlo estimate was aborted by a sampling guard.
class StatisticalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace schurlab

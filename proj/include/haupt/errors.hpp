#pragma once

#include <stdexcept>
#include <string>

namespace haupt {

// Bad parameters or malformed input (CLI exit status 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested coefficient lies beyond the known range of a truncated series
// (CLI exit status 3).
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An identity, bound, or agreement check failed (CLI exit status 1).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace haupt

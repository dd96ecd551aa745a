#pragma once

#include <stdexcept>
#include <string>

namespace carrychain {

// Base class for all library errors. The CLI maps subclasses to exit codes,
// so every throw site below uses the most specific class that applies.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scalar argument outside its documented domain (width, position, count).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Operands whose widths (or counts) do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Multiplier constant that the pipeline does not model (even, < 3, zero).
class UnsupportedConstantError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid reduction plan (bad operand refs, reuse, wrong count).
class PlanError : public Error {
 public:
  using Error::Error;
};

// Request whose exhaustive or memory cost exceeds the supported envelope.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Analytic formula evaluated where it is undefined.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace carrychain

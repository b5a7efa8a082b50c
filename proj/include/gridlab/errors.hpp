#pragma once

#include <stdexcept>
#include <string>

namespace gridlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch or empty domain.
struct DimensionError : Error {
  using Error::Error;
};

// Value outside an operation's domain (negative entry, p <= 1, ...).
struct DomainError : Error {
  using Error::Error;
};

// Configured budget exceeded (cells, exponent bits, enumeration size).
struct ResourceError : Error {
  using Error::Error;
};

// Input collapsed to nothing (all rows pruned, zero mass on a cube, ...).
struct DegenerateError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& what_)
      : Error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

}  // namespace gridlab

#pragma once

#include <stdexcept>
#include <string>

namespace roax {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input text does not match the expression grammar. `position` is a 0-based
/// character offset into the offending string.
struct SyntaxError : Error {
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

/// A variable name that is not part of the declared variable context.
struct UnknownVariable : Error {
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name(name) {}
  std::string name;
};

/// Two operands carry different variable contexts.
struct ContextMismatch : Error {
  using Error::Error;
};

/// A container or argument has the wrong length for the operation.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A moment vector is truncated below the degree the operation needs.
struct DegreeTooLow : Error {
  using Error::Error;
};

/// A variable bound with zero or negative width.
struct DegenerateBox : Error {
  using Error::Error;
};

/// Requested relaxation order below the minimum the problem data admit.
struct OrderTooLow : Error {
  using Error::Error;
};

/// An operation that requires an Optimal solver status got something else.
struct NotOptimal : Error {
  using Error::Error;
};

/// Problem exceeds the configured in-process solve limits; export instead.
struct LimitExceeded : Error {
  using Error::Error;
};

/// File-system level failure (missing file, unwritable path).
struct IoError : Error {
  using Error::Error;
};

/// Structured input (problem file, SDPA file) that does not parse.
struct ParseError : Error {
  using Error::Error;
};

/// Problem description rejected by validation.
struct InvalidSpec : Error {
  using Error::Error;
};

/// A membership oracle queried outside its domain of definition.
struct OracleUndefined : Error {
  using Error::Error;
};

}  // namespace roax

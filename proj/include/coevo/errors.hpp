#ifndef COEVO_ERRORS_HPP
#define COEVO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coevo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contract source errors carry a 1-based position.
struct SyntaxError : Error {
  SyntaxError(const std::string& msg, int line, int col);
  int line;
  int col;
};

struct TypeError : Error {
  TypeError(const std::string& msg, int line, int col);
  int line;
  int col;
};

// A regex literal contains a character outside the 94-symbol alphabet.
struct AlphabetError : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

struct MissingBindingError : EvalError {
  explicit MissingBindingError(const std::string& var);
};

struct DivisionByZeroError : EvalError {
  DivisionByZeroError();
};

struct ArityMismatchError : Error {
  using Error::Error;
};

struct EmptyLanguageError : Error {
  using Error::Error;
};

// Oracle enumeration exceeded its configured budget.
struct BoundsError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct DanglingTargetError : SchemaError {
  using SchemaError::SchemaError;
};

struct UnsatContractError : Error {
  using Error::Error;
};

struct LabelMismatchError : Error {
  using Error::Error;
};

struct EmptyTraceError : Error {
  using Error::Error;
};

// Malformed action scripts (replay input).
struct ScriptError : Error {
  using Error::Error;
};

}  // namespace coevo

#endif

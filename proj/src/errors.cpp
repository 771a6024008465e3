#include "coevo/errors.hpp"

namespace coevo {

SyntaxError::SyntaxError(const std::string& msg, int line, int col)
    : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
      line(line),
      col(col) {}

TypeError::TypeError(const std::string& msg, int line, int col)
    : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
      line(line),
      col(col) {}

MissingBindingError::MissingBindingError(const std::string& var)
    : EvalError("no binding for variable '" + var + "'") {}

DivisionByZeroError::DivisionByZeroError() : EvalError("division by zero") {}

}  // namespace coevo

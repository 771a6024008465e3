#include "coevo/value.hpp"

#include "coevo/errors.hpp"

namespace coevo {

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::boolean:
      return "boolean";
    case ValueType::integer:
      return "integer";
    case ValueType::string:
      return "string";
  }
  return "?";
}

Value default_value(ValueType t) {
  switch (t) {
    case ValueType::boolean:
      return false;
    case ValueType::integer:
      return std::int64_t{0};
    case ValueType::string:
      return std::string{};
  }
  throw Error("unreachable value type");
}

std::string to_display(const Value& v) {
  switch (value_type(v)) {
    case ValueType::boolean:
      return std::get<bool>(v) ? "true" : "false";
    case ValueType::integer:
      return std::to_string(std::get<std::int64_t>(v));
    case ValueType::string: {
      std::string out = "\"";
      for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
      return out;
    }
  }
  return "?";
}

std::string to_display(const ParamVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_display(v[i]);
  }
  out.push_back(')');
  return out;
}

}  // namespace coevo

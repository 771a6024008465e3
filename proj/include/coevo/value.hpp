#ifndef COEVO_VALUE_HPP
#define COEVO_VALUE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace coevo {

// The event alphabet: the 94 printable ASCII characters '!'..'~'.
inline constexpr int kAlphabetSize = 94;
inline constexpr char kAlphabetFirst = '!';
inline constexpr char kAlphabetLast = '~';

inline bool in_alphabet(char c) { return c >= kAlphabetFirst && c <= kAlphabetLast; }
inline int symbol_index(char c) { return in_alphabet(c) ? c - kAlphabetFirst : -1; }
inline char symbol_at(int i) { return static_cast<char>(kAlphabetFirst + i); }

enum class ValueType { boolean, integer, string };

const char* type_name(ValueType t);

using Value = std::variant<bool, std::int64_t, std::string>;

inline ValueType value_type(const Value& v) { return static_cast<ValueType>(v.index()); }

Value default_value(ValueType t);

// Display form used in traces and error messages: strings quoted, others bare.
std::string to_display(const Value& v);

// Variable bindings for contract evaluation.
using Env = std::map<std::string, Value>;

// Typed value tuple ordered like the owning contract's free variables.
using ParamVector = std::vector<Value>;

std::string to_display(const ParamVector& v);

}  // namespace coevo

#endif

#ifndef COEVO_CONTRACT_HPP
#define COEVO_CONTRACT_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coevo/regex.hpp"
#include "coevo/value.hpp"

namespace coevo {

struct ArithExpr;
using ArithPtr = std::shared_ptr<const ArithExpr>;

struct ArithExpr {
  enum class Kind { number, variable, add, sub, mul, div, length };

  Kind kind;
  std::int64_t value = 0;  // number
  std::string var;         // variable, length argument
  ArithPtr left, right;
  int line = 0, col = 0;

  static ArithPtr num(std::int64_t n);
  static ArithPtr var_ref(std::string name);
  static ArithPtr add(ArithPtr a, ArithPtr b);
  static ArithPtr sub(ArithPtr a, ArithPtr b);
  static ArithPtr mul(ArithPtr a, ArithPtr b);
  static ArithPtr div(ArithPtr a, ArithPtr b);
  static ArithPtr len(std::string name);
};

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

// Predicate node. ge/le/ne comparisons are sugar; desugar() rewrites them to
// the >, <, = core (>= as > or =, <= as < or =, != as not =).
struct Pred {
  enum class Kind { bool_const, bool_var, negation, conjunction, disjunction, comparison, membership };
  enum class CmpOp { lt, gt, eq, ne, le, ge };

  Kind kind;
  bool value = false;              // bool_const
  std::string var;                 // bool_var, membership subject
  CmpOp op = CmpOp::eq;            // comparison
  ArithPtr lhs, rhs;               // comparison
  PredPtr left, right;             // negation child in left; conj/disj children
  RegexPtr regex;                  // membership pattern
  std::shared_ptr<const Dfa> dfa;  // membership pattern, compiled
  int line = 0, col = 0;

  static PredPtr constant(bool b);
  static PredPtr var_ref(std::string name);
  static PredPtr negate(PredPtr a);
  static PredPtr conj(PredPtr a, PredPtr b);
  static PredPtr disj(PredPtr a, PredPtr b);
  static PredPtr cmp(CmpOp op, ArithPtr a, ArithPtr b);
  static PredPtr membership(std::string name, RegexPtr r);  // compiles the pattern
};

// Typed contract: a predicate plus its free variables in first-occurrence
// order. That order fixes ParamVector component indexing everywhere.
struct Contract {
  PredPtr root;
  std::vector<std::pair<std::string, ValueType>> vars;
};

// Named string constants a regex may reference; unresolved references are a
// type error.
using RegexDefs = std::map<std::string, std::string>;

Contract parse_contract(std::string_view text, const RegexDefs* defs = nullptr);

// Parses a bare regular expression in the contract surface syntax.
RegexPtr parse_regex_source(std::string_view text, const RegexDefs* defs = nullptr);

// Type-checks a programmatically built predicate and collects free variables.
Contract make_contract(PredPtr root);

const std::vector<std::pair<std::string, ValueType>>& free_vars(const Contract& c);

bool evaluate(const Contract& c, const Env& env);

std::int64_t evaluate_arith(const ArithPtr& e, const Env& env);

// Parseable concrete syntax; parse(to_string(c)) is structurally equal to c.
std::string to_string(const Contract& c);

Contract desugar(const Contract& c);

bool structurally_equal(const Contract& a, const Contract& b);

// Binds a value tuple to the contract's free variables; checks arity/types.
Env bind_params(const Contract& c, const ParamVector& v);

// Checks a tuple against the contract's variable types without binding.
bool params_match(const Contract& c, const ParamVector& v);

}  // namespace coevo

#endif

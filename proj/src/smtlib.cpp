#include "coevo/smtlib.hpp"

#include <cctype>

#include "coevo/errors.hpp"

namespace coevo {

namespace {

std::string smt_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out.push_back(c);
    if (c == '"') out.push_back('"');  // doubled quote escape
  }
  out.push_back('"');
  return out;
}

std::string smt_int(std::int64_t n) {
  if (n < 0) return "(- " + std::to_string(-n) + ")";
  return std::to_string(n);
}

std::string char_re(char c, bool ci) {
  if (ci && std::isalpha(static_cast<unsigned char>(c))) {
    char lo = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return "(re.union (str.to.re " + smt_string(std::string(1, lo)) + ") (str.to.re " +
           smt_string(std::string(1, up)) + "))";
  }
  return "(str.to.re " + smt_string(std::string(1, c)) + ")";
}

std::string regex_term(const RegexPtr& r);

std::string fold_seq(const std::vector<std::string>& parts) {
  if (parts.empty()) return "(str.to.re \"\")";
  std::string out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    out = "(re.++ " + parts[i] + " " + out + ")";
  }
  return out;
}

void flatten(const RegexPtr& r, Regex::Kind kind, std::vector<std::string>& parts) {
  if (r->kind == kind) {
    flatten(r->left, kind, parts);
    flatten(r->right, kind, parts);
  } else {
    parts.push_back(regex_term(r));
  }
}

std::string regex_term(const RegexPtr& r) {
  using K = Regex::Kind;
  switch (r->kind) {
    case K::literal:
      return "(str.to.re " + smt_string(r->text) + ")";
    case K::ci_literal: {
      if (r->text.empty()) return "(str.to.re \"\")";
      std::vector<std::string> parts;
      for (char c : r->text) parts.push_back(char_re(c, true));
      return fold_seq(parts);
    }
    case K::char_class: {
      std::vector<std::string> parts;
      for (auto [lo, hi] : r->ranges) {
        if (lo == hi) {
          parts.push_back("(str.to.re " + smt_string(std::string(1, lo)) + ")");
        } else {
          parts.push_back("(re.range " + smt_string(std::string(1, lo)) + " " +
                          smt_string(std::string(1, hi)) + ")");
        }
      }
      std::string out = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) {
        out = "(re.union " + parts[i] + " " + out + ")";
      }
      return out;
    }
    case K::any_char:
      return "(re.range \" \" \"~\")";
    case K::sequence: {
      std::vector<std::string> parts;
      flatten(r, K::sequence, parts);
      return fold_seq(parts);
    }
    case K::choice: {
      std::vector<std::string> parts;
      flatten(r, K::choice, parts);
      std::string out = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) {
        out = "(re.union " + parts[i] + " " + out + ")";
      }
      return out;
    }
    case K::star:
      return "(re.* " + regex_term(r->left) + ")";
    case K::repeat: {
      if (r->count == 0) return "(str.to.re \"\")";
      std::vector<std::string> parts(static_cast<std::size_t>(r->count), regex_term(r->left));
      return fold_seq(parts);
    }
  }
  throw Error("unreachable regex kind");
}

std::string arith_term(const ArithPtr& e) {
  using K = ArithExpr::Kind;
  switch (e->kind) {
    case K::number:
      return smt_int(e->value);
    case K::variable:
      return e->var;
    case K::length:
      return "(str.len " + e->var + ")";
    case K::add:
      return "(+ " + arith_term(e->left) + " " + arith_term(e->right) + ")";
    case K::sub:
      return "(- " + arith_term(e->left) + " " + arith_term(e->right) + ")";
    case K::mul:
      return "(* " + arith_term(e->left) + " " + arith_term(e->right) + ")";
    case K::div:
      return "(div " + arith_term(e->left) + " " + arith_term(e->right) + ")";
  }
  throw Error("unreachable arith kind");
}

std::string pred_term(const Pred& p);

void flatten_pred(const Pred& p, Pred::Kind kind, std::vector<std::string>& parts) {
  if (p.kind == kind) {
    flatten_pred(*p.left, kind, parts);
    flatten_pred(*p.right, kind, parts);
  } else {
    parts.push_back(pred_term(p));
  }
}

std::string pred_term(const Pred& p) {
  using K = Pred::Kind;
  switch (p.kind) {
    case K::bool_const:
      return p.value ? "true" : "false";
    case K::bool_var:
      return p.var;
    case K::negation:
      return "(not " + pred_term(*p.left) + ")";
    case K::conjunction:
    case K::disjunction: {
      std::vector<std::string> parts;
      flatten_pred(p, p.kind, parts);
      std::string out = p.kind == K::conjunction ? "(and" : "(or";
      for (const auto& part : parts) out += " " + part;
      out += ")";
      return out;
    }
    case K::comparison: {
      std::string a = arith_term(p.lhs), b = arith_term(p.rhs);
      switch (p.op) {
        case Pred::CmpOp::lt: return "(< " + a + " " + b + ")";
        case Pred::CmpOp::gt: return "(> " + a + " " + b + ")";
        case Pred::CmpOp::eq: return "(= " + a + " " + b + ")";
        case Pred::CmpOp::le: return "(<= " + a + " " + b + ")";
        case Pred::CmpOp::ge: return "(>= " + a + " " + b + ")";
        case Pred::CmpOp::ne: return "(not (= " + a + " " + b + "))";
      }
      throw Error("unreachable cmp op");
    }
    case K::membership:
      return "(str.in.re " + p.var + " " + regex_term(p.regex) + ")";
  }
  throw Error("unreachable pred kind");
}

const char* sort_name(ValueType t) {
  switch (t) {
    case ValueType::boolean:
      return "Bool";
    case ValueType::integer:
      return "Int";
    case ValueType::string:
      return "String";
  }
  return "?";
}

std::string value_term(const Value& v) {
  switch (value_type(v)) {
    case ValueType::boolean:
      return std::get<bool>(v) ? "true" : "false";
    case ValueType::integer:
      return smt_int(std::get<std::int64_t>(v));
    case ValueType::string:
      return smt_string(std::get<std::string>(v));
  }
  throw Error("unreachable value type");
}

// Top-level conjuncts in source order; constant-true conjuncts are dropped.
void collect_conjuncts(const PredPtr& p, std::vector<PredPtr>& out) {
  if (p->kind == Pred::Kind::conjunction) {
    collect_conjuncts(p->left, out);
    collect_conjuncts(p->right, out);
    return;
  }
  if (p->kind == Pred::Kind::bool_const && p->value) return;
  out.push_back(p);
}

}  // namespace

std::string export_smtlib(const Contract& c, const std::vector<ParamVector>& excluded) {
  std::string out;
  for (const auto& [name, type] : c.vars) {
    out += "(declare-const " + name + " " + sort_name(type) + ")\n";
  }
  std::vector<PredPtr> conjuncts;
  collect_conjuncts(c.root, conjuncts);
  for (const auto& conj : conjuncts) {
    out += "(assert " + pred_term(*conj) + ")\n";
  }
  for (const auto& model : excluded) {
    if (model.size() != c.vars.size()) {
      throw ArityMismatchError("excluded model arity does not match the contract");
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
      out += "(assert (not (= " + c.vars[i].first + " " + value_term(model[i]) + ")))\n";
    }
  }
  return out;
}

}  // namespace coevo

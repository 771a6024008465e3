#include "coevo/contract.hpp"

#include <cassert>
#include <optional>

#include "coevo/errors.hpp"

namespace coevo {

// ---------------------------------------------------------------------------
// AST factories

namespace {

ArithPtr make_arith(ArithExpr e) { return std::make_shared<const ArithExpr>(std::move(e)); }
PredPtr make_pred(Pred p) { return std::make_shared<const Pred>(std::move(p)); }

}  // namespace

ArithPtr ArithExpr::num(std::int64_t n) {
  ArithExpr e;
  e.kind = Kind::number;
  e.value = n;
  return make_arith(std::move(e));
}

ArithPtr ArithExpr::var_ref(std::string name) {
  ArithExpr e;
  e.kind = Kind::variable;
  e.var = std::move(name);
  return make_arith(std::move(e));
}

#define COEVO_ARITH_BINOP(fn, k)                       \
  ArithPtr ArithExpr::fn(ArithPtr a, ArithPtr b) {     \
    ArithExpr e;                                       \
    e.kind = Kind::k;                                  \
    e.left = std::move(a);                             \
    e.right = std::move(b);                            \
    return make_arith(std::move(e));                   \
  }

COEVO_ARITH_BINOP(add, add)
COEVO_ARITH_BINOP(sub, sub)
COEVO_ARITH_BINOP(mul, mul)
COEVO_ARITH_BINOP(div, div)
#undef COEVO_ARITH_BINOP

ArithPtr ArithExpr::len(std::string name) {
  ArithExpr e;
  e.kind = Kind::length;
  e.var = std::move(name);
  return make_arith(std::move(e));
}

PredPtr Pred::constant(bool b) {
  Pred p;
  p.kind = Kind::bool_const;
  p.value = b;
  return make_pred(std::move(p));
}

PredPtr Pred::var_ref(std::string name) {
  Pred p;
  p.kind = Kind::bool_var;
  p.var = std::move(name);
  return make_pred(std::move(p));
}

PredPtr Pred::negate(PredPtr a) {
  Pred p;
  p.kind = Kind::negation;
  p.left = std::move(a);
  return make_pred(std::move(p));
}

PredPtr Pred::conj(PredPtr a, PredPtr b) {
  Pred p;
  p.kind = Kind::conjunction;
  p.left = std::move(a);
  p.right = std::move(b);
  return make_pred(std::move(p));
}

PredPtr Pred::disj(PredPtr a, PredPtr b) {
  Pred p;
  p.kind = Kind::disjunction;
  p.left = std::move(a);
  p.right = std::move(b);
  return make_pred(std::move(p));
}

PredPtr Pred::cmp(CmpOp op, ArithPtr a, ArithPtr b) {
  Pred p;
  p.kind = Kind::comparison;
  p.op = op;
  p.lhs = std::move(a);
  p.rhs = std::move(b);
  return make_pred(std::move(p));
}

PredPtr Pred::membership(std::string name, RegexPtr r) {
  Pred p;
  p.kind = Kind::membership;
  p.var = std::move(name);
  p.dfa = std::make_shared<const Dfa>(compile_regex(r));
  p.regex = std::move(r);
  return make_pred(std::move(p));
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

enum class Tok {
  ident,
  number,
  string,  // carries ci flag
  char_class,
  lparen,
  rparen,
  plus,
  minus,
  star,
  slash,
  dot,
  pipe,
  caret,
  lt,
  le,
  gt,
  ge,
  eq,
  ne,
  kw_and,
  kw_or,
  kw_not,
  kw_in,
  kw_len,
  kw_any,
  kw_true,
  kw_false,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  std::vector<std::pair<char, char>> ranges;
  bool ci = false;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      bool done = t.kind == Tok::end;
      out.push_back(std::move(t));
      if (done) return out;
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) advance();
  }

  bool match_seq(std::string_view s) {
    if (src_.substr(pos_, s.size()) != s) return false;
    for (std::size_t i = 0; i < s.size(); ++i) advance();
    return true;
  }

  Token tok(Tok kind) const {
    Token t;
    t.kind = kind;
    t.line = line_;
    t.col = col_;
    return t;
  }

  Token next() {
    if (eof()) return tok(Tok::end);
    Token t = tok(Tok::end);  // captures position before consuming

    // UTF-8 aliases for the abstract operators.
    if (match_seq("∧")) { t.kind = Tok::kw_and; return t; }   // and
    if (match_seq("∨")) { t.kind = Tok::kw_or; return t; }    // or
    if (match_seq("¬")) { t.kind = Tok::kw_not; return t; }   // not
    if (match_seq("∈")) { t.kind = Tok::kw_in; return t; }    // in
    if (match_seq("Σ")) { t.kind = Tok::kw_any; return t; }   // any symbol
    if (match_seq("≥")) { t.kind = Tok::ge; return t; }
    if (match_seq("≤")) { t.kind = Tok::le; return t; }
    if (match_seq("≠")) { t.kind = Tok::ne; return t; }
    if (match_seq("·")) { t.kind = Tok::star; return t; }     // middle dot: multiplication

    char c = peek();
    if (is_ident_start(c)) {
      std::string word;
      while (!eof() && is_ident_char(peek())) word.push_back(advance());
      if (word == "and") t.kind = Tok::kw_and;
      else if (word == "or") t.kind = Tok::kw_or;
      else if (word == "not") t.kind = Tok::kw_not;
      else if (word == "in") t.kind = Tok::kw_in;
      else if (word == "len") t.kind = Tok::kw_len;
      else if (word == "any") t.kind = Tok::kw_any;
      else if (word == "true") t.kind = Tok::kw_true;
      else if (word == "false") t.kind = Tok::kw_false;
      else {
        t.kind = Tok::ident;
        t.text = std::move(word);
      }
      return t;
    }
    if (c >= '0' && c <= '9') {
      std::string digits;
      while (!eof() && peek() >= '0' && peek() <= '9') digits.push_back(advance());
      t.kind = Tok::number;
      try {
        t.number = std::stoll(digits);
      } catch (const std::out_of_range&) {
        fail("integer literal out of range");
      }
      return t;
    }
    switch (c) {
      case '"':
        return lex_string(t);
      case '[':
        return lex_class(t);
      case '(': advance(); t.kind = Tok::lparen; return t;
      case ')': advance(); t.kind = Tok::rparen; return t;
      case '+': advance(); t.kind = Tok::plus; return t;
      case '-': advance(); t.kind = Tok::minus; return t;
      case '*': advance(); t.kind = Tok::star; return t;
      case '/': advance(); t.kind = Tok::slash; return t;
      case '.': advance(); t.kind = Tok::dot; return t;
      case '|': advance(); t.kind = Tok::pipe; return t;
      case '^': advance(); t.kind = Tok::caret; return t;
      case '=': advance(); t.kind = Tok::eq; return t;
      case '<':
        advance();
        if (!eof() && peek() == '=') { advance(); t.kind = Tok::le; } else t.kind = Tok::lt;
        return t;
      case '>':
        advance();
        if (!eof() && peek() == '=') { advance(); t.kind = Tok::ge; } else t.kind = Tok::gt;
        return t;
      case '!':
        advance();
        if (!eof() && peek() == '=') { advance(); t.kind = Tok::ne; return t; }
        fail("unexpected '!'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  Token lex_string(Token t) {
    advance();  // opening quote
    std::string s;
    for (;;) {
      if (eof()) fail("unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        char e = advance();
        if (e != '"' && e != '\\') fail("unknown escape sequence");
        s.push_back(e);
        continue;
      }
      s.push_back(c);
    }
    t.kind = Tok::string;
    t.text = std::move(s);
    if (!eof() && peek() == 'i') {
      advance();
      t.ci = true;
    }
    return t;
  }

  Token lex_class(Token t) {
    advance();  // '['
    std::vector<std::pair<char, char>> ranges;
    for (;;) {
      if (eof()) fail("unterminated character class");
      char c = advance();
      if (c == ']') break;
      if (!eof() && peek() == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] != ']') {
        advance();  // '-'
        char hi = advance();
        if (c > hi) fail("character class range is reversed");
        ranges.emplace_back(c, hi);
      } else {
        ranges.emplace_back(c, c);
      }
    }
    if (ranges.empty()) fail("empty character class");
    t.kind = Tok::char_class;
    t.ranges = std::move(ranges);
    return t;
  }
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, const RegexDefs* defs) : toks_(std::move(tokens)), defs_(defs) {}

  PredPtr run() {
    PredPtr p = parse_disj();
    expect(Tok::end, "unexpected trailing input");
    return p;
  }

  RegexPtr run_regex() {
    RegexPtr r = parse_regex();
    expect(Tok::end, "unexpected trailing input");
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const RegexDefs* defs_;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = i_ + ahead;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  const Token& get() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool at(Tok k) const { return peek().kind == k; }

  bool eat(Tok k) {
    if (!at(k)) return false;
    get();
    return true;
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(what);
    return get();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().col);
  }

  template <typename T>
  T positioned(T node, const Token& t) {
    auto copy = std::make_shared<std::remove_const_t<typename T::element_type>>(*node);
    copy->line = t.line;
    copy->col = t.col;
    return copy;
  }

  PredPtr parse_disj() {
    PredPtr p = parse_conj();
    while (at(Tok::kw_or)) {
      const Token& t = get();
      p = positioned(Pred::disj(p, parse_conj()), t);
    }
    return p;
  }

  PredPtr parse_conj() {
    PredPtr p = parse_neg();
    while (at(Tok::kw_and)) {
      const Token& t = get();
      p = positioned(Pred::conj(p, parse_neg()), t);
    }
    return p;
  }

  PredPtr parse_neg() {
    if (at(Tok::kw_not)) {
      const Token& t = get();
      return positioned(Pred::negate(parse_neg()), t);
    }
    return parse_primary();
  }

  static bool is_cmp(Tok k) {
    return k == Tok::lt || k == Tok::le || k == Tok::gt || k == Tok::ge || k == Tok::eq || k == Tok::ne;
  }
  static bool is_arith_op(Tok k) {
    return k == Tok::plus || k == Tok::minus || k == Tok::star || k == Tok::slash;
  }

  PredPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kw_true:
        get();
        return positioned(Pred::constant(true), t);
      case Tok::kw_false:
        get();
        return positioned(Pred::constant(false), t);
      case Tok::ident: {
        Tok after = peek(1).kind;
        if (after == Tok::kw_in) {
          std::string name = get().text;
          get();  // in
          return positioned(Pred::membership(std::move(name), parse_regex()), t);
        }
        if (after == Tok::eq && peek(2).kind == Tok::string) {
          // x = "s" abbreviates x in "s"
          std::string name = get().text;
          get();  // =
          const Token& lit = get();
          RegexPtr r = lit.ci ? Regex::ci_lit(lit.text) : Regex::lit(lit.text);
          return positioned(Pred::membership(std::move(name), std::move(r)), t);
        }
        if (is_cmp(after) || is_arith_op(after)) return parse_comparison();
        get();
        return positioned(Pred::var_ref(t.text), t);
      }
      case Tok::number:
      case Tok::minus:
      case Tok::kw_len:
        return parse_comparison();
      case Tok::lparen: {
        // Either a parenthesized predicate or an arithmetic group starting a
        // comparison; backtrack if the comparison reading fails.
        std::size_t save = i_;
        std::optional<SyntaxError> cmp_err;
        try {
          return parse_comparison();
        } catch (const SyntaxError& e) {
          cmp_err = e;
          i_ = save;
        }
        try {
          get();  // '('
          PredPtr p = parse_disj();
          expect(Tok::rparen, "expected ')'");
          return p;
        } catch (const SyntaxError& e) {
          if (cmp_err && (cmp_err->line > e.line || (cmp_err->line == e.line && cmp_err->col > e.col))) {
            throw *cmp_err;
          }
          throw;
        }
      }
      default:
        fail("expected predicate");
    }
  }

  PredPtr parse_comparison() {
    const Token& t = peek();
    ArithPtr lhs = parse_arith();
    Pred::CmpOp op;
    switch (peek().kind) {
      case Tok::lt: op = Pred::CmpOp::lt; break;
      case Tok::le: op = Pred::CmpOp::le; break;
      case Tok::gt: op = Pred::CmpOp::gt; break;
      case Tok::ge: op = Pred::CmpOp::ge; break;
      case Tok::eq: op = Pred::CmpOp::eq; break;
      case Tok::ne: op = Pred::CmpOp::ne; break;
      default:
        fail("expected comparison operator");
    }
    get();
    return positioned(Pred::cmp(op, std::move(lhs), parse_arith()), t);
  }

  ArithPtr parse_arith() {
    ArithPtr e = parse_term();
    while (at(Tok::plus) || at(Tok::minus)) {
      const Token& t = get();
      ArithPtr rhs = parse_term();
      e = positioned(t.kind == Tok::plus ? ArithExpr::add(e, rhs) : ArithExpr::sub(e, rhs), t);
    }
    return e;
  }

  ArithPtr parse_term() {
    ArithPtr e = parse_factor();
    while (at(Tok::star) || at(Tok::slash)) {
      const Token& t = get();
      ArithPtr rhs = parse_factor();
      e = positioned(t.kind == Tok::star ? ArithExpr::mul(e, rhs) : ArithExpr::div(e, rhs), t);
    }
    return e;
  }

  ArithPtr parse_factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number:
        get();
        return positioned(ArithExpr::num(t.number), t);
      case Tok::minus: {
        get();
        if (at(Tok::number)) {
          const Token& n = get();
          return positioned(ArithExpr::num(-n.number), t);
        }
        return positioned(ArithExpr::sub(ArithExpr::num(0), parse_factor()), t);
      }
      case Tok::kw_len: {
        get();
        expect(Tok::lparen, "expected '(' after len");
        const Token& name = expect(Tok::ident, "expected variable in len(...)");
        expect(Tok::rparen, "expected ')'");
        return positioned(ArithExpr::len(name.text), t);
      }
      case Tok::ident:
        get();
        return positioned(ArithExpr::var_ref(t.text), t);
      case Tok::lparen: {
        get();
        ArithPtr e = parse_arith();
        expect(Tok::rparen, "expected ')'");
        return e;
      }
      default:
        fail("expected expression");
    }
  }

  RegexPtr parse_regex() { return parse_ralt(); }

  RegexPtr parse_ralt() {
    RegexPtr r = parse_rcat();
    while (eat(Tok::pipe)) r = Regex::alt(r, parse_rcat());
    return r;
  }

  RegexPtr parse_rcat() {
    RegexPtr r = parse_rrep();
    while (eat(Tok::dot)) r = Regex::seq(r, parse_rrep());
    return r;
  }

  RegexPtr parse_rrep() {
    RegexPtr r = parse_rbase();
    for (;;) {
      if (eat(Tok::star)) {
        r = Regex::star(r);
      } else if (eat(Tok::caret)) {
        const Token& n = expect(Tok::number, "expected repetition count");
        if (n.number < 0 || n.number > 64) fail("repetition count out of range");
        r = Regex::rep(r, static_cast<int>(n.number));
      } else {
        return r;
      }
    }
  }

  RegexPtr parse_rbase() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::string:
        get();
        return t.ci ? Regex::ci_lit(t.text) : Regex::lit(t.text);
      case Tok::char_class:
        get();
        return Regex::cls(t.ranges);
      case Tok::kw_any:
        get();
        return Regex::any();
      case Tok::ident: {
        get();
        if (defs_) {
          auto it = defs_->find(t.text);
          if (it != defs_->end()) return Regex::lit(it->second);
        }
        throw TypeError("variable '" + t.text + "' in a regular expression does not resolve to a literal",
                        t.line, t.col);
      }
      case Tok::lparen: {
        get();
        RegexPtr r = parse_ralt();
        expect(Tok::rparen, "expected ')'");
        return r;
      }
      default:
        fail("expected regular expression");
    }
  }
};

// ---------------------------------------------------------------------------
// Type checking and free-variable collection

class TypeCheck {
 public:
  void pred(const PredPtr& p) {
    using K = Pred::Kind;
    switch (p->kind) {
      case K::bool_const:
        return;
      case K::bool_var:
        require(p->var, ValueType::boolean, p->line, p->col);
        return;
      case K::negation:
        pred(p->left);
        return;
      case K::conjunction:
      case K::disjunction:
        pred(p->left);
        pred(p->right);
        return;
      case K::comparison:
        arith(p->lhs);
        arith(p->rhs);
        return;
      case K::membership:
        require(p->var, ValueType::string, p->line, p->col);
        return;
    }
  }

  std::vector<std::pair<std::string, ValueType>> vars;

 private:
  std::map<std::string, ValueType> seen_;

  void arith(const ArithPtr& e) {
    using K = ArithExpr::Kind;
    switch (e->kind) {
      case K::number:
        return;
      case K::variable:
        require(e->var, ValueType::integer, e->line, e->col);
        return;
      case K::length:
        require(e->var, ValueType::string, e->line, e->col);
        return;
      default:
        arith(e->left);
        arith(e->right);
        return;
    }
  }

  void require(const std::string& name, ValueType t, int line, int col) {
    auto it = seen_.find(name);
    if (it == seen_.end()) {
      seen_.emplace(name, t);
      vars.emplace_back(name, t);
      return;
    }
    if (it->second != t) {
      throw TypeError("variable '" + name + "' used as both " + type_name(it->second) + " and " +
                          type_name(t),
                      line, col);
    }
  }
};

}  // namespace

Contract make_contract(PredPtr root) {
  TypeCheck tc;
  tc.pred(root);
  return Contract{std::move(root), std::move(tc.vars)};
}

Contract parse_contract(std::string_view text, const RegexDefs* defs) {
  Lexer lexer(text);
  Parser parser(lexer.run(), defs);
  return make_contract(parser.run());
}

RegexPtr parse_regex_source(std::string_view text, const RegexDefs* defs) {
  Lexer lexer(text);
  Parser parser(lexer.run(), defs);
  return parser.run_regex();
}

const std::vector<std::pair<std::string, ValueType>>& free_vars(const Contract& c) { return c.vars; }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

const Value& lookup(const Env& env, const std::string& name) {
  auto it = env.find(name);
  if (it == env.end()) throw MissingBindingError(name);
  return it->second;
}

}  // namespace

std::int64_t evaluate_arith(const ArithPtr& e, const Env& env) {
  using K = ArithExpr::Kind;
  switch (e->kind) {
    case K::number:
      return e->value;
    case K::variable: {
      const Value& v = lookup(env, e->var);
      if (value_type(v) != ValueType::integer) {
        throw EvalError("variable '" + e->var + "' is bound to a non-integer value");
      }
      return std::get<std::int64_t>(v);
    }
    case K::length: {
      const Value& v = lookup(env, e->var);
      if (value_type(v) != ValueType::string) {
        throw EvalError("variable '" + e->var + "' is bound to a non-string value");
      }
      return static_cast<std::int64_t>(std::get<std::string>(v).size());
    }
    case K::add:
      return evaluate_arith(e->left, env) + evaluate_arith(e->right, env);
    case K::sub:
      return evaluate_arith(e->left, env) - evaluate_arith(e->right, env);
    case K::mul:
      return evaluate_arith(e->left, env) * evaluate_arith(e->right, env);
    case K::div: {
      std::int64_t d = evaluate_arith(e->right, env);
      if (d == 0) throw DivisionByZeroError();
      return evaluate_arith(e->left, env) / d;  // truncates toward zero
    }
  }
  throw Error("unreachable arith kind");
}

namespace {

bool eval_pred(const PredPtr& p, const Env& env) {
  using K = Pred::Kind;
  switch (p->kind) {
    case K::bool_const:
      return p->value;
    case K::bool_var: {
      const Value& v = lookup(env, p->var);
      if (value_type(v) != ValueType::boolean) {
        throw EvalError("variable '" + p->var + "' is bound to a non-boolean value");
      }
      return std::get<bool>(v);
    }
    case K::negation:
      return !eval_pred(p->left, env);
    case K::conjunction:
      return eval_pred(p->left, env) && eval_pred(p->right, env);
    case K::disjunction:
      return eval_pred(p->left, env) || eval_pred(p->right, env);
    case K::comparison: {
      std::int64_t a = evaluate_arith(p->lhs, env);
      std::int64_t b = evaluate_arith(p->rhs, env);
      switch (p->op) {
        case Pred::CmpOp::lt: return a < b;
        case Pred::CmpOp::gt: return a > b;
        case Pred::CmpOp::eq: return a == b;
        case Pred::CmpOp::ne: return a != b;
        case Pred::CmpOp::le: return a <= b;
        case Pred::CmpOp::ge: return a >= b;
      }
      throw Error("unreachable cmp op");
    }
    case K::membership: {
      const Value& v = lookup(env, p->var);
      if (value_type(v) != ValueType::string) {
        throw EvalError("variable '" + p->var + "' is bound to a non-string value");
      }
      return p->dfa->accepts(std::get<std::string>(v));
    }
  }
  throw Error("unreachable pred kind");
}

}  // namespace

bool evaluate(const Contract& c, const Env& env) { return eval_pred(c.root, env); }

// ---------------------------------------------------------------------------
// Printing

namespace {

int pred_prec(Pred::Kind k) {
  using K = Pred::Kind;
  switch (k) {
    case K::disjunction: return 0;
    case K::conjunction: return 1;
    case K::negation: return 2;
    default: return 3;
  }
}

int arith_prec(ArithExpr::Kind k) {
  using K = ArithExpr::Kind;
  switch (k) {
    case K::add:
    case K::sub: return 0;
    case K::mul:
    case K::div: return 1;
    default: return 2;
  }
}

void print_arith(const ArithPtr& e, int parent, std::string& out) {
  using K = ArithExpr::Kind;
  const int prec = arith_prec(e->kind);
  const bool parens = prec < parent;
  if (parens) out.push_back('(');
  switch (e->kind) {
    case K::number:
      out += std::to_string(e->value);
      break;
    case K::variable:
      out += e->var;
      break;
    case K::length:
      out += "len(" + e->var + ")";
      break;
    case K::add:
    case K::sub:
      print_arith(e->left, prec, out);
      out += e->kind == K::add ? " + " : " - ";
      print_arith(e->right, prec + 1, out);
      break;
    case K::mul:
    case K::div:
      print_arith(e->left, prec, out);
      out += e->kind == K::mul ? " * " : " / ";
      print_arith(e->right, prec + 1, out);
      break;
  }
  if (parens) out.push_back(')');
}

const char* cmp_text(Pred::CmpOp op) {
  switch (op) {
    case Pred::CmpOp::lt: return " < ";
    case Pred::CmpOp::gt: return " > ";
    case Pred::CmpOp::eq: return " = ";
    case Pred::CmpOp::ne: return " != ";
    case Pred::CmpOp::le: return " <= ";
    case Pred::CmpOp::ge: return " >= ";
  }
  return "?";
}

void print_pred(const PredPtr& p, int parent, std::string& out) {
  using K = Pred::Kind;
  const int prec = pred_prec(p->kind);
  const bool parens = prec < parent;
  if (parens) out.push_back('(');
  switch (p->kind) {
    case K::bool_const:
      out += p->value ? "true" : "false";
      break;
    case K::bool_var:
      out += p->var;
      break;
    case K::negation:
      out += "not ";
      print_pred(p->left, prec, out);
      break;
    case K::conjunction:
      print_pred(p->left, prec, out);
      out += " and ";
      print_pred(p->right, prec + 1, out);
      break;
    case K::disjunction:
      print_pred(p->left, prec, out);
      out += " or ";
      print_pred(p->right, prec + 1, out);
      break;
    case K::comparison:
      print_arith(p->lhs, 0, out);
      out += cmp_text(p->op);
      print_arith(p->rhs, 0, out);
      break;
    case K::membership:
      out += p->var + " in " + to_string(p->regex);
      break;
  }
  if (parens) out.push_back(')');
}

}  // namespace

std::string to_string(const Contract& c) {
  std::string out;
  print_pred(c.root, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Desugaring

namespace {

PredPtr desugar_pred(const PredPtr& p) {
  using K = Pred::Kind;
  switch (p->kind) {
    case K::bool_const:
    case K::bool_var:
      return p;
    case K::negation:
      return Pred::negate(desugar_pred(p->left));
    case K::conjunction:
      return Pred::conj(desugar_pred(p->left), desugar_pred(p->right));
    case K::disjunction:
      return Pred::disj(desugar_pred(p->left), desugar_pred(p->right));
    case K::comparison:
      switch (p->op) {
        case Pred::CmpOp::ge:
          return Pred::disj(Pred::cmp(Pred::CmpOp::gt, p->lhs, p->rhs),
                            Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        case Pred::CmpOp::le:
          return Pred::disj(Pred::cmp(Pred::CmpOp::lt, p->lhs, p->rhs),
                            Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        case Pred::CmpOp::ne:
          return Pred::negate(Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        default:
          return p;
      }
    case K::membership:
      return Pred::membership(p->var, desugar_regex(p->regex));
  }
  throw Error("unreachable pred kind");
}

}  // namespace

Contract desugar(const Contract& c) { return make_contract(desugar_pred(c.root)); }

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool arith_equal(const ArithPtr& a, const ArithPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value || a->var != b->var) return false;
  return arith_equal(a->left, b->left) && arith_equal(a->right, b->right);
}

bool pred_equal(const PredPtr& a, const PredPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value || a->var != b->var || a->op != b->op) return false;
  if (!arith_equal(a->lhs, b->lhs) || !arith_equal(a->rhs, b->rhs)) return false;
  if (!structurally_equal(a->regex, b->regex)) return false;
  return pred_equal(a->left, b->left) && pred_equal(a->right, b->right);
}

}  // namespace

bool structurally_equal(const Contract& a, const Contract& b) {
  return pred_equal(a.root, b.root) && a.vars == b.vars;
}

// ---------------------------------------------------------------------------
// Parameter binding

Env bind_params(const Contract& c, const ParamVector& v) {
  if (v.size() != c.vars.size()) {
    throw ArityMismatchError("parameter vector has arity " + std::to_string(v.size()) +
                             ", contract expects " + std::to_string(c.vars.size()));
  }
  Env env;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (value_type(v[i]) != c.vars[i].second) {
      throw ArityMismatchError("component " + std::to_string(i) + " has type " +
                               type_name(value_type(v[i])) + ", contract expects " +
                               type_name(c.vars[i].second));
    }
    env.emplace(c.vars[i].first, v[i]);
  }
  return env;
}

bool params_match(const Contract& c, const ParamVector& v) {
  if (v.size() != c.vars.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (value_type(v[i]) != c.vars[i].second) return false;
  }
  return true;
}

}  // namespace coevo

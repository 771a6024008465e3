#include "coevo/regex.hpp"

#include <algorithm>
#include <bitset>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

#include "coevo/errors.hpp"

namespace coevo {

namespace {

void check_alphabet(const std::string& s) {
  for (char c : s) {
    if (!in_alphabet(c)) {
      throw AlphabetError("regex literal contains character outside the printable alphabet: code " +
                          std::to_string(static_cast<int>(static_cast<unsigned char>(c))));
    }
  }
}

RegexPtr make(Regex r) { return std::make_shared<const Regex>(std::move(r)); }

}  // namespace

RegexPtr Regex::lit(std::string s) {
  check_alphabet(s);
  Regex r;
  r.kind = Kind::literal;
  r.text = std::move(s);
  return make(std::move(r));
}

RegexPtr Regex::ci_lit(std::string s) {
  check_alphabet(s);
  Regex r;
  r.kind = Kind::ci_literal;
  r.text = std::move(s);
  return make(std::move(r));
}

RegexPtr Regex::cls(std::vector<std::pair<char, char>> ranges) {
  for (auto [lo, hi] : ranges) {
    if (!in_alphabet(lo) || !in_alphabet(hi)) {
      throw AlphabetError("character class bound outside the printable alphabet");
    }
    if (lo > hi) throw AlphabetError("character class range is reversed");
  }
  Regex r;
  r.kind = Kind::char_class;
  r.ranges = std::move(ranges);
  return make(std::move(r));
}

RegexPtr Regex::any() {
  Regex r;
  r.kind = Kind::any_char;
  return make(std::move(r));
}

RegexPtr Regex::seq(RegexPtr a, RegexPtr b) {
  Regex r;
  r.kind = Kind::sequence;
  r.left = std::move(a);
  r.right = std::move(b);
  return make(std::move(r));
}

RegexPtr Regex::alt(RegexPtr a, RegexPtr b) {
  Regex r;
  r.kind = Kind::choice;
  r.left = std::move(a);
  r.right = std::move(b);
  return make(std::move(r));
}

RegexPtr Regex::star(RegexPtr a) {
  Regex r;
  r.kind = Kind::star;
  r.left = std::move(a);
  return make(std::move(r));
}

RegexPtr Regex::rep(RegexPtr a, int n) {
  Regex r;
  r.kind = Kind::repeat;
  r.left = std::move(a);
  r.count = n;
  return make(std::move(r));
}

RegexPtr desugar_regex(const RegexPtr& r) {
  using K = Regex::Kind;
  switch (r->kind) {
    case K::literal:
      return r;
    case K::ci_literal: {
      RegexPtr out = Regex::lit("");
      bool first = true;
      for (char c : r->text) {
        RegexPtr one;
        if (std::isalpha(static_cast<unsigned char>(c))) {
          char lo = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
          one = Regex::alt(Regex::lit(std::string(1, lo)), Regex::lit(std::string(1, up)));
        } else {
          one = Regex::lit(std::string(1, c));
        }
        out = first ? one : Regex::seq(out, one);
        first = false;
      }
      return first ? Regex::lit("") : out;
    }
    case K::char_class: {
      RegexPtr out;
      for (auto [lo, hi] : r->ranges) {
        for (char c = lo;; ++c) {
          RegexPtr one = Regex::lit(std::string(1, c));
          out = out ? Regex::alt(out, one) : one;
          if (c == hi) break;
        }
      }
      return out ? out : Regex::lit("");
    }
    case K::any_char: {
      RegexPtr out;
      for (int i = 0; i < kAlphabetSize; ++i) {
        RegexPtr one = Regex::lit(std::string(1, symbol_at(i)));
        out = out ? Regex::alt(out, one) : one;
      }
      return out;
    }
    case K::sequence:
      return Regex::seq(desugar_regex(r->left), desugar_regex(r->right));
    case K::choice:
      return Regex::alt(desugar_regex(r->left), desugar_regex(r->right));
    case K::star:
      return Regex::star(desugar_regex(r->left));
    case K::repeat: {
      if (r->count == 0) return Regex::lit("");
      RegexPtr child = desugar_regex(r->left);
      RegexPtr out = child;
      for (int i = 1; i < r->count; ++i) out = Regex::seq(out, child);
      return out;
    }
  }
  throw Error("unreachable regex kind");
}

bool structurally_equal(const RegexPtr& a, const RegexPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->text != b->text || a->ranges != b->ranges || a->count != b->count) {
    return false;
  }
  return structurally_equal(a->left, b->left) && structurally_equal(a->right, b->right);
}

namespace {

int precedence(Regex::Kind k) {
  using K = Regex::Kind;
  switch (k) {
    case K::choice:
      return 0;
    case K::sequence:
      return 1;
    case K::star:
    case K::repeat:
      return 2;
    default:
      return 3;
  }
}

std::string escape_literal(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void print(const RegexPtr& r, int parent_prec, std::string& out) {
  using K = Regex::Kind;
  const int prec = precedence(r->kind);
  const bool parens = prec < parent_prec;
  if (parens) out.push_back('(');
  switch (r->kind) {
    case K::literal:
      out += '"' + escape_literal(r->text) + '"';
      break;
    case K::ci_literal:
      out += '"' + escape_literal(r->text) + "\"i";
      break;
    case K::char_class:
      out.push_back('[');
      for (auto [lo, hi] : r->ranges) {
        out.push_back(lo);
        if (hi != lo) {
          out.push_back('-');
          out.push_back(hi);
        }
      }
      out.push_back(']');
      break;
    case K::any_char:
      out += "any";
      break;
    case K::sequence:
      print(r->left, prec, out);
      out += " . ";
      print(r->right, prec + 1, out);
      break;
    case K::choice:
      print(r->left, prec, out);
      out += " | ";
      print(r->right, prec + 1, out);
      break;
    case K::star:
      print(r->left, 3, out);
      out.push_back('*');
      break;
    case K::repeat:
      print(r->left, 3, out);
      out.push_back('^');
      out += std::to_string(r->count);
      break;
  }
  if (parens) out.push_back(')');
}

}  // namespace

std::string to_string(const RegexPtr& r) {
  std::string out;
  print(r, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Compilation: Thompson construction with symbol-set edges, then subset
// construction into a complete DFA (dead state materialized).

namespace {

using SymSet = std::bitset<kAlphabetSize>;

struct Nfa {
  struct Edge {
    SymSet syms;
    int to;
  };
  std::vector<std::vector<Edge>> edges;
  std::vector<std::vector<int>> eps;

  int add_state() {
    edges.emplace_back();
    eps.emplace_back();
    return static_cast<int>(edges.size()) - 1;
  }
};

struct Frag {
  int start;
  int accept;
};

SymSet set_of(char c) {
  SymSet s;
  s.set(static_cast<std::size_t>(symbol_index(c)));
  return s;
}

Frag build(Nfa& nfa, const RegexPtr& r) {
  using K = Regex::Kind;
  switch (r->kind) {
    case K::literal: {
      int start = nfa.add_state();
      int cur = start;
      for (char c : r->text) {
        int next = nfa.add_state();
        nfa.edges[static_cast<std::size_t>(cur)].push_back({set_of(c), next});
        cur = next;
      }
      return {start, cur};
    }
    case K::ci_literal: {
      int start = nfa.add_state();
      int cur = start;
      for (char c : r->text) {
        SymSet s = set_of(c);
        if (std::isalpha(static_cast<unsigned char>(c))) {
          s |= set_of(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
          s |= set_of(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        int next = nfa.add_state();
        nfa.edges[static_cast<std::size_t>(cur)].push_back({s, next});
        cur = next;
      }
      return {start, cur};
    }
    case K::char_class: {
      SymSet s;
      for (auto [lo, hi] : r->ranges) {
        for (char c = lo;; ++c) {
          s.set(static_cast<std::size_t>(symbol_index(c)));
          if (c == hi) break;
        }
      }
      int start = nfa.add_state();
      int accept = nfa.add_state();
      nfa.edges[static_cast<std::size_t>(start)].push_back({s, accept});
      return {start, accept};
    }
    case K::any_char: {
      SymSet s;
      s.set();
      int start = nfa.add_state();
      int accept = nfa.add_state();
      nfa.edges[static_cast<std::size_t>(start)].push_back({s, accept});
      return {start, accept};
    }
    case K::sequence: {
      Frag a = build(nfa, r->left);
      Frag b = build(nfa, r->right);
      nfa.eps[static_cast<std::size_t>(a.accept)].push_back(b.start);
      return {a.start, b.accept};
    }
    case K::choice: {
      Frag a = build(nfa, r->left);
      Frag b = build(nfa, r->right);
      int start = nfa.add_state();
      int accept = nfa.add_state();
      nfa.eps[static_cast<std::size_t>(start)].push_back(a.start);
      nfa.eps[static_cast<std::size_t>(start)].push_back(b.start);
      nfa.eps[static_cast<std::size_t>(a.accept)].push_back(accept);
      nfa.eps[static_cast<std::size_t>(b.accept)].push_back(accept);
      return {start, accept};
    }
    case K::star: {
      Frag a = build(nfa, r->left);
      int start = nfa.add_state();
      int accept = nfa.add_state();
      nfa.eps[static_cast<std::size_t>(start)].push_back(accept);
      nfa.eps[static_cast<std::size_t>(start)].push_back(a.start);
      nfa.eps[static_cast<std::size_t>(a.accept)].push_back(a.start);
      nfa.eps[static_cast<std::size_t>(a.accept)].push_back(accept);
      return {start, accept};
    }
    case K::repeat: {
      int start = nfa.add_state();
      int cur = start;
      for (int i = 0; i < r->count; ++i) {
        Frag a = build(nfa, r->left);
        nfa.eps[static_cast<std::size_t>(cur)].push_back(a.start);
        cur = a.accept;
      }
      return {start, cur};
    }
  }
  throw Error("unreachable regex kind");
}

void close_epsilon(const Nfa& nfa, std::vector<int>& states) {
  std::vector<int> stack(states);
  std::vector<bool> seen(nfa.edges.size(), false);
  for (int q : states) seen[static_cast<std::size_t>(q)] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int t : nfa.eps[static_cast<std::size_t>(q)]) {
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        states.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(states.begin(), states.end());
}

constexpr int kMaxDfaStates = 200000;

}  // namespace

class DfaBuilder {
 public:
  static Dfa from_nfa(const Nfa& nfa, int nfa_start, int nfa_accept) {
    Dfa dfa;
    std::map<std::vector<int>, int> index;

    auto intern = [&](std::vector<int> subset) {
      auto it = index.find(subset);
      if (it != index.end()) return it->second;
      int id = static_cast<int>(dfa.trans_.size());
      if (id >= kMaxDfaStates) throw Error("regex too large: automaton state limit exceeded");
      index.emplace(std::move(subset), id);
      dfa.trans_.emplace_back();
      dfa.trans_.back().fill(0);
      dfa.accepting_.push_back(false);
      return id;
    };

    // State 0 is the dead state (empty subset, self-loops everywhere).
    int dead = intern({});
    (void)dead;

    std::vector<int> start_subset = {nfa_start};
    close_epsilon(nfa, start_subset);
    dfa.start_ = intern(start_subset);

    std::deque<std::pair<std::vector<int>, int>> work;
    for (const auto& [subset, id] : index) {
      if (id != 0) work.emplace_back(subset, id);
    }

    while (!work.empty()) {
      auto [subset, id] = std::move(work.front());
      work.pop_front();
      dfa.accepting_[static_cast<std::size_t>(id)] =
          std::binary_search(subset.begin(), subset.end(), nfa_accept);
      for (int sym = 0; sym < kAlphabetSize; ++sym) {
        std::vector<int> next;
        for (int q : subset) {
          for (const auto& e : nfa.edges[static_cast<std::size_t>(q)]) {
            if (e.syms.test(static_cast<std::size_t>(sym))) next.push_back(e.to);
          }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        close_epsilon(nfa, next);
        std::size_t before = index.size();
        int to = intern(next);
        dfa.trans_[static_cast<std::size_t>(id)][static_cast<std::size_t>(sym)] = to;
        if (index.size() > before) work.emplace_back(std::move(next), to);
      }
    }
    return dfa;
  }
};

Dfa compile_regex(const RegexPtr& r) {
  Nfa nfa;
  Frag frag = build(nfa, r);
  return DfaBuilder::from_nfa(nfa, frag.start, frag.accept);
}

Dfa universal_dfa() { return compile_regex(Regex::star(Regex::any())); }

bool Dfa::accepts(std::string_view s) const {
  int q = start_;
  for (char c : s) {
    int sym = symbol_index(c);
    if (sym < 0) return false;
    q = step_sym(q, sym);
  }
  return accepting(q);
}

std::vector<int> Dfa::steps_to_accept() const {
  const int n = state_count();
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    for (int sym = 0; sym < kAlphabetSize; ++sym) {
      rev[static_cast<std::size_t>(step_sym(q, sym))].push_back(q);
    }
  }
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> queue;
  for (int q = 0; q < n; ++q) {
    if (accepting(q)) {
      dist[static_cast<std::size_t>(q)] = 0;
      queue.push_back(q);
    }
  }
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int p : rev[static_cast<std::size_t>(q)]) {
      if (dist[static_cast<std::size_t>(p)] < 0) {
        dist[static_cast<std::size_t>(p)] = dist[static_cast<std::size_t>(q)] + 1;
        queue.push_back(p);
      }
    }
  }
  return dist;
}

bool Dfa::language_empty() const { return steps_to_accept()[static_cast<std::size_t>(start_)] < 0; }

Dfa Dfa::complement() const {
  Dfa out = *this;
  for (std::size_t i = 0; i < out.accepting_.size(); ++i) out.accepting_[i] = !out.accepting_[i];
  return out;
}

Dfa Dfa::intersect(const Dfa& a, const Dfa& b) {
  Dfa out;
  std::map<std::pair<int, int>, int> index;
  std::deque<std::pair<int, int>> work;

  auto intern = [&](std::pair<int, int> pq) {
    auto it = index.find(pq);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(out.trans_.size());
    if (id >= kMaxDfaStates) throw Error("regex too large: automaton state limit exceeded");
    index.emplace(pq, id);
    out.trans_.emplace_back();
    out.trans_.back().fill(0);
    out.accepting_.push_back(a.accepting(pq.first) && b.accepting(pq.second));
    work.push_back(pq);
    return id;
  };

  out.start_ = intern({a.start(), b.start()});
  while (!work.empty()) {
    auto pq = work.front();
    work.pop_front();
    int id = index.at(pq);
    for (int sym = 0; sym < kAlphabetSize; ++sym) {
      int to = intern({a.step_sym(pq.first, sym), b.step_sym(pq.second, sym)});
      out.trans_[static_cast<std::size_t>(id)][static_cast<std::size_t>(sym)] = to;
    }
  }
  return out;
}

}  // namespace coevo

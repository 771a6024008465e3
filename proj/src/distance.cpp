#include "coevo/distance.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "coevo/dnf.hpp"
#include "coevo/errors.hpp"

namespace coevo {

std::uint64_t dist_bool(bool a, bool b) { return a == b ? 0 : 1; }

std::uint64_t dist_int(std::int64_t n, std::int64_t m) {
  return n >= m ? static_cast<std::uint64_t>(n) - static_cast<std::uint64_t>(m)
                : static_cast<std::uint64_t>(m) - static_cast<std::uint64_t>(n);
}

namespace {

// Bit-parallel Levenshtein (Myers/Hyyro) for patterns up to 64 characters:
// one word of vertical-delta state per text character.
std::uint64_t myers_distance(std::string_view pattern, std::string_view text) {
  const std::size_t m = pattern.size();
  std::uint64_t peq[256] = {};
  for (std::size_t i = 0; i < m; ++i) {
    peq[static_cast<unsigned char>(pattern[i])] |= 1ull << i;
  }
  std::uint64_t pv = ~0ull, mv = 0;
  std::uint64_t score = m;
  const std::uint64_t top = 1ull << (m - 1);
  for (char c : text) {
    const std::uint64_t eq = peq[static_cast<unsigned char>(c)];
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & top) ++score;
    if (mh & top) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

std::uint64_t dp_distance_bounded(std::string_view s, std::string_view t, std::uint64_t cutoff) {
  const std::size_t n = s.size(), m = t.size();
  std::vector<std::uint64_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::uint64_t diag = row[0];
    row[0] = i;
    std::uint64_t row_min = row[0];
    for (std::size_t j = 1; j <= m; ++j) {
      std::uint64_t sub = diag + (s[i - 1] == t[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      row_min = std::min(row_min, row[j]);
    }
    if (row_min > cutoff) return cutoff + 1;
  }
  return row[m] > cutoff ? cutoff + 1 : row[m];
}

}  // namespace

std::uint64_t dist_str(std::string_view s, std::string_view t) {
  if (s.empty() || t.empty()) return s.size() + t.size();
  std::string_view pattern = s.size() <= t.size() ? s : t;
  std::string_view text = s.size() <= t.size() ? t : s;
  if (pattern.size() <= 64) return myers_distance(pattern, text);
  return dp_distance_bounded(s, t, std::numeric_limits<std::uint64_t>::max() - 1);
}

std::uint64_t dist_str_bounded(std::string_view s, std::string_view t, std::uint64_t cutoff) {
  const std::uint64_t lower = s.size() > t.size() ? s.size() - t.size() : t.size() - s.size();
  if (lower > cutoff) return cutoff + 1;
  if (s.empty() || t.empty()) return lower;  // == max(sizes)
  std::string_view pattern = s.size() <= t.size() ? s : t;
  std::string_view text = s.size() <= t.size() ? t : s;
  if (pattern.size() <= 64) {
    const std::uint64_t d = myers_distance(pattern, text);
    return d > cutoff ? cutoff + 1 : d;
  }
  return dp_distance_bounded(s, t, cutoff);
}

std::uint64_t value_dist(const Value& a, const Value& b) {
  if (value_type(a) != value_type(b)) {
    throw ArityMismatchError("distance between values of different types");
  }
  switch (value_type(a)) {
    case ValueType::boolean:
      return dist_bool(std::get<bool>(a), std::get<bool>(b));
    case ValueType::integer:
      return dist_int(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    case ValueType::string:
      return dist_str(std::get<std::string>(a), std::get<std::string>(b));
  }
  throw Error("unreachable value type");
}

std::uint64_t manhattan(const ParamVector& v, const ParamVector& w) {
  if (v.size() != w.size()) {
    throw ArityMismatchError("Manhattan distance between vectors of different arity");
  }
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += value_dist(v[i], w[i]);
  return sum;
}

// ---------------------------------------------------------------------------
// Edit distance from a string to an automaton language. Shortest path over a
// layered graph: layer i = characters of s consumed, plus the automaton state
// (and, in the by-length variant, the number of output characters emitted).
// All edge costs are 0 or 1, so a deque BFS suffices.

namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

// Distinct successor states per state; collapses the 94-way symbol loop.
std::vector<std::vector<int>> unique_targets(const Dfa& d) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(d.state_count()));
  for (int q = 0; q < d.state_count(); ++q) {
    auto& v = out[static_cast<std::size_t>(q)];
    for (int sym = 0; sym < kAlphabetSize; ++sym) v.push_back(d.step_sym(q, sym));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

struct ZeroOneBfs {
  explicit ZeroOneBfs(std::size_t n) : dist(n, kInf) {}

  std::vector<std::uint64_t> dist;
  std::deque<std::size_t> queue;

  void seed(std::size_t u) {
    dist[u] = 0;
    queue.push_back(u);
  }

  void relax(std::size_t u, std::size_t v, std::uint64_t w) {
    if (dist[u] + w < dist[v]) {
      dist[v] = dist[u] + w;
      if (w == 0) {
        queue.push_front(v);
      } else {
        queue.push_back(v);
      }
    }
  }
};

}  // namespace

std::uint64_t regex_edit_distance(std::string_view s, const Dfa& d) {
  if (d.language_empty()) throw EmptyLanguageError("automaton accepts no string");
  const int Q = d.state_count();
  const int n = static_cast<int>(s.size());
  const auto targets = unique_targets(d);
  auto id = [Q](int i, int q) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(Q) + static_cast<std::size_t>(q); };

  ZeroOneBfs bfs(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(Q));
  bfs.seed(id(0, d.start()));
  while (!bfs.queue.empty()) {
    std::size_t u = bfs.queue.front();
    bfs.queue.pop_front();
    const int i = static_cast<int>(u / static_cast<std::size_t>(Q));
    const int q = static_cast<int>(u % static_cast<std::size_t>(Q));
    const std::uint64_t du = bfs.dist[u];
    if (du == kInf) continue;
    if (i < n) {
      bfs.relax(u, id(i + 1, q), 1);  // delete s[i]
      int sym = symbol_index(s[static_cast<std::size_t>(i)]);
      if (sym >= 0) bfs.relax(u, id(i + 1, d.step_sym(q, sym)), 0);  // match
      for (int t : targets[static_cast<std::size_t>(q)]) {
        bfs.relax(u, id(i + 1, t), 1);  // substitute
      }
    }
    for (int t : targets[static_cast<std::size_t>(q)]) {
      bfs.relax(u, id(i, t), 1);  // insert
    }
  }

  std::uint64_t best = kInf;
  for (int q = 0; q < Q; ++q) {
    if (d.accepting(q)) best = std::min(best, bfs.dist[id(n, q)]);
  }
  return best;
}

std::vector<std::optional<std::uint64_t>> edit_distance_by_length(std::string_view s, const Dfa& d,
                                                                  int max_len) {
  const int Q = d.state_count();
  const int n = static_cast<int>(s.size());
  const int L = max_len;
  const auto targets = unique_targets(d);
  auto id = [Q, L](int i, int q, int m) {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(Q) + static_cast<std::size_t>(q)) *
               static_cast<std::size_t>(L + 1) +
           static_cast<std::size_t>(m);
  };

  ZeroOneBfs bfs(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(Q) *
                 static_cast<std::size_t>(L + 1));
  bfs.seed(id(0, d.start(), 0));
  while (!bfs.queue.empty()) {
    std::size_t u = bfs.queue.front();
    bfs.queue.pop_front();
    const int m = static_cast<int>(u % static_cast<std::size_t>(L + 1));
    const std::size_t iq = u / static_cast<std::size_t>(L + 1);
    const int i = static_cast<int>(iq / static_cast<std::size_t>(Q));
    const int q = static_cast<int>(iq % static_cast<std::size_t>(Q));
    if (bfs.dist[u] == kInf) continue;
    if (i < n) {
      bfs.relax(u, id(i + 1, q, m), 1);  // delete s[i]
      if (m < L) {
        int sym = symbol_index(s[static_cast<std::size_t>(i)]);
        if (sym >= 0) bfs.relax(u, id(i + 1, d.step_sym(q, sym), m + 1), 0);  // match
        for (int t : targets[static_cast<std::size_t>(q)]) {
          bfs.relax(u, id(i + 1, t, m + 1), 1);  // substitute
        }
      }
    }
    if (m < L) {
      for (int t : targets[static_cast<std::size_t>(q)]) {
        bfs.relax(u, id(i, t, m + 1), 1);  // insert
      }
    }
  }

  std::vector<std::optional<std::uint64_t>> out(static_cast<std::size_t>(L + 1));
  for (int m = 0; m <= L; ++m) {
    std::uint64_t best = kInf;
    for (int q = 0; q < Q; ++q) {
      if (d.accepting(q)) best = std::min(best, bfs.dist[id(n, q, m)]);
    }
    if (best != kInf) out[static_cast<std::size_t>(m)] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact contract distance.
//
// Per DNF conjunct: boolean literals force values; memberships per string
// variable intersect into one automaton whose by-length edit-distance table
// is exact; the remaining minimization enumerates string lengths and integer
// values with branch-and-bound, checking arithmetic atoms (with len(x)
// replaced by the chosen length) at each leaf.

namespace {

struct IntScope {
  std::map<std::string, std::int64_t> ints;  // integer variables
  std::map<std::string, std::int64_t> lens;  // chosen string lengths
};

std::optional<std::int64_t> eval_oracle_arith(const ArithPtr& e, const IntScope& scope) {
  using K = ArithExpr::Kind;
  switch (e->kind) {
    case K::number:
      return e->value;
    case K::variable: {
      auto it = scope.ints.find(e->var);
      if (it == scope.ints.end()) throw MissingBindingError(e->var);
      return it->second;
    }
    case K::length: {
      auto it = scope.lens.find(e->var);
      if (it == scope.lens.end()) throw MissingBindingError(e->var);
      return it->second;
    }
    default: {
      auto a = eval_oracle_arith(e->left, scope);
      auto b = eval_oracle_arith(e->right, scope);
      if (!a || !b) return std::nullopt;
      switch (e->kind) {
        case K::add: return *a + *b;
        case K::sub: return *a - *b;
        case K::mul: return *a * *b;
        case K::div:
          if (*b == 0) return std::nullopt;  // erroring vectors never satisfy
          return *a / *b;
        default: break;
      }
    }
  }
  throw Error("unreachable arith kind");
}

bool arith_literal_holds(const DnfLiteral& lit, const IntScope& scope) {
  auto a = eval_oracle_arith(lit.atom->lhs, scope);
  auto b = eval_oracle_arith(lit.atom->rhs, scope);
  if (!a || !b) return false;
  bool v = false;
  switch (lit.atom->op) {
    case Pred::CmpOp::lt: v = *a < *b; break;
    case Pred::CmpOp::gt: v = *a > *b; break;
    case Pred::CmpOp::eq: v = *a == *b; break;
    default:
      throw Error("sugared comparison in normal form");
  }
  return lit.positive ? v : !v;
}

// One enumerated dimension: either a string variable's output length or an
// integer variable's value, with candidates sorted by cost.
struct Dimension {
  bool is_length = false;
  std::string name;
  std::vector<std::pair<std::uint64_t, std::int64_t>> candidates;  // (cost, value)
};

}  // namespace

std::optional<std::uint64_t> gamma_exact(const Contract& c, const ParamVector& v,
                                         const OracleBounds& bounds) {
  if (!params_match(c, v)) {
    throw ArityMismatchError("query vector does not match the contract's variables");
  }
  const auto dnf = to_dnf(c, bounds.max_conjuncts);

  std::map<std::string, std::size_t> var_index;
  for (std::size_t i = 0; i < c.vars.size(); ++i) var_index.emplace(c.vars[i].first, i);

  std::uint64_t budget = bounds.budget;
  auto spend = [&budget](std::uint64_t cost) {
    if (cost > budget) throw BoundsError("contract distance enumeration exceeds its budget");
    budget -= cost;
  };

  const Dfa universal = universal_dfa();
  std::uint64_t best = kInf;

  for (const auto& conjunct : dnf) {
    if (best == 0) break;

    std::map<std::string, bool> forced;
    std::map<std::string, std::vector<std::pair<const Dfa*, bool>>> memberships;
    std::vector<const DnfLiteral*> ariths;
    bool contradiction = false;

    for (const auto& lit : conjunct) {
      switch (lit.atom->kind) {
        case Pred::Kind::bool_var: {
          auto [it, fresh] = forced.emplace(lit.atom->var, lit.positive);
          if (!fresh && it->second != lit.positive) contradiction = true;
          break;
        }
        case Pred::Kind::membership:
          memberships[lit.atom->var].emplace_back(lit.atom->dfa.get(), lit.positive);
          break;
        case Pred::Kind::comparison:
          ariths.push_back(&lit);
          break;
        default:
          throw Error("unexpected literal kind in normal form");
      }
    }
    if (contradiction) continue;

    std::uint64_t base = 0;
    for (const auto& [name, val] : forced) {
      base += dist_bool(std::get<bool>(v[var_index.at(name)]), val);
    }
    if (base >= best) continue;

    // Build enumerated dimensions. String variables come first so that the
    // arithmetic check sees every len() it may need.
    std::vector<Dimension> dims;
    bool conjunct_feasible = true;

    for (std::size_t i = 0; i < c.vars.size() && conjunct_feasible; ++i) {
      const auto& [name, type] = c.vars[i];
      if (type != ValueType::string) continue;
      Dfa product = universal;
      auto it = memberships.find(name);
      if (it != memberships.end()) {
        for (const auto& [dfa, positive] : it->second) {
          product = Dfa::intersect(product, positive ? *dfa : dfa->complement());
          spend(static_cast<std::uint64_t>(product.state_count()));
        }
      }
      const std::string& query = std::get<std::string>(v[i]);
      spend(static_cast<std::uint64_t>(query.size() + 1) *
            static_cast<std::uint64_t>(product.state_count()) *
            static_cast<std::uint64_t>(bounds.max_string_len + 1));
      auto table = edit_distance_by_length(query, product, bounds.max_string_len);
      Dimension dim;
      dim.is_length = true;
      dim.name = name;
      for (int ell = 0; ell <= bounds.max_string_len; ++ell) {
        if (table[static_cast<std::size_t>(ell)]) {
          dim.candidates.emplace_back(*table[static_cast<std::size_t>(ell)], ell);
        }
      }
      if (dim.candidates.empty()) {
        conjunct_feasible = false;
        break;
      }
      std::sort(dim.candidates.begin(), dim.candidates.end());
      dims.push_back(std::move(dim));
    }
    if (!conjunct_feasible) continue;

    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      const auto& [name, type] = c.vars[i];
      if (type != ValueType::integer) continue;
      Dimension dim;
      dim.name = name;
      const std::int64_t q = std::get<std::int64_t>(v[i]);
      for (std::int64_t w = bounds.int_lo; w <= bounds.int_hi; ++w) {
        dim.candidates.emplace_back(dist_int(q, w), w);
      }
      std::sort(dim.candidates.begin(), dim.candidates.end());
      dims.push_back(std::move(dim));
    }

    // Admissible lower bound on the cost of the still-unassigned suffix.
    std::vector<std::uint64_t> suffix_min(dims.size() + 1, 0);
    for (std::size_t k = dims.size(); k-- > 0;) {
      suffix_min[k] = suffix_min[k + 1] + dims[k].candidates.front().first;
    }

    IntScope scope;
    auto dfs = [&](auto&& self, std::size_t k, std::uint64_t acc) -> void {
      if (acc + suffix_min[k] >= best) return;
      if (k == dims.size()) {
        spend(1 + ariths.size());
        for (const auto* lit : ariths) {
          if (!arith_literal_holds(*lit, scope)) return;
        }
        best = acc;
        return;
      }
      auto& dim = dims[k];
      for (const auto& [cost, value] : dim.candidates) {
        if (acc + cost + suffix_min[k + 1] >= best) break;  // candidates sorted
        if (dim.is_length) {
          scope.lens[dim.name] = value;
        } else {
          scope.ints[dim.name] = value;
        }
        self(self, k + 1, acc + cost);
      }
      if (dim.is_length) {
        scope.lens.erase(dim.name);
      } else {
        scope.ints.erase(dim.name);
      }
    };
    dfs(dfs, 0, base);
  }

  if (best == kInf) return std::nullopt;
  return best;
}

}  // namespace coevo

#include "coevo/sampler.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

#include "coevo/dnf.hpp"
#include "coevo/errors.hpp"
#include "coevo/regex.hpp"

namespace coevo {

std::string SampleSpace::resolved_alphabet() const {
  if (!alphabet.empty()) return alphabet;
  std::string all;
  all.reserve(kAlphabetSize);
  for (int i = 0; i < kAlphabetSize; ++i) all.push_back(symbol_at(i));
  return all;
}

namespace {

struct IntWindow {
  std::int64_t lo, hi;
  bool empty() const { return lo > hi; }
  void narrow_lo(std::int64_t v) { lo = std::max(lo, v); }
  void narrow_hi(std::int64_t v) { hi = std::min(hi, v); }
};

// Constant-folds an arithmetic expression; nullopt when it mentions any
// variable or divides by zero.
std::optional<std::int64_t> fold_const(const ArithPtr& e) {
  using K = ArithExpr::Kind;
  switch (e->kind) {
    case K::number:
      return e->value;
    case K::variable:
    case K::length:
      return std::nullopt;
    default: {
      auto a = fold_const(e->left);
      auto b = fold_const(e->right);
      if (!a || !b) return std::nullopt;
      switch (e->kind) {
        case K::add: return *a + *b;
        case K::sub: return *a - *b;
        case K::mul: return *a * *b;
        case K::div: return *b == 0 ? std::nullopt : std::optional(*a / *b);
        default: return std::nullopt;
      }
    }
  }
}

// var `op` k  /  len(var) `op` k, with the other side constant.
struct SimpleBound {
  std::string var;
  bool is_length = false;
  Pred::CmpOp op;  // lt, gt or eq, normalized to "subject op k"
  std::int64_t k;
};

std::optional<SimpleBound> extract_bound(const DnfLiteral& lit) {
  const auto& p = *lit.atom;
  auto subject_of = [](const ArithPtr& e) -> std::optional<std::pair<std::string, bool>> {
    if (e->kind == ArithExpr::Kind::variable) return std::pair{e->var, false};
    if (e->kind == ArithExpr::Kind::length) return std::pair{e->var, true};
    return std::nullopt;
  };

  std::optional<std::pair<std::string, bool>> subject;
  std::optional<std::int64_t> k;
  Pred::CmpOp op = p.op;
  if ((subject = subject_of(p.lhs)) && (k = fold_const(p.rhs))) {
    // already "subject op k"
  } else if ((subject = subject_of(p.rhs)) && (k = fold_const(p.lhs))) {
    // mirror "k op subject"
    if (op == Pred::CmpOp::lt) op = Pred::CmpOp::gt;
    else if (op == Pred::CmpOp::gt) op = Pred::CmpOp::lt;
  } else {
    return std::nullopt;
  }

  // Negations: not(<) is >=, handled by widening one step around eq.
  if (!lit.positive) {
    switch (op) {
      case Pred::CmpOp::lt: op = Pred::CmpOp::gt; *k -= 1; break;  // x >= k  ==  x > k-1
      case Pred::CmpOp::gt: op = Pred::CmpOp::lt; *k += 1; break;  // x <= k  ==  x < k+1
      default: return std::nullopt;  // not(=) does not narrow a window
    }
  }
  return SimpleBound{subject->first, subject->second, op, *k};
}

void apply_bound(IntWindow& w, const SimpleBound& b) {
  switch (b.op) {
    case Pred::CmpOp::lt: w.narrow_hi(b.k - 1); break;
    case Pred::CmpOp::gt: w.narrow_lo(b.k + 1); break;
    case Pred::CmpOp::eq: w.narrow_lo(b.k); w.narrow_hi(b.k); break;
    default: break;
  }
}

struct StringPlan {
  std::size_t var_index;
  Dfa product;
  IntWindow len_window{0, 0};
  std::vector<int> min_steps;         // to acceptance, over the restricted alphabet
  std::vector<std::vector<char>> ok;  // per state, alphabet chars that stay alive
};

struct ConjunctPlan {
  std::map<std::size_t, bool> forced_bools;
  std::vector<StringPlan> strings;
  std::map<std::size_t, IntWindow> int_windows;
};

// Does the automaton accept any word whose length falls in the window,
// walking only the restricted alphabet?
bool window_reachable(const Dfa& d, const std::string& alphabet, const IntWindow& w) {
  if (w.empty()) return false;
  std::vector<char> cur(static_cast<std::size_t>(d.state_count()), 0);
  cur[static_cast<std::size_t>(d.start())] = 1;
  for (std::int64_t len = 0; len <= w.hi; ++len) {
    if (len >= w.lo) {
      for (int q = 0; q < d.state_count(); ++q) {
        if (cur[static_cast<std::size_t>(q)] && d.accepting(q)) return true;
      }
    }
    std::vector<char> next(cur.size(), 0);
    for (int q = 0; q < d.state_count(); ++q) {
      if (!cur[static_cast<std::size_t>(q)]) continue;
      for (char c : alphabet) {
        next[static_cast<std::size_t>(d.step_sym(q, symbol_index(c)))] = 1;
      }
    }
    cur = std::move(next);
  }
  return false;
}

// Minimum steps to acceptance per state, over the restricted alphabet.
std::vector<int> restricted_steps_to_accept(const Dfa& d, const std::string& alphabet) {
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(d.state_count()));
  for (int q = 0; q < d.state_count(); ++q) {
    for (char c : alphabet) rev[static_cast<std::size_t>(d.step_sym(q, symbol_index(c)))].push_back(q);
  }
  std::vector<int> dist(static_cast<std::size_t>(d.state_count()), -1);
  std::deque<int> queue;
  for (int q = 0; q < d.state_count(); ++q) {
    if (d.accepting(q)) {
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

}  // namespace

struct ModelStream::Impl {
  Contract contract;
  Rng rng;
  std::uint64_t budget;
  SampleSpace space;
  std::string alphabet;
  std::vector<ParamVector> excluded;
  std::vector<ConjunctPlan> plans;
  bool proven_unsat = false;

  Impl(Contract c, std::uint64_t seed, std::uint64_t budget, SampleSpace space)
      : contract(std::move(c)), rng(seed), budget(budget), space(std::move(space)),
        alphabet(this->space.resolved_alphabet()) {
    build_plans();
  }

  void build_plans() {
    std::map<std::string, std::size_t> var_index;
    for (std::size_t i = 0; i < contract.vars.size(); ++i) {
      var_index.emplace(contract.vars[i].first, i);
    }
    const auto dnf = to_dnf(contract);

    for (const auto& conjunct : dnf) {
      ConjunctPlan plan;
      bool dead = false;

      std::map<std::string, std::vector<std::pair<const Dfa*, bool>>> memberships;
      std::vector<const DnfLiteral*> bounds_source;

      for (const auto& lit : conjunct) {
        switch (lit.atom->kind) {
          case Pred::Kind::bool_var: {
            std::size_t idx = var_index.at(lit.atom->var);
            auto [it, fresh] = plan.forced_bools.emplace(idx, lit.positive);
            if (!fresh && it->second != lit.positive) dead = true;
            break;
          }
          case Pred::Kind::membership:
            memberships[lit.atom->var].emplace_back(lit.atom->dfa.get(), lit.positive);
            break;
          case Pred::Kind::comparison:
            bounds_source.push_back(&lit);
            break;
          default:
            throw Error("unexpected literal kind in normal form");
        }
      }
      if (dead) continue;

      // Windows from single-subject constant comparisons.
      std::map<std::string, IntWindow> len_windows;
      for (const auto* lit : bounds_source) {
        if (auto b = extract_bound(*lit)) {
          if (b->is_length) {
            auto [it, fresh] = len_windows.try_emplace(b->var, IntWindow{0, space.max_string_len});
            apply_bound(it->second, *b);
          } else {
            std::size_t idx = var_index.at(b->var);
            auto [it, fresh] = plan.int_windows.try_emplace(idx, IntWindow{space.int_lo, space.int_hi});
            apply_bound(it->second, *b);
          }
        }
      }
      for (const auto& [idx, w] : plan.int_windows) {
        if (w.empty()) dead = true;
      }
      if (dead) continue;

      for (std::size_t i = 0; i < contract.vars.size() && !dead; ++i) {
        const auto& [name, type] = contract.vars[i];
        if (type != ValueType::string) continue;
        StringPlan sp;
        sp.var_index = i;
        sp.product = universal_dfa();
        auto mit = memberships.find(name);
        if (mit != memberships.end()) {
          for (const auto& [dfa, positive] : mit->second) {
            sp.product = Dfa::intersect(sp.product, positive ? *dfa : dfa->complement());
          }
        }
        sp.len_window = IntWindow{0, space.max_string_len};
        auto lit = len_windows.find(name);
        if (lit != len_windows.end()) {
          sp.len_window.narrow_lo(std::max<std::int64_t>(lit->second.lo, 0));
          sp.len_window.narrow_hi(lit->second.hi);
        }
        if (!window_reachable(sp.product, alphabet, sp.len_window)) {
          dead = true;
          break;
        }
        sp.min_steps = restricted_steps_to_accept(sp.product, alphabet);
        sp.ok.resize(static_cast<std::size_t>(sp.product.state_count()));
        for (int q = 0; q < sp.product.state_count(); ++q) {
          for (char c : alphabet) {
            int t = sp.product.step_sym(q, symbol_index(c));
            if (sp.min_steps[static_cast<std::size_t>(t)] >= 0) {
              sp.ok[static_cast<std::size_t>(q)].push_back(c);
            }
          }
        }
        plan.strings.push_back(std::move(sp));
      }
      if (dead) continue;

      plans.push_back(std::move(plan));
    }
    proven_unsat = plans.empty();
  }

  std::optional<std::string> walk(const StringPlan& sp) {
    const Dfa& d = sp.product;
    std::string s;
    int q = d.start();
    const std::int64_t lo = std::max<std::int64_t>(sp.len_window.lo, 0);
    const std::int64_t hi = sp.len_window.hi;
    for (std::int64_t len = 0; len <= hi; ++len) {
      const bool acceptable = len >= lo && d.accepting(q);
      if (acceptable && (len == hi || rng.chance(space.stop_prob))) return s;
      if (len == hi) break;
      // Stay on states that can still reach acceptance within the window.
      std::string feasible;
      for (char c : sp.ok[static_cast<std::size_t>(q)]) {
        int t = d.step_sym(q, symbol_index(c));
        if (sp.min_steps[static_cast<std::size_t>(t)] <= hi - len - 1) feasible.push_back(c);
      }
      if (feasible.empty()) {
        if (acceptable) return s;
        return std::nullopt;
      }
      char c = feasible[rng.below(feasible.size())];
      s.push_back(c);
      q = d.step_sym(q, symbol_index(c));
    }
    if (static_cast<std::int64_t>(s.size()) >= lo && d.accepting(q)) return s;
    return std::nullopt;
  }

  SampleResult next() {
    if (proven_unsat) return {SampleStatus::unsat, {}};
    for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
      const ConjunctPlan& plan = plans[rng.below(plans.size())];
      ParamVector candidate;
      candidate.reserve(contract.vars.size());
      bool ok = true;
      for (std::size_t i = 0; i < contract.vars.size() && ok; ++i) {
        switch (contract.vars[i].second) {
          case ValueType::boolean: {
            auto it = plan.forced_bools.find(i);
            candidate.emplace_back(it != plan.forced_bools.end() ? it->second
                                                                 : rng.below(2) == 1);
            break;
          }
          case ValueType::integer: {
            IntWindow w{space.int_lo, space.int_hi};
            auto it = plan.int_windows.find(i);
            if (it != plan.int_windows.end()) w = it->second;
            candidate.emplace_back(rng.range(w.lo, w.hi));
            break;
          }
          case ValueType::string: {
            const StringPlan* sp = nullptr;
            for (const auto& s : plan.strings) {
              if (s.var_index == i) sp = &s;
            }
            auto s = walk(*sp);
            if (!s) {
              ok = false;
              break;
            }
            candidate.emplace_back(std::move(*s));
            break;
          }
        }
      }
      if (!ok) continue;

      bool satisfies = false;
      try {
        satisfies = evaluate(contract, bind_params(contract, candidate));
      } catch (const EvalError&) {
        satisfies = false;
      }
      if (!satisfies) continue;
      if (std::find(excluded.begin(), excluded.end(), candidate) != excluded.end()) continue;
      excluded.push_back(candidate);
      return {SampleStatus::model, std::move(candidate)};
    }
    return {SampleStatus::exhausted, {}};
  }
};

ModelStream::ModelStream(Contract c, std::uint64_t seed, std::uint64_t budget, SampleSpace space)
    : impl_(std::make_unique<Impl>(std::move(c), seed, budget, std::move(space))) {}

ModelStream::~ModelStream() = default;
ModelStream::ModelStream(ModelStream&&) noexcept = default;
ModelStream& ModelStream::operator=(ModelStream&&) noexcept = default;

SampleResult ModelStream::next() { return impl_->next(); }

const std::vector<ParamVector>& ModelStream::excluded() const { return impl_->excluded; }

const Contract& ModelStream::contract() const { return impl_->contract; }

std::vector<ParamVector> seed_population(const Contract& c, std::size_t n, std::uint64_t seed,
                                         std::uint64_t budget, const SampleSpace& space) {
  if (n == 0) return {};
  ModelStream stream(c, seed, budget, space);
  const std::size_t distinct_target = std::min<std::size_t>(n, 32);
  std::vector<ParamVector> models;
  while (models.size() < distinct_target) {
    SampleResult r = stream.next();
    if (r.status != SampleStatus::model) break;
    models.push_back(std::move(r.model));
  }
  if (models.empty()) {
    throw UnsatContractError("no satisfying vector found for contract: " + to_string(c));
  }
  std::vector<ParamVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(models[i % models.size()]);
  return out;
}

}  // namespace coevo

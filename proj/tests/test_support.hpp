#ifndef COEVO_TEST_SUPPORT_HPP
#define COEVO_TEST_SUPPORT_HPP

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "coevo/aut.hpp"
#include "coevo/contract.hpp"
#include "coevo/regex.hpp"
#include "coevo/rng.hpp"

namespace coevo::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(COEVO_FIXTURE_DIR) + "/" + name;
}

inline AutModel load_scw() { return load_model(fixture_path("scw.json")); }
inline VulnSpec load_xss() { return load_vuln_spec(fixture_path("xss.json")); }

// ---------------------------------------------------------------------------
// Direct recursive regex matcher, independent of the automaton pipeline.
// Returns the set of end positions reachable by matching r from `from`.

inline std::set<std::size_t> match_ends(const RegexPtr& r, const std::string& s, std::size_t from) {
  using K = Regex::Kind;
  std::set<std::size_t> out;
  switch (r->kind) {
    case K::literal:
      if (from + r->text.size() <= s.size() && s.compare(from, r->text.size(), r->text) == 0) {
        out.insert(from + r->text.size());
      }
      break;
    case K::ci_literal: {
      if (from + r->text.size() > s.size()) break;
      bool ok = true;
      for (std::size_t i = 0; i < r->text.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[from + i])) !=
            std::tolower(static_cast<unsigned char>(r->text[i]))) {
          ok = false;
          break;
        }
      }
      if (ok) out.insert(from + r->text.size());
      break;
    }
    case K::char_class: {
      if (from >= s.size()) break;
      for (auto [lo, hi] : r->ranges) {
        if (s[from] >= lo && s[from] <= hi) {
          out.insert(from + 1);
          break;
        }
      }
      break;
    }
    case K::any_char:
      if (from < s.size() && in_alphabet(s[from])) out.insert(from + 1);
      break;
    case K::sequence:
      for (std::size_t mid : match_ends(r->left, s, from)) {
        auto rest = match_ends(r->right, s, mid);
        out.insert(rest.begin(), rest.end());
      }
      break;
    case K::choice: {
      out = match_ends(r->left, s, from);
      auto rest = match_ends(r->right, s, from);
      out.insert(rest.begin(), rest.end());
      break;
    }
    case K::star: {
      out.insert(from);
      std::set<std::size_t> frontier{from};
      while (!frontier.empty()) {
        std::set<std::size_t> next;
        for (std::size_t p : frontier) {
          for (std::size_t q : match_ends(r->left, s, p)) {
            if (q > p && !out.count(q)) {
              out.insert(q);
              next.insert(q);
            }
          }
        }
        frontier = std::move(next);
      }
      break;
    }
    case K::repeat: {
      std::set<std::size_t> cur{from};
      for (int i = 0; i < r->count; ++i) {
        std::set<std::size_t> next;
        for (std::size_t p : cur) {
          auto ends = match_ends(r->left, s, p);
          next.insert(ends.begin(), ends.end());
        }
        cur = std::move(next);
      }
      out = std::move(cur);
      break;
    }
  }
  return out;
}

inline bool brute_match(const RegexPtr& r, const std::string& s) {
  return match_ends(r, s, 0).count(s.size()) != 0;
}

// Calls f on every string over `alphabet` of length <= max_len.
template <typename F>
void for_all_strings(const std::string& alphabet, int max_len, F&& f) {
  std::string s;
  auto rec = [&](auto&& self) -> void {
    f(const_cast<const std::string&>(s));
    if (static_cast<int>(s.size()) == max_len) return;
    for (char c : alphabet) {
      s.push_back(c);
      self(self);
      s.pop_back();
    }
  };
  rec(rec);
}

// Textbook two-row Levenshtein, used as an independent oracle.
inline std::size_t naive_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ---------------------------------------------------------------------------
// Random structures for property tests.

inline std::string random_text(Rng& rng, const std::string& alphabet, int max_len) {
  const int len = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len) + 1));
  std::string s;
  for (int i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  return s;
}

// Random regex over the alphabet; literals stay short so small languages stay
// reachable within tight length bounds.
inline RegexPtr random_regex(Rng& rng, const std::string& alphabet, int depth) {
  const auto pick_char = [&] { return alphabet[rng.below(alphabet.size())]; };
  if (depth == 0 || rng.below(3) == 0) {
    switch (rng.below(3)) {
      case 0: {
        std::string lit;
        const int len = static_cast<int>(rng.below(3));
        for (int i = 0; i < len; ++i) lit.push_back(pick_char());
        return Regex::lit(lit);
      }
      case 1: {
        // class of alphabet singletons, so its language stays inside the alphabet
        std::vector<std::pair<char, char>> ranges;
        const std::size_t n = 1 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
          char c = pick_char();
          ranges.emplace_back(c, c);
        }
        return Regex::cls(std::move(ranges));
      }
      default:
        return Regex::lit(std::string(1, pick_char()));
    }
  }
  switch (rng.below(4)) {
    case 0:
      return Regex::seq(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
    case 1:
      return Regex::alt(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
    case 2:
      return Regex::star(random_regex(rng, alphabet, depth - 1));
    default:
      return Regex::rep(random_regex(rng, alphabet, depth - 1), static_cast<int>(rng.below(3)));
  }
}

}  // namespace coevo::test

#endif

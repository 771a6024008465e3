#include <doctest.h>

#include <algorithm>

#include "coevo/distance.hpp"
#include "coevo/errors.hpp"
#include "test_support.hpp"

using namespace coevo;
using namespace coevo::test;

namespace {

const char* kContractBase = "payload in any* . [0-9] . any* and len(payload) >= y";

ParamVector sv(const std::string& s) { return {s}; }

// All strings reachable from s with exactly one edit over the alphabet.
std::vector<std::string> one_edit_ball(const std::string& s, const std::string& alphabet) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string t = s;
    t.erase(i, 1);
    out.push_back(t);
  }
  for (std::size_t i = 0; i <= s.size(); ++i) {
    for (char c : alphabet) {
      std::string t = s;
      t.insert(t.begin() + static_cast<std::ptrdiff_t>(i), c);
      out.push_back(t);
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (char c : alphabet) {
      std::string t = s;
      t[i] = c;
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("boolean distance") {
  CHECK(dist_bool(true, true) == 0);
  CHECK(dist_bool(true, false) == 1);
  CHECK(dist_bool(false, true) == 1);
}

TEST_CASE("integer distance") {
  CHECK(dist_int(7, 6) == 1);
  CHECK(dist_int(7, 0) == 7);
  CHECK(dist_int(-3, -3) == 0);
  CHECK(dist_int(-2, 5) == 7);
}

TEST_CASE("string distance worked examples") {
  CHECK(dist_str("john", "john42") == 2);
  CHECK(dist_str("john", "G?_9") == 4);
  CHECK(dist_str("same", "same") == 0);
  CHECK(dist_str("", "abc") == 3);
  CHECK(dist_str("abc", "") == 3);
}

TEST_CASE("string distance agrees with the textbook recurrence") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::string a = random_text(rng, "abcd", 12);
    std::string b = random_text(rng, "abcd", 12);
    CAPTURE(a);
    CAPTURE(b);
    REQUIRE(dist_str(a, b) == naive_levenshtein(a, b));
    const std::uint64_t cutoff = rng.below(6);
    const std::uint64_t full = naive_levenshtein(a, b);
    REQUIRE(dist_str_bounded(a, b, cutoff) == std::min(full, cutoff + 1));
  }
}

TEST_CASE("string distance is a metric") {
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    std::string a = random_text(rng, "xy01", 8);
    std::string b = random_text(rng, "xy01", 8);
    std::string c = random_text(rng, "xy01", 8);
    const auto ab = dist_str(a, b), ba = dist_str(b, a);
    REQUIRE(ab == ba);
    REQUIRE((ab == 0) == (a == b));
    REQUIRE(ab <= dist_str(a, c) + dist_str(c, b));
  }
}

TEST_CASE("manhattan worked examples") {
  ParamVector v{std::string("john"), std::int64_t{7}};
  CHECK(manhattan(v, {std::string("john42"), std::int64_t{6}}) == 3);
  CHECK(manhattan(v, {std::string("G?_9"), std::int64_t{0}}) == 11);
  CHECK(manhattan(v, v) == 0);
  CHECK_THROWS_AS(manhattan(v, {std::string("john")}), ArityMismatchError);
  CHECK_THROWS_AS(manhattan(v, {std::int64_t{7}, std::string("john")}), ArityMismatchError);
}

TEST_CASE("edit distance to a language") {
  Dfa digits = compile_regex(parse_regex_source("any* . [0-9] . any*"));
  CHECK(regex_edit_distance("john42", digits) == 0);  // member: zero distance

  // independent check: some one-edit neighbor of "john" is in the language,
  // and "john" itself is not
  bool neighbor_in = false;
  for (const auto& t : one_edit_ball("john", "abc0123456789")) {
    neighbor_in = neighbor_in || digits.accepts(t);
  }
  CHECK(neighbor_in);
  CHECK_FALSE(digits.accepts("john"));
  CHECK(regex_edit_distance("john", digits) == 1);

  Dfa abc = compile_regex(parse_regex_source("\"abc\""));
  CHECK(regex_edit_distance("", abc) == 3);

  Dfa empty = Dfa::intersect(compile_regex(Regex::lit("a")), compile_regex(Regex::lit("b")));
  CHECK_THROWS_AS(regex_edit_distance("a", empty), EmptyLanguageError);
}

TEST_CASE("edit distance by length") {
  Dfa digits = compile_regex(parse_regex_source("any* . [0-9] . any*"));
  auto table = edit_distance_by_length("john", digits, 8);
  REQUIRE(table.size() == 9);
  CHECK_FALSE(table[0].has_value());  // empty string has no digit
  CHECK(table[4] == 1);               // substitute one character
  CHECK(table[5] == 1);               // insert a digit
  CHECK(table[6] == 2);
}

TEST_CASE("exact contract distance on the worked example") {
  Contract c = parse_contract(kContractBase);
  CHECK(gamma_exact(c, {std::string("john"), std::int64_t{7}}) == 3);
  CHECK(gamma_exact(c, {std::string("c4rl"), std::int64_t{5}}) == 1);
  CHECK(gamma_exact(c, {std::string("john42"), std::int64_t{6}}) == 0);  // satisfying vector
}

TEST_CASE("exact contract distance error paths") {
  Contract c = parse_contract(kContractBase);
  CHECK_THROWS_AS(gamma_exact(c, sv("john")), ArityMismatchError);

  CHECK_FALSE(gamma_exact(parse_contract("len(x) < 0"), sv("a")).has_value());
  CHECK_FALSE(gamma_exact(parse_contract("false"), {}).has_value());
  CHECK(gamma_exact(parse_contract("true"), {}) == 0);

  OracleBounds tiny;
  tiny.budget = 2;
  CHECK_THROWS_AS(gamma_exact(c, {std::string("john"), std::int64_t{7}}, tiny), BoundsError);
}

TEST_CASE("exact contract distance equals naive enumeration") {
  // Small enough bounds that a full product enumeration is feasible.
  const std::string alphabet = "ab";
  OracleBounds bounds;
  bounds.max_string_len = 3;
  bounds.int_lo = 0;
  bounds.int_hi = 3;

  Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // one string variable s, one integer variable k
    RegexPtr r = random_regex(rng, alphabet, 2);
    PredPtr membership = Pred::membership("s", r);
    PredPtr cmp = Pred::cmp(static_cast<Pred::CmpOp>(rng.below(6)),
                            rng.below(2) ? ArithExpr::len("s") : ArithExpr::var_ref("k"),
                            ArithExpr::num(rng.range(0, 3)));
    PredPtr root = rng.below(2) ? Pred::conj(membership, cmp) : Pred::disj(membership, cmp);
    if (rng.below(3) == 0) root = Pred::conj(root, Pred::cmp(Pred::CmpOp::gt, ArithExpr::var_ref("k"),
                                                             ArithExpr::len("s")));
    // force both variables into the contract so the shape stays fixed
    root = Pred::conj(root, Pred::cmp(Pred::CmpOp::ge, ArithExpr::var_ref("k"),
                                      ArithExpr::num(bounds.int_lo)));
    Contract c = make_contract(root);
    REQUIRE(c.vars.size() == 2);

    ParamVector query;
    for (const auto& [name, type] : c.vars) {
      if (type == ValueType::string) {
        query.emplace_back(random_text(rng, alphabet, 3));
      } else {
        query.emplace_back(rng.range(0, 3));
      }
    }

    std::optional<std::uint64_t> naive;
    for_all_strings(alphabet + "c", bounds.max_string_len, [&](const std::string& w_s) {
      for (std::int64_t w_k = bounds.int_lo; w_k <= bounds.int_hi; ++w_k) {
        Env env;
        ParamVector w;
        for (const auto& [name, type] : c.vars) {
          if (type == ValueType::string) {
            env.emplace(name, w_s);
            w.emplace_back(w_s);
          } else {
            env.emplace(name, w_k);
            w.emplace_back(w_k);
          }
        }
        bool sat = false;
        try {
          sat = evaluate(c, env);
        } catch (const EvalError&) {
          sat = false;
        }
        if (!sat) continue;
        const std::uint64_t d = manhattan(query, w);
        if (!naive || d < *naive) naive = d;
      }
    });

    auto got = gamma_exact(c, query, bounds);
    CAPTURE(to_string(c));
    CAPTURE(to_display(query));
    REQUIRE(got == naive);
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("edit distance to a language matches the membership-contract oracle") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    RegexPtr r = random_regex(rng, "ab1?", 3);
    Dfa d = compile_regex(r);
    if (d.language_empty()) continue;
    std::string s = random_text(rng, "ab1?", 5);
    const std::uint64_t red = regex_edit_distance(s, d);

    Contract c = make_contract(Pred::membership("x", r));
    OracleBounds bounds;
    // an optimal witness is never longer than |s| + distance
    bounds.max_string_len = static_cast<int>(s.size() + red);
    auto g = gamma_exact(c, sv(s), bounds);
    CAPTURE(to_string(c));
    CAPTURE(s);
    REQUIRE(g == red);
  }
}

TEST_CASE("gamma is zero exactly on satisfying vectors") {
  Contract c = parse_contract(kContractBase);
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    ParamVector v{random_text(rng, "jo4n?", 6), rng.range(-2, 8)};
    bool sat = evaluate(c, bind_params(c, v));
    auto g = gamma_exact(c, v);
    REQUIRE(g.has_value());
    REQUIRE((*g == 0) == sat);
  }
}

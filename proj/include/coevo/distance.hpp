#ifndef COEVO_DISTANCE_HPP
#define COEVO_DISTANCE_HPP

#include <cstdint>
#include <optional>
#include <string_view>

#include "coevo/contract.hpp"
#include "coevo/regex.hpp"
#include "coevo/value.hpp"

namespace coevo {

std::uint64_t dist_bool(bool a, bool b);

std::uint64_t dist_int(std::int64_t n, std::int64_t m);

// Levenshtein distance, unit costs.
std::uint64_t dist_str(std::string_view s, std::string_view t);

// Early-abandoning variant: any result > cutoff is reported as cutoff + 1.
std::uint64_t dist_str_bounded(std::string_view s, std::string_view t, std::uint64_t cutoff);

std::uint64_t value_dist(const Value& a, const Value& b);

std::uint64_t manhattan(const ParamVector& v, const ParamVector& w);

// Minimum edit distance from s to any word of the automaton's language.
std::uint64_t regex_edit_distance(std::string_view s, const Dfa& d);

// Per output length ell in [0, max_len], the minimum edit distance from s to
// any word of L(d) with |word| == ell; nullopt where that set is empty.
std::vector<std::optional<std::uint64_t>> edit_distance_by_length(std::string_view s, const Dfa& d,
                                                                  int max_len);

// Enumeration bounds for the exact contract-distance oracle. Strings range
// over the full 94-symbol alphabet up to max_string_len; integers over
// [int_lo, int_hi]. budget caps elementary enumeration steps.
struct OracleBounds {
  int max_string_len = 8;
  std::int64_t int_lo = -32;
  std::int64_t int_hi = 32;
  std::uint64_t budget = 20'000'000;
  std::size_t max_conjuncts = 4096;
};

// Exact minimum Manhattan distance from v to any in-bounds vector satisfying
// the contract; nullopt when no in-bounds vector satisfies it. Brute-force
// test oracle: never call this on the search hot path.
std::optional<std::uint64_t> gamma_exact(const Contract& c, const ParamVector& v,
                                         const OracleBounds& bounds = {});

}  // namespace coevo

#endif

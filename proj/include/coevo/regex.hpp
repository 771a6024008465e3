#ifndef COEVO_REGEX_HPP
#define COEVO_REGEX_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coevo/value.hpp"

namespace coevo {

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

// Regular expression tree. Core connectives are literal, sequence, choice and
// star; char_class, any_char, repeat and ci_literal are sugar that desugar()
// rewrites into the core forms.
struct Regex {
  enum class Kind {
    literal,     // fixed string, possibly empty
    ci_literal,  // fixed string, letters match either case
    char_class,  // one symbol drawn from a set of inclusive ranges
    any_char,    // one arbitrary alphabet symbol
    sequence,
    choice,
    star,
    repeat,      // left repeated exactly `count` times
  };

  Kind kind;
  std::string text;                           // literal, ci_literal
  std::vector<std::pair<char, char>> ranges;  // char_class
  RegexPtr left;                              // sequence/choice left; star/repeat child
  RegexPtr right;                             // sequence/choice right
  int count = 0;                              // repeat

  static RegexPtr lit(std::string s);
  static RegexPtr ci_lit(std::string s);
  static RegexPtr cls(std::vector<std::pair<char, char>> ranges);
  static RegexPtr any();
  static RegexPtr seq(RegexPtr a, RegexPtr b);
  static RegexPtr alt(RegexPtr a, RegexPtr b);
  static RegexPtr star(RegexPtr a);
  static RegexPtr rep(RegexPtr a, int n);
};

// Rewrites sugar nodes into literal/sequence/choice/star form.
RegexPtr desugar_regex(const RegexPtr& r);

bool structurally_equal(const RegexPtr& a, const RegexPtr& b);

// Concrete syntax (round-trips through the contract parser).
std::string to_string(const RegexPtr& r);

// Complete deterministic automaton over the 94-symbol alphabet. Immutable
// once built; complement is a flag flip because every state is total.
class Dfa {
 public:
  int state_count() const { return static_cast<int>(trans_.size()); }
  int start() const { return start_; }
  bool accepting(int q) const { return accepting_[static_cast<std::size_t>(q)]; }
  int step_sym(int q, int sym) const { return trans_[static_cast<std::size_t>(q)][static_cast<std::size_t>(sym)]; }

  // Strings with characters outside the alphabet belong to no language.
  bool accepts(std::string_view s) const;

  bool language_empty() const;

  Dfa complement() const;
  static Dfa intersect(const Dfa& a, const Dfa& b);

  // Per state, the minimum number of symbols to reach an accepting state;
  // -1 where acceptance is unreachable.
  std::vector<int> steps_to_accept() const;

 private:
  std::vector<std::array<std::int32_t, kAlphabetSize>> trans_;
  std::vector<bool> accepting_;
  int start_ = 0;

  friend class DfaBuilder;
};

Dfa compile_regex(const RegexPtr& r);

// Accepts every string over the alphabet.
Dfa universal_dfa();

}  // namespace coevo

#endif

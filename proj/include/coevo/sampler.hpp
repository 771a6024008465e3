#ifndef COEVO_SAMPLER_HPP
#define COEVO_SAMPLER_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coevo/contract.hpp"
#include "coevo/rng.hpp"
#include "coevo/value.hpp"

namespace coevo {

// Value space the sampler (and the species mutation operators) draw from.
// An empty alphabet means the full 94-symbol set.
struct SampleSpace {
  std::string alphabet;
  int max_string_len = 30;
  std::int64_t int_lo = -1024;
  std::int64_t int_hi = 1024;
  double stop_prob = 0.125;  // geometric stop at accepting walk states

  std::string resolved_alphabet() const;
};

enum class SampleStatus { model, exhausted, unsat };

struct SampleResult {
  SampleStatus status = SampleStatus::exhausted;
  ParamVector model;  // meaningful when status == model
};

// Streams distinct satisfying vectors for one contract. Strings are sampled
// by random walk over the product of the membership automata of one normal
// form disjunct; integers by window sampling after bound extraction; every
// candidate is validated against the full contract before emission.
class ModelStream {
 public:
  ModelStream(Contract c, std::uint64_t seed, std::uint64_t budget = 10000, SampleSpace space = {});
  ~ModelStream();
  ModelStream(ModelStream&&) noexcept;
  ModelStream& operator=(ModelStream&&) noexcept;

  SampleResult next();

  const std::vector<ParamVector>& excluded() const;
  const Contract& contract() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// n vectors satisfying the contract: distinct models first, then cyclic
// copies once the stream runs dry. Throws UnsatContractError when no model
// can be found at all.
std::vector<ParamVector> seed_population(const Contract& c, std::size_t n, std::uint64_t seed,
                                         std::uint64_t budget = 10000, const SampleSpace& space = {});

}  // namespace coevo

#endif

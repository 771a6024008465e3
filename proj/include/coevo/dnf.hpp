#ifndef COEVO_DNF_HPP
#define COEVO_DNF_HPP

#include <cstddef>
#include <vector>

#include "coevo/contract.hpp"

namespace coevo {

// One signed atom of a disjunct. Atoms are core comparisons (<, >, =),
// memberships, or boolean variables; sugar is removed before expansion.
struct DnfLiteral {
  PredPtr atom;
  bool positive = true;
};

using DnfConjunct = std::vector<DnfLiteral>;

// Disjunctive normal form of the contract. An empty conjunct is trivially
// satisfied; an empty result means the contract is unsatisfiable. Throws
// BoundsError when the expansion exceeds max_conjuncts.
std::vector<DnfConjunct> to_dnf(const Contract& c, std::size_t max_conjuncts = 4096);

bool eval_literal(const DnfLiteral& lit, const Env& env);

}  // namespace coevo

#endif

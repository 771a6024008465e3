#ifndef COEVO_SMTLIB_HPP
#define COEVO_SMTLIB_HPP

#include <string>
#include <vector>

#include "coevo/contract.hpp"
#include "coevo/value.hpp"

namespace coevo {

// SMT-LIB 2 text with the strings theory: one declaration per free variable,
// one assertion per top-level conjunct, then one negated-equality assertion
// per component of each excluded model.
std::string export_smtlib(const Contract& c, const std::vector<ParamVector>& excluded = {});

}  // namespace coevo

#endif

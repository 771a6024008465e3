#include "coevo/dnf.hpp"

#include "coevo/errors.hpp"

namespace coevo {

namespace {

// Rewrites >=, <=, != into the >, <, = core. Membership nodes pass through
// untouched so their compiled automata are shared, not rebuilt.
PredPtr core_form(const PredPtr& p) {
  using K = Pred::Kind;
  switch (p->kind) {
    case K::bool_const:
    case K::bool_var:
    case K::membership:
      return p;
    case K::negation:
      return Pred::negate(core_form(p->left));
    case K::conjunction:
      return Pred::conj(core_form(p->left), core_form(p->right));
    case K::disjunction:
      return Pred::disj(core_form(p->left), core_form(p->right));
    case K::comparison:
      switch (p->op) {
        case Pred::CmpOp::ge:
          return Pred::disj(Pred::cmp(Pred::CmpOp::gt, p->lhs, p->rhs),
                            Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        case Pred::CmpOp::le:
          return Pred::disj(Pred::cmp(Pred::CmpOp::lt, p->lhs, p->rhs),
                            Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        case Pred::CmpOp::ne:
          return Pred::negate(Pred::cmp(Pred::CmpOp::eq, p->lhs, p->rhs));
        default:
          return p;
      }
  }
  throw Error("unreachable pred kind");
}

// Negation-normal form with distribution: negations end up on atoms.
void expand(const PredPtr& p, bool positive, std::size_t max_conjuncts,
            std::vector<DnfConjunct>& out) {
  using K = Pred::Kind;
  switch (p->kind) {
    case K::negation:
      expand(p->left, !positive, max_conjuncts, out);
      return;
    case K::conjunction:
    case K::disjunction: {
      const bool conjunctive = (p->kind == K::conjunction) == positive;
      if (conjunctive) {
        std::vector<DnfConjunct> left, right;
        expand(p->left, positive, max_conjuncts, left);
        expand(p->right, positive, max_conjuncts, right);
        if (left.size() * right.size() > max_conjuncts) {
          throw BoundsError("normal form expansion exceeds the conjunct budget");
        }
        for (const auto& a : left) {
          for (const auto& b : right) {
            DnfConjunct merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            out.push_back(std::move(merged));
          }
        }
      } else {
        expand(p->left, positive, max_conjuncts, out);
        expand(p->right, positive, max_conjuncts, out);
      }
      if (out.size() > max_conjuncts) {
        throw BoundsError("normal form expansion exceeds the conjunct budget");
      }
      return;
    }
    case K::bool_const:
      if (p->value == positive) {
        out.push_back({});  // trivially true conjunct
      }
      // trivially false: contributes nothing
      return;
    case K::bool_var:
    case K::comparison:
    case K::membership:
      out.push_back({DnfLiteral{p, positive}});
      return;
  }
}

}  // namespace

std::vector<DnfConjunct> to_dnf(const Contract& c, std::size_t max_conjuncts) {
  std::vector<DnfConjunct> out;
  expand(core_form(c.root), true, max_conjuncts, out);
  return out;
}

bool eval_literal(const DnfLiteral& lit, const Env& env) {
  Contract wrapper{lit.atom, {}};
  bool v = evaluate(wrapper, env);
  return lit.positive ? v : !v;
}

}  // namespace coevo

#ifndef ERGO_TYPEEQ_HPP
#define ERGO_TYPEEQ_HPP

#include <string>
#include <vector>

#include "ergo/syntax.hpp"

namespace ergo {

/// Quantified equality claim: forall V'. C' => V1<E1> == V2<E2>.
struct EqAssumption {
  std::vector<std::string> vars;
  Prop constraint;
  std::string name1;
  std::vector<Exp> args1;
  std::string name2;
  std::vector<Exp> args2;
};

struct EqVerdict {
  enum class Kind { Equal, NotEqual, Unknown };
  Kind kind = Kind::Unknown;
  std::vector<std::string> path;  // divergence trail for NotEqual

  bool equal() const { return kind == Kind::Equal; }
  static EqVerdict eq() { return {Kind::Equal, {}}; }
  static EqVerdict neq(std::vector<std::string> p) { return {Kind::NotEqual, std::move(p)}; }
  static EqVerdict unknown() { return {Kind::Unknown, {}}; }
};

/// Coinductive type-equality check. Deterministic, no backtracking; equal
/// verdicts are sound, not-equal and unknown both fail type checking.
/// The signature must be elaborated (structural children are names).
EqVerdict type_equal(const Signature& sig, const VarCtx& vars, const Prop& constraint,
                     const Type& a, const Type& b);

/// Bounded bisimulation between closed types: checks the coinductive
/// definition clause by clause to the given unfolding depth, sampling
/// quantifier instances at 0, 1, 2, 5.
bool bounded_bisim_oracle(const Signature& sig, const Type& a, const Type& b,
                          unsigned depth);

/// Cross-signature variant, used to compare a type before and after
/// internal-name elaboration.
bool bounded_bisim_oracle(const Signature& sig_a, const Type& a, const Signature& sig_b,
                          const Type& b, unsigned depth);

}  // namespace ergo

#endif  // ERGO_TYPEEQ_HPP

#ifndef ERGO_TESTS_ORACLE_HPP
#define ERGO_TESTS_ORACLE_HPP

// Brute-force evaluator for quantified linear arithmetic over the naturals,
// independent of the quantifier-elimination implementation it checks.
// Quantifiers are evaluated by exhaustive search up to the bound
//   max |atom constant| + lcm of all coefficients and divisors,
// which is sound for the generated fragment by eventual periodicity.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>

#include "ergo/arith.hpp"

namespace oracle {

using Int = long long;
using IEnv = std::map<std::string, Int>;

inline Int eval(const ergo::Exp& e, const IEnv& env) {
  using K = ergo::Exp::Kind;
  switch (e.kind()) {
    case K::Const: return static_cast<Int>(e.value());
    case K::Var: return env.at(e.name());
    case K::Add: return eval(e.lhs(), env) + eval(e.rhs(), env);
    case K::Sub: return eval(e.lhs(), env) - eval(e.rhs(), env);
    case K::Mul: return static_cast<Int>(e.value()) * eval(e.operand(), env);
  }
  return 0;
}

// Constant part of an atom side under the current environment, with the
// quantified variable treated as zero.
inline Int const_part(const ergo::Exp& e, const IEnv& env, const std::string& qv) {
  using K = ergo::Exp::Kind;
  switch (e.kind()) {
    case K::Const: return static_cast<Int>(e.value());
    case K::Var: {
      if (e.name() == qv) return 0;
      auto it = env.find(e.name());
      return it == env.end() ? 0 : it->second;
    }
    case K::Add: return const_part(e.lhs(), env, qv) + const_part(e.rhs(), env, qv);
    case K::Sub: return const_part(e.lhs(), env, qv) - const_part(e.rhs(), env, qv);
    case K::Mul: return static_cast<Int>(e.value()) * const_part(e.operand(), env, qv);
  }
  return 0;
}

inline void coeff_lcm(const ergo::Exp& e, Int mult, Int& l) {
  using K = ergo::Exp::Kind;
  switch (e.kind()) {
    case K::Const: return;
    case K::Var: {
      Int m = mult < 0 ? -mult : mult;
      if (m > 1) l = l / std::gcd(l, m) * m;
      return;
    }
    case K::Add:
    case K::Sub:
      coeff_lcm(e.lhs(), mult, l);
      coeff_lcm(e.rhs(), e.kind() == K::Sub ? -mult : mult, l);
      return;
    case K::Mul: coeff_lcm(e.operand(), mult * static_cast<Int>(e.value()), l); return;
  }
}

struct Bound {
  Int max_const = 0;
  Int lcm = 1;
};

inline void stats(const ergo::Prop& p, const IEnv& env, const std::string& qv, Bound& b) {
  using K = ergo::Prop::Kind;
  auto atom = [&](const ergo::Exp& a, const ergo::Exp& bb) {
    Int c = const_part(a, env, qv) - const_part(bb, env, qv);
    if (c < 0) c = -c;
    if (c > b.max_const) b.max_const = c;
    coeff_lcm(a, 1, b.lcm);
    coeff_lcm(bb, 1, b.lcm);
  };
  switch (p.kind()) {
    case K::Eq:
    case K::Gt: atom(p.exp_lhs(), p.exp_rhs()); return;
    case K::Divides: {
      Int d = static_cast<Int>(p.divisor());
      b.lcm = b.lcm / std::gcd(b.lcm, d) * d;
      Int c = const_part(p.divided(), env, qv);
      if (c < 0) c = -c;
      if (c > b.max_const) b.max_const = c;
      coeff_lcm(p.divided(), 1, b.lcm);
      return;
    }
    case K::Top:
    case K::Bot: return;
    case K::And:
    case K::Or:
      stats(p.lhs(), env, qv, b);
      stats(p.rhs(), env, qv, b);
      return;
    case K::Not: stats(p.body(), env, qv, b); return;
    case K::Exists:
    case K::Forall: stats(p.body(), env, qv, b); return;
  }
}

inline bool holds(const ergo::Prop& p, IEnv env) {
  using K = ergo::Prop::Kind;
  switch (p.kind()) {
    case K::Eq: return eval(p.exp_lhs(), env) == eval(p.exp_rhs(), env);
    case K::Gt: return eval(p.exp_lhs(), env) > eval(p.exp_rhs(), env);
    case K::Top: return true;
    case K::Bot: return false;
    case K::And: return holds(p.lhs(), env) && holds(p.rhs(), env);
    case K::Or: return holds(p.lhs(), env) || holds(p.rhs(), env);
    case K::Not: return !holds(p.body(), env);
    case K::Divides: {
      Int v = eval(p.divided(), env);
      Int d = static_cast<Int>(p.divisor());
      return ((v % d) + d) % d == 0;
    }
    case K::Exists:
    case K::Forall: {
      Bound b;
      stats(p.body(), env, p.var(), b);
      Int bound = b.max_const + b.lcm;
      for (Int i = 0; i <= bound; ++i) {
        env[p.var()] = i;
        bool r = holds(p.body(), env);
        if (p.kind() == K::Exists && r) return true;
        if (p.kind() == K::Forall && !r) return false;
      }
      return p.kind() == K::Forall;
    }
  }
  return false;
}

}  // namespace oracle

#endif

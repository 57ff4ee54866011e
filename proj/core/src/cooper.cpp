#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ergo/arith.hpp"

// Cooper's quantifier elimination over the natural numbers.
//
// Internally formulas are boolean combinations of integer linear atoms
//   0 < t, 0 = t, d | t, not (d | t)
// with t an integer linear combination of the index variables. Working over
// the naturals bounds every solution from below, so only the lower-bound
// (B-set) expansion is needed: there is no minus-infinity disjunct.
// Equations x = e with unit coefficient are substituted away before any
// expansion takes place.

namespace ergo {
namespace {

using std::int64_t;

struct Lin {
  std::map<std::string, int64_t> coef;
  int64_t k = 0;

  bool is_const() const { return coef.empty(); }
  bool mentions(const std::string& v) const { return coef.count(v) != 0; }
  int64_t coeff(const std::string& v) const {
    auto it = coef.find(v);
    return it == coef.end() ? 0 : it->second;
  }
};

Lin lin_add(const Lin& a, const Lin& b) {
  Lin r = a;
  r.k += b.k;
  for (auto& [v, c] : b.coef) {
    int64_t n = r.coeff(v) + c;
    if (n == 0)
      r.coef.erase(v);
    else
      r.coef[v] = n;
  }
  return r;
}

Lin lin_scale(int64_t s, const Lin& a) {
  Lin r;
  if (s == 0) return r;
  r.k = s * a.k;
  for (auto& [v, c] : a.coef) r.coef[v] = s * c;
  return r;
}

Lin lin_sub(const Lin& a, const Lin& b) { return lin_add(a, lin_scale(-1, b)); }

Lin lin_of(const Exp& e) {
  switch (e.kind()) {
    case Exp::Kind::Const: {
      Lin r;
      r.k = static_cast<int64_t>(e.value());
      return r;
    }
    case Exp::Kind::Var: {
      Lin r;
      r.coef[e.name()] = 1;
      return r;
    }
    case Exp::Kind::Add: return lin_add(lin_of(e.lhs()), lin_of(e.rhs()));
    case Exp::Kind::Sub: return lin_sub(lin_of(e.lhs()), lin_of(e.rhs()));
    case Exp::Kind::Mul:
      return lin_scale(static_cast<int64_t>(e.value()), lin_of(e.operand()));
  }
  throw std::logic_error("lin_of: bad kind");
}

// Substitute variable -> term within a linear combination.
Lin lin_subst(const Lin& a, const std::string& v, const Lin& t) {
  Lin r = a;
  int64_t c = r.coeff(v);
  if (c == 0) return r;
  r.coef.erase(v);
  return lin_add(r, lin_scale(c, t));
}

struct Form;
using FormP = std::shared_ptr<const Form>;

struct Form {
  enum K { True, False, Lt, Eq, Dvd, NotDvd, And, Or, Not, Ex, All } k;
  Lin t;          // Lt: 0 < t; Eq: 0 = t; Dvd/NotDvd: d | t
  int64_t d = 0;  // divisor
  std::vector<FormP> kids;
  std::string var;  // Ex / All
};

FormP mk(Form f) { return std::make_shared<Form>(std::move(f)); }
FormP mk_true() { return mk({Form::True, {}, 0, {}, {}}); }
FormP mk_false() { return mk({Form::False, {}, 0, {}, {}}); }
FormP mk_lt(Lin t) { return mk({Form::Lt, std::move(t), 0, {}, {}}); }
FormP mk_eq(Lin t) { return mk({Form::Eq, std::move(t), 0, {}, {}}); }
FormP mk_dvd(int64_t d, Lin t) { return mk({Form::Dvd, std::move(t), d, {}, {}}); }
FormP mk_ndvd(int64_t d, Lin t) { return mk({Form::NotDvd, std::move(t), d, {}, {}}); }
FormP mk_and(std::vector<FormP> kids) { return mk({Form::And, {}, 0, std::move(kids), {}}); }
FormP mk_or(std::vector<FormP> kids) { return mk({Form::Or, {}, 0, std::move(kids), {}}); }
FormP mk_not(FormP f) { return mk({Form::Not, {}, 0, {std::move(f)}, {}}); }

bool divides(int64_t d, int64_t n) {
  return d != 0 && n % d == 0;
}

// Bottom-up simplification: ground atoms fold, and/or flatten and absorb.
FormP simplify(const FormP& f) {
  switch (f->k) {
    case Form::True:
    case Form::False: return f;
    case Form::Lt:
      if (f->t.is_const()) return f->t.k > 0 ? mk_true() : mk_false();
      return f;
    case Form::Eq:
      if (f->t.is_const()) return f->t.k == 0 ? mk_true() : mk_false();
      return f;
    case Form::Dvd:
      if (f->d == 1) return mk_true();
      if (f->t.is_const()) return divides(f->d, f->t.k) ? mk_true() : mk_false();
      return f;
    case Form::NotDvd:
      if (f->d == 1) return mk_false();
      if (f->t.is_const()) return divides(f->d, f->t.k) ? mk_false() : mk_true();
      return f;
    case Form::And: {
      std::vector<FormP> kids;
      for (auto& kid : f->kids) {
        FormP s = simplify(kid);
        if (s->k == Form::False) return mk_false();
        if (s->k == Form::True) continue;
        if (s->k == Form::And) {
          kids.insert(kids.end(), s->kids.begin(), s->kids.end());
        } else {
          kids.push_back(s);
        }
      }
      if (kids.empty()) return mk_true();
      if (kids.size() == 1) return kids[0];
      return mk_and(std::move(kids));
    }
    case Form::Or: {
      std::vector<FormP> kids;
      for (auto& kid : f->kids) {
        FormP s = simplify(kid);
        if (s->k == Form::True) return mk_true();
        if (s->k == Form::False) continue;
        if (s->k == Form::Or) {
          kids.insert(kids.end(), s->kids.begin(), s->kids.end());
        } else {
          kids.push_back(s);
        }
      }
      if (kids.empty()) return mk_false();
      if (kids.size() == 1) return kids[0];
      return mk_or(std::move(kids));
    }
    case Form::Not: {
      FormP s = simplify(f->kids[0]);
      if (s->k == Form::True) return mk_false();
      if (s->k == Form::False) return mk_true();
      if (s->k == Form::Not) return s->kids[0];
      return mk_not(std::move(s));
    }
    case Form::Ex:
    case Form::All: {
      Form g = *f;
      g.kids = {simplify(f->kids[0])};
      if (g.kids[0]->k == Form::True) return mk_true();
      if (g.kids[0]->k == Form::False) return mk_false();
      return mk(std::move(g));
    }
  }
  throw std::logic_error("simplify: bad kind");
}

// Negation normal form for quantifier-free formulas. Negations vanish into
// atoms: ~(0 < t) = 0 < 1 - t and ~(0 = t) = (0 < t) \/ (0 < -t) over the
// integers; only negated divisibility survives as an atom.
FormP nnf(const FormP& f, bool positive) {
  switch (f->k) {
    case Form::True: return positive ? mk_true() : mk_false();
    case Form::False: return positive ? mk_false() : mk_true();
    case Form::Lt: {
      if (positive) return f;
      Lin t;
      t.k = 1;
      return mk_lt(lin_sub(t, f->t));
    }
    case Form::Eq: {
      if (positive) return f;
      return mk_or({mk_lt(f->t), mk_lt(lin_scale(-1, f->t))});
    }
    case Form::Dvd: return positive ? f : mk_ndvd(f->d, f->t);
    case Form::NotDvd: return positive ? f : mk_dvd(f->d, f->t);
    case Form::And: {
      std::vector<FormP> kids;
      kids.reserve(f->kids.size());
      for (auto& kid : f->kids) kids.push_back(nnf(kid, positive));
      return positive ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    case Form::Or: {
      std::vector<FormP> kids;
      kids.reserve(f->kids.size());
      for (auto& kid : f->kids) kids.push_back(nnf(kid, positive));
      return positive ? mk_or(std::move(kids)) : mk_and(std::move(kids));
    }
    case Form::Not: return nnf(f->kids[0], !positive);
    case Form::Ex:
    case Form::All:
      throw std::logic_error("nnf: quantifier in quantifier-free formula");
  }
  throw std::logic_error("nnf: bad kind");
}

bool form_mentions(const FormP& f, const std::string& v) {
  switch (f->k) {
    case Form::True:
    case Form::False: return false;
    case Form::Lt:
    case Form::Eq:
    case Form::Dvd:
    case Form::NotDvd: return f->t.mentions(v);
    default:
      for (auto& kid : f->kids)
        if (form_mentions(kid, v)) return true;
      return false;
  }
}

// Map every atom through fn (used for coefficient normalization and for
// substituting candidate solutions).
FormP map_atoms(const FormP& f, const std::function<FormP(const Form&)>& fn) {
  switch (f->k) {
    case Form::Lt:
    case Form::Eq:
    case Form::Dvd:
    case Form::NotDvd: return fn(*f);
    case Form::And:
    case Form::Or: {
      Form g = *f;
      g.kids.clear();
      for (auto& kid : f->kids) g.kids.push_back(map_atoms(kid, fn));
      return mk(std::move(g));
    }
    case Form::True:
    case Form::False: return f;
    default: throw std::logic_error("map_atoms: unexpected node");
  }
}

FormP subst_var(const FormP& f, const std::string& v, const Lin& t) {
  return map_atoms(f, [&](const Form& a) {
    Form g = a;
    g.t = lin_subst(a.t, v, t);
    return mk(std::move(g));
  });
}

void collect_conjuncts(const FormP& f, std::vector<FormP>& out) {
  if (f->k == Form::And) {
    for (auto& kid : f->kids) collect_conjuncts(kid, out);
  } else {
    out.push_back(f);
  }
}

int64_t lcm64(int64_t a, int64_t b) { return a / std::gcd(a, b) * b; }
int64_t iabs(int64_t a) { return a < 0 ? -a : a; }

FormP eliminate_ex(const std::string& x, const FormP& input);

// Eliminate an existential over one conjunction (no Or at the root).
FormP eliminate_conjunction(const std::string& x, const FormP& f) {
  std::vector<FormP> conjs;
  collect_conjuncts(f, conjs);

  // Optimization: substitute equations x = e away instead of expanding.
  for (size_t i = 0; i < conjs.size(); ++i) {
    const FormP& c = conjs[i];
    if (c->k != Form::Eq) continue;
    int64_t xc = c->t.coeff(x);
    if (xc != 1 && xc != -1) continue;
    Lin rest = c->t;
    rest.coef.erase(x);
    Lin sol = xc == 1 ? lin_scale(-1, rest) : rest;  // 0 = xc*x + rest
    // x ranges over naturals: require 0 <= sol.
    Lin guard = sol;
    guard.k += 1;
    std::vector<FormP> out;
    out.push_back(mk_lt(guard));
    for (size_t j = 0; j < conjs.size(); ++j) {
      if (j == i) continue;
      out.push_back(subst_var(conjs[j], x, sol));
    }
    return simplify(mk_and(std::move(out)));
  }

  // Normalize coefficients of x to +-m, where m is their lcm, then read the
  // atoms as constraints on y = m*x with the divisibility m | y.
  int64_t m = 1;
  bool seen = false;
  std::function<void(const FormP&)> scan = [&](const FormP& g) {
    switch (g->k) {
      case Form::Lt:
      case Form::Eq:
      case Form::Dvd:
      case Form::NotDvd: {
        int64_t c = g->t.coeff(x);
        if (c != 0) {
          m = lcm64(m, iabs(c));
          seen = true;
        }
        return;
      }
      default:
        for (auto& kid : g->kids) scan(kid);
        return;
    }
  };
  scan(f);
  if (!seen) return simplify(f);

  FormP scaled = map_atoms(f, [&](const Form& a) -> FormP {
    int64_t c = a.t.coeff(x);
    if (c == 0) return mk(Form(a));
    int64_t s = m / iabs(c);
    Form g = a;
    g.t = lin_scale(s, a.t);
    if (a.k == Form::Dvd || a.k == Form::NotDvd) g.d = a.d * s;
    // replace m*x by y with unit coefficient
    int64_t yc = g.t.coeff(x) > 0 ? 1 : -1;
    g.t.coef.erase(x);
    g.t.coef[x] = yc;
    return mk(std::move(g));
  });
  std::vector<FormP> pieces{scaled};
  if (m > 1) {
    Lin y;
    y.coef[x] = 1;
    pieces.push_back(mk_dvd(m, y));
  }
  FormP body = mk_and(std::move(pieces));

  // Divisor lcm and B-set of lower-bound terms.
  int64_t bigd = 1;
  std::vector<Lin> bset;
  auto push_b = [&](const Lin& b) {
    for (auto& seenb : bset) {
      if (seenb.k == b.k && seenb.coef == b.coef) return;
    }
    bset.push_back(b);
  };
  std::function<void(const FormP&)> harvest = [&](const FormP& g) {
    switch (g->k) {
      case Form::Lt: {
        if (g->t.coeff(x) == 1) {
          Lin b = g->t;  // 0 < y + t  =>  y > -t
          b.coef.erase(x);
          push_b(lin_scale(-1, b));
        }
        return;
      }
      case Form::Eq: {
        int64_t c = g->t.coeff(x);
        if (c != 0) {
          Lin rest = g->t;
          rest.coef.erase(x);
          Lin s = c == 1 ? lin_scale(-1, rest) : rest;  // y = s
          s.k -= 1;
          push_b(s);
        }
        return;
      }
      case Form::Dvd:
      case Form::NotDvd:
        if (g->t.coeff(x) != 0) bigd = lcm64(bigd, g->d);
        return;
      default:
        for (auto& kid : g->kids) harvest(kid);
        return;
    }
  };
  harvest(body);
  {
    Lin minus1;
    minus1.k = -1;
    push_b(minus1);  // natural-number lower bound x >= 0
  }

  std::vector<FormP> disjuncts;
  for (const Lin& b : bset) {
    for (int64_t j = 1; j <= bigd; ++j) {
      Lin cand = b;
      cand.k += j;
      Lin guard = cand;
      guard.k += 1;  // 0 <= cand
      FormP piece = mk_and({mk_lt(guard), subst_var(body, x, cand)});
      piece = simplify(piece);
      if (piece->k == Form::True) return mk_true();
      if (piece->k != Form::False) disjuncts.push_back(piece);
    }
  }
  return simplify(mk_or(std::move(disjuncts)));
}

// Eliminate exists x from a quantifier-free formula.
FormP eliminate_ex(const std::string& x, const FormP& input) {
  FormP f = simplify(nnf(simplify(input), true));
  if (!form_mentions(f, x)) return f;
  if (f->k == Form::Or) {
    std::vector<FormP> kids;
    kids.reserve(f->kids.size());
    for (auto& kid : f->kids) kids.push_back(eliminate_ex(x, kid));
    return simplify(mk_or(std::move(kids)));
  }
  return eliminate_conjunction(x, f);
}

// Eliminate all quantifiers, innermost first.
FormP qe_form(const FormP& f) {
  switch (f->k) {
    case Form::Ex: return eliminate_ex(f->var, qe_form(f->kids[0]));
    case Form::All:
      return simplify(
          mk_not(eliminate_ex(f->var, simplify(nnf(qe_form(f->kids[0]), false)))));
    case Form::And:
    case Form::Or:
    case Form::Not: {
      Form g = *f;
      g.kids.clear();
      for (auto& kid : f->kids) g.kids.push_back(qe_form(kid));
      return simplify(mk(std::move(g)));
    }
    default: return f;
  }
}

FormP to_form(const Prop& p) {
  switch (p.kind()) {
    case Prop::Kind::Eq: return mk_eq(lin_sub(lin_of(p.exp_lhs()), lin_of(p.exp_rhs())));
    case Prop::Kind::Gt: return mk_lt(lin_sub(lin_of(p.exp_lhs()), lin_of(p.exp_rhs())));
    case Prop::Kind::Top: return mk_true();
    case Prop::Kind::Bot: return mk_false();
    case Prop::Kind::And: return mk_and({to_form(p.lhs()), to_form(p.rhs())});
    case Prop::Kind::Or: return mk_or({to_form(p.lhs()), to_form(p.rhs())});
    case Prop::Kind::Not: return mk_not(to_form(p.body()));
    case Prop::Kind::Divides:
      return mk_dvd(static_cast<int64_t>(p.divisor()), lin_of(p.divided()));
    case Prop::Kind::Exists:
      return mk({Form::Ex, {}, 0, {to_form(p.body())}, p.var()});
    case Prop::Kind::Forall:
      return mk({Form::All, {}, 0, {to_form(p.body())}, p.var()});
  }
  throw std::logic_error("to_form: bad kind");
}

// Split an integer linear combination into natural-valued sides so the
// resulting proposition evaluates without subtraction.
void split_sides(const Lin& t, Exp& pos, Exp& neg) {
  bool has_pos = false, has_neg = false;
  Exp p = Exp::num(0), n = Exp::num(0);
  auto add_term = [](Exp acc, bool has, Exp term) {
    return has ? Exp::add(std::move(acc), std::move(term)) : std::move(term);
  };
  for (auto& [v, c] : t.coef) {
    Exp term = c == 1 || c == -1 ? Exp::var(v)
                                 : Exp::mul(static_cast<uint64_t>(iabs(c)), Exp::var(v));
    if (c > 0) {
      p = add_term(std::move(p), has_pos, std::move(term));
      has_pos = true;
    } else {
      n = add_term(std::move(n), has_neg, std::move(term));
      has_neg = true;
    }
  }
  if (t.k > 0) {
    p = add_term(std::move(p), has_pos, Exp::num(static_cast<uint64_t>(t.k)));
    has_pos = true;
  } else if (t.k < 0) {
    n = add_term(std::move(n), has_neg, Exp::num(static_cast<uint64_t>(-t.k)));
    has_neg = true;
  }
  pos = has_pos ? p : Exp::num(0);
  neg = has_neg ? n : Exp::num(0);
}

Prop from_form(const FormP& f) {
  switch (f->k) {
    case Form::True: return Prop::top();
    case Form::False: return Prop::bot();
    case Form::Lt: {
      Exp pos, neg;
      split_sides(f->t, pos, neg);
      return Prop::gt(pos, neg);  // 0 < t  iff  pos > neg
    }
    case Form::Eq: {
      Exp pos, neg;
      split_sides(f->t, pos, neg);
      return Prop::eq(pos, neg);
    }
    case Form::Dvd:
    case Form::NotDvd: {
      // d | pos - neg  iff  d | pos + (d-1)*neg, keeping the operand natural.
      Exp pos, neg;
      split_sides(f->t, pos, neg);
      uint64_t d = static_cast<uint64_t>(f->d);
      Exp operand = pos;
      bool neg_zero = neg.kind() == Exp::Kind::Const && neg.value() == 0;
      if (!neg_zero) operand = Exp::add(std::move(operand), Exp::mul(d - 1, std::move(neg)));
      Prop dv = Prop::divides(d, std::move(operand));
      return f->k == Form::Dvd ? dv : Prop::neg(dv);
    }
    case Form::And: {
      Prop acc = from_form(f->kids[0]);
      for (size_t i = 1; i < f->kids.size(); ++i)
        acc = Prop::conj(std::move(acc), from_form(f->kids[i]));
      return acc;
    }
    case Form::Or: {
      Prop acc = from_form(f->kids[0]);
      for (size_t i = 1; i < f->kids.size(); ++i)
        acc = Prop::disj(std::move(acc), from_form(f->kids[i]));
      return acc;
    }
    case Form::Not: return Prop::neg(from_form(f->kids[0]));
    case Form::Ex:
    case Form::All: throw std::logic_error("from_form: residual quantifier");
  }
  throw std::logic_error("from_form: bad kind");
}

void require_within(const VarCtx& vars, const Prop& p, const char* role) {
  std::vector<std::string> fv;
  p.free_vars(fv);
  for (auto& v : fv)
    if (!vars.contains(v))
      throw std::invalid_argument(std::string("entails: free variable '") + v +
                                  "' of " + role + " outside the variable context");
}

}  // namespace

Prop qe_cooper(const Prop& p) {
  return from_form(qe_form(simplify(to_form(p))));
}

bool entails(const VarCtx& vars, const Prop& constraint, const Prop& phi) {
  require_within(vars, constraint, "the constraint");
  require_within(vars, phi, "the proposition");
  // forall V. C -> phi  ==  not exists V. C /\ not phi
  FormP f = mk_and({to_form(constraint), mk_not(to_form(phi))});
  f = qe_form(simplify(f));
  const auto& names = vars.names();
  for (auto it = names.rbegin(); it != names.rend(); ++it) f = eliminate_ex(*it, f);
  f = simplify(f);
  if (f->k == Form::True) return false;
  if (f->k == Form::False) return true;
  throw std::logic_error("entails: residual formula after elimination");
}

bool unsatisfiable(const VarCtx& vars, const Prop& constraint) {
  return entails(vars, constraint, Prop::bot());
}

NatCheck check_nat(const VarCtx& vars, const Prop& constraint, const Exp& e) {
  switch (e.kind()) {
    case Exp::Kind::Const:
    case Exp::Kind::Var: return {true, {}};
    case Exp::Kind::Add: {
      NatCheck l = check_nat(vars, constraint, e.lhs());
      if (!l.ok) return l;
      return check_nat(vars, constraint, e.rhs());
    }
    case Exp::Kind::Mul: return check_nat(vars, constraint, e.operand());
    case Exp::Kind::Sub: {
      NatCheck l = check_nat(vars, constraint, e.lhs());
      if (!l.ok) return l;
      NatCheck r = check_nat(vars, constraint, e.rhs());
      if (!r.ok) return r;
      if (!entails(vars, constraint, Prop::ge(e.lhs(), e.rhs()))) return {false, e};
      return {true, {}};
    }
  }
  throw std::logic_error("check_nat: bad kind");
}

Linearized linearize_exp(const Exp& e) {
  Lin t = lin_of(e);
  Linearized out;
  if (t.k < 0) return out;
  for (auto& [_, c] : t.coef)
    if (c < 0) return out;
  out.ok = true;
  bool has = false;
  Exp acc = Exp::num(0);
  for (auto& [v, c] : t.coef) {
    Exp term = c == 1 ? Exp::var(v) : Exp::mul(static_cast<uint64_t>(c), Exp::var(v));
    acc = has ? Exp::add(std::move(acc), std::move(term)) : std::move(term);
    has = true;
  }
  if (t.k > 0 || !has) {
    Exp term = Exp::num(static_cast<uint64_t>(t.k));
    acc = has ? Exp::add(std::move(acc), std::move(term)) : std::move(term);
    has = true;
  }
  out.exp = acc;
  out.is_zero = t.k == 0 && t.coef.empty();
  return out;
}

}  // namespace ergo

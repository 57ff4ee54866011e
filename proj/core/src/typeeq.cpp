#include "ergo/typeeq.hpp"

#include <algorithm>
#include <set>

namespace ergo {

namespace {

// The constraint obligations the label-choosing party incurs right after
// selecting this branch: assert prefixes of an internal-choice branch,
// assume prefixes of an external-choice branch. A branch whose obligations
// are unsatisfiable can never be selected and is invisible to equality.
Prop branch_obligations(const Signature& sig, const Type& branch, bool internal,
                        const Prop& base) {
  Prop acc = base;
  Type cur = branch;
  std::set<std::string> seen;
  for (;;) {
    if (cur.kind() == Type::Kind::Name) {
      if (!seen.insert(cur.id()).second) return acc;
      cur = unfold(sig, cur);
      continue;
    }
    if (internal && cur.kind() == Type::Kind::Assert) {
      acc = Prop::conj(acc, cur.prop());
      cur = cur.cont();
    } else if (!internal && cur.kind() == Type::Kind::Assume) {
      acc = Prop::conj(acc, cur.prop());
      cur = cur.cont();
    } else if (cur.kind() == Type::Kind::PayPot || cur.kind() == Type::Kind::GetPot) {
      cur = cur.cont();
    } else {
      return acc;
    }
  }
}

struct EqChecker {
  const Signature& sig;
  std::vector<EqAssumption> gamma;

  bool blocked(const std::string& n1, const std::string& n2) const {
    for (auto& g : gamma)
      if ((g.name1 == n1 && g.name2 == n2) || (g.name1 == n2 && g.name2 == n1))
        return true;
    return false;
  }

  // def rule: an assumption forall V'. C' => V1<E1> == V2<E2> discharges the
  // goal when V ; C |= exists V'. C' /\ E1 = e1 /\ E2 = e2.
  bool def_applies(const VarCtx& vars, const Prop& c, const Type& a, const Type& b) {
    for (auto& g : gamma) {
      if (g.name1 != a.id() || g.name2 != b.id()) continue;
      // Rename the assumption's variables apart from the goal's context.
      std::vector<std::string> avoid = vars.names();
      std::vector<std::string> renamed;
      Subst rn;
      for (auto& v : g.vars) {
        std::string f = fresh_name(v + "'", avoid);
        avoid.push_back(f);
        renamed.push_back(f);
        rn[v] = Exp::var(f);
      }
      Prop body = subst_idx(g.constraint, rn);
      for (size_t i = 0; i < g.args1.size(); ++i)
        body = Prop::conj(body, Prop::eq(subst_idx(g.args1[i], rn), a.args()[i]));
      for (size_t i = 0; i < g.args2.size(); ++i)
        body = Prop::conj(body, Prop::eq(subst_idx(g.args2[i], rn), b.args()[i]));
      for (auto it = renamed.rbegin(); it != renamed.rend(); ++it)
        body = Prop::exists(*it, body);
      if (entails(vars, c, body)) return true;
    }
    return false;
  }

  EqVerdict eq(const VarCtx& vars, const Prop& c, const Type& a, const Type& b,
               std::vector<std::string>& path) {
    if (a.kind() == Type::Kind::Name && b.kind() == Type::Kind::Name) {
      if (unsatisfiable(vars, c)) return EqVerdict::eq();
      // refl: same name, provably equal indices
      if (a.id() == b.id() && a.args().size() == b.args().size()) {
        Prop all = Prop::top();
        for (size_t i = 0; i < a.args().size(); ++i)
          all = Prop::conj(all, Prop::eq(a.args()[i], b.args()[i]));
        if (entails(vars, c, all)) return EqVerdict::eq();
      }
      if (def_applies(vars, c, a, b)) return EqVerdict::eq();
      if (blocked(a.id(), b.id())) return EqVerdict::unknown();
      gamma.push_back(
          EqAssumption{vars.names(), c, a.id(), a.args(), b.id(), b.args()});
      EqVerdict v = eq(vars, c, unfold(sig, a), unfold(sig, b), path);
      gamma.pop_back();
      return v;
    }

    Type ua = unfold(sig, a);
    Type ub = unfold(sig, b);
    if (ua.kind() != ub.kind()) {
      path.push_back("constructor mismatch: " + show_kind(ua) + " vs " + show_kind(ub));
      return EqVerdict::neq(path);
    }
    switch (ua.kind()) {
      case Type::Kind::IChoice:
      case Type::Kind::EChoice: {
        bool internal = ua.kind() == Type::Kind::IChoice;
        std::set<std::string> la, lb;
        for (auto& [l, _] : ua.branches()) la.insert(l);
        for (auto& [l, _] : ub.branches()) lb.insert(l);
        if (la != lb) {
          // Branches that can never be selected do not count.
          auto live = [&](const Type& t, const std::string& l) {
            return !unsatisfiable(vars,
                                  branch_obligations(sig, *t.find_branch(l), internal, c));
          };
          std::set<std::string> live_a, live_b;
          for (auto& l : la)
            if (live(ua, l)) live_a.insert(l);
          for (auto& l : lb)
            if (live(ub, l)) live_b.insert(l);
          if (live_a != live_b) {
            path.push_back("label sets differ");
            return EqVerdict::neq(path);
          }
          la = std::move(live_a);
        }
        for (auto& [l, ta] : ua.branches()) {
          if (!la.count(l)) continue;
          path.push_back(l);
          EqVerdict v = eq(vars, c, ta, *ub.find_branch(l), path);
          if (!v.equal()) return v;
          path.pop_back();
        }
        return EqVerdict::eq();
      }
      case Type::Kind::Tensor:
      case Type::Kind::Lolli: {
        const char* op = ua.kind() == Type::Kind::Tensor ? "*" : "-o";
        path.push_back(std::string("left of ") + op);
        EqVerdict v = eq(vars, c, ua.left(), ub.left(), path);
        if (!v.equal()) return v;
        path.pop_back();
        path.push_back(std::string("right of ") + op);
        v = eq(vars, c, ua.right(), ub.right(), path);
        if (!v.equal()) return v;
        path.pop_back();
        return EqVerdict::eq();
      }
      case Type::Kind::One: return EqVerdict::eq();
      case Type::Kind::Assert:
      case Type::Kind::Assume: {
        if (!entails(vars, c, Prop::iff(ua.prop(), ub.prop()))) {
          path.push_back("constraints not equivalent: " + show(ua.prop()) + " vs " +
                         show(ub.prop()));
          return EqVerdict::neq(path);
        }
        return eq(vars, Prop::conj(c, ua.prop()), ua.cont(), ub.cont(), path);
      }
      case Type::Kind::Exists:
      case Type::Kind::Forall: {
        std::vector<std::string> avoid = vars.names();
        ua.cont().free_idx_vars(avoid);
        ub.cont().free_idx_vars(avoid);
        std::string k = fresh_name("k", avoid);
        Type ta = subst_idx(ua.cont(), Subst{{ua.bound_var(), Exp::var(k)}});
        Type tb = subst_idx(ub.cont(), Subst{{ub.bound_var(), Exp::var(k)}});
        return eq(vars.extended(k), c, ta, tb, path);
      }
      case Type::Kind::PayPot:
      case Type::Kind::GetPot: {
        if (!entails(vars, c, Prop::eq(ua.potential(), ub.potential()))) {
          path.push_back("potentials not equal: " + show(ua.potential()) + " vs " +
                         show(ub.potential()));
          return EqVerdict::neq(path);
        }
        return eq(vars, c, ua.cont(), ub.cont(), path);
      }
      case Type::Kind::Name: break;  // unreachable: handled above
    }
    throw std::logic_error("type_equal: unreachable");
  }

  static std::string show_kind(const Type& t) {
    switch (t.kind()) {
      case Type::Kind::IChoice: return "+{...}";
      case Type::Kind::EChoice: return "&{...}";
      case Type::Kind::Tensor: return "*";
      case Type::Kind::Lolli: return "-o";
      case Type::Kind::One: return "1";
      case Type::Kind::Name: return "name";
      case Type::Kind::Assert: return "?{...}";
      case Type::Kind::Assume: return "!{...}";
      case Type::Kind::Exists: return "?n.";
      case Type::Kind::Forall: return "!n.";
      case Type::Kind::PayPot: return "|{r}>";
      case Type::Kind::GetPot: return "<{r}|";
    }
    return "?";
  }
};

}  // namespace

EqVerdict type_equal(const Signature& sig, const VarCtx& vars, const Prop& constraint,
                     const Type& a, const Type& b) {
  if (unsatisfiable(vars, constraint)) return EqVerdict::eq();
  EqChecker ck{sig, {}};
  std::vector<std::string> path;
  return ck.eq(vars, constraint, a, b, path);
}

namespace {

bool bisim(const Signature& sa, const Type& a, const Signature& sb, const Type& b,
           unsigned depth) {
  if (depth == 0) return true;
  Type ua = unfold(sa, a);
  Type ub = unfold(sb, b);
  if (ua.kind() != ub.kind()) return false;
  switch (ua.kind()) {
    case Type::Kind::IChoice:
    case Type::Kind::EChoice: {
      bool internal = ua.kind() == Type::Kind::IChoice;
      auto live = [&](const Signature& s, const Type& branch) {
        return eval_prop(branch_obligations(s, branch, internal, Prop::top()));
      };
      std::set<std::string> la, lb;
      for (auto& [l, t] : ua.branches())
        if (live(sa, t)) la.insert(l);
      for (auto& [l, t] : ub.branches())
        if (live(sb, t)) lb.insert(l);
      if (la != lb) return false;
      for (auto& [l, ta] : ua.branches())
        if (la.count(l) && !bisim(sa, ta, sb, *ub.find_branch(l), depth - 1)) return false;
      return true;
    }
    case Type::Kind::Tensor:
    case Type::Kind::Lolli:
      return bisim(sa, ua.left(), sb, ub.left(), depth - 1) &&
             bisim(sa, ua.right(), sb, ub.right(), depth - 1);
    case Type::Kind::One: return true;
    case Type::Kind::Assert:
    case Type::Kind::Assume: {
      bool pa = eval_prop(ua.prop());
      bool pb = eval_prop(ub.prop());
      if (pa && pb) return bisim(sa, ua.cont(), sb, ub.cont(), depth - 1);
      return !pa && !pb;
    }
    case Type::Kind::Exists:
    case Type::Kind::Forall: {
      for (uint64_t i : {uint64_t{0}, uint64_t{1}, uint64_t{2}, uint64_t{5}}) {
        Type ta = subst_idx(ua.cont(), Subst{{ua.bound_var(), Exp::num(i)}});
        Type tb = subst_idx(ub.cont(), Subst{{ub.bound_var(), Exp::num(i)}});
        if (!bisim(sa, ta, sb, tb, depth - 1)) return false;
      }
      return true;
    }
    case Type::Kind::PayPot:
    case Type::Kind::GetPot:
      return eval_exp(ua.potential()) == eval_exp(ub.potential()) &&
             bisim(sa, ua.cont(), sb, ub.cont(), depth - 1);
    case Type::Kind::Name: break;
  }
  throw std::logic_error("bisim: unreachable");
}

}  // namespace

bool bounded_bisim_oracle(const Signature& sig, const Type& a, const Type& b,
                          unsigned depth) {
  return bisim(sig, a, sig, b, depth);
}

bool bounded_bisim_oracle(const Signature& sig_a, const Type& a, const Signature& sig_b,
                          const Type& b, unsigned depth) {
  return bisim(sig_a, a, sig_b, b, depth);
}

}  // namespace ergo

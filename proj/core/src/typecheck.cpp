#include "ergo/typecheck.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "ergo/typeeq.hpp"

namespace ergo {

const char* err_category_name(ErrCat c) {
  switch (c) {
    case ErrCat::LabelMismatch: return "label mismatch";
    case ErrCat::AssertionNotEntailed: return "assertion not entailed";
    case ErrCat::InsufficientPotential: return "insufficient potential";
    case ErrCat::ChannelMisuse: return "channel misuse";
    case ErrCat::LeftoverContext: return "leftover context";
    case ErrCat::TypeMismatch: return "type mismatch";
    case ErrCat::UnknownName: return "unknown name";
    case ErrCat::NotImpossible: return "not impossible";
  }
  return "error";
}

namespace {

using Delta = std::vector<std::pair<std::string, Type>>;

Type* delta_find(Delta& d, const std::string& c) {
  for (auto& [k, v] : d)
    if (k == c) return &v;
  return nullptr;
}

void delta_remove(Delta& d, const std::string& c) {
  d.erase(std::remove_if(d.begin(), d.end(), [&](auto& kv) { return kv.first == c; }),
          d.end());
}

struct Checker {
  const Signature& sig;

  std::optional<CheckError> err(ErrCat cat, Span sp, std::string msg) {
    return CheckError{cat, sp, std::move(msg)};
  }

  std::string not_entailed(const Prop& c, const std::string& rhs) {
    return show(c) + " |/= " + rhs;
  }

  // Scope check: free index variables must be contained in V.
  std::optional<CheckError> scoped(const Sequent& s, const Exp& e, Span sp) {
    std::vector<std::string> fv;
    e.free_vars(fv);
    for (auto& v : fv)
      if (!s.vars.contains(v))
        return err(ErrCat::UnknownName, sp, "index variable " + v + " not in scope");
    return std::nullopt;
  }
  std::optional<CheckError> scoped(const Sequent& s, const Prop& p, Span sp) {
    std::vector<std::string> fv;
    p.free_vars(fv);
    for (auto& v : fv)
      if (!s.vars.contains(v))
        return err(ErrCat::UnknownName, sp, "index variable " + v + " not in scope");
    return std::nullopt;
  }

  std::optional<CheckError> nat(const Sequent& s, const Exp& e, Span sp) {
    if (auto e1 = scoped(s, e, sp)) return e1;
    NatCheck nc = check_nat(s.vars, s.constraint, e);
    if (!nc.ok)
      return err(ErrCat::AssertionNotEntailed, sp,
                 not_entailed(s.constraint,
                              show(nc.failing.lhs()) + " >= " + show(nc.failing.rhs())));
    return std::nullopt;
  }

  std::optional<CheckError> equal_types(const Sequent& s, const Type& a, const Type& b,
                                        Span sp) {
    EqVerdict v = type_equal(sig, s.vars, s.constraint, a, b);
    if (v.equal()) return std::nullopt;
    std::string msg = show_type(a, &sig) + " /= " + show_type(b, &sig);
    if (v.kind == EqVerdict::Kind::NotEqual && !v.path.empty()) {
      msg += " (at ";
      for (size_t i = 0; i < v.path.size(); ++i) {
        if (i) msg += ", ";
        msg += v.path[i];
      }
      msg += ")";
    }
    return err(ErrCat::TypeMismatch, sp, msg);
  }

  std::optional<CheckError> check(Sequent s, const Process& p) {
    switch (p.kind()) {
      case Process::Kind::Fwd: {
        if (p.chan() != s.offered_chan)
          return err(ErrCat::ChannelMisuse, p.span(),
                     "forward must provide the offered channel " + s.offered_chan);
        Type* yt = delta_find(s.delta, p.chan2());
        if (!yt)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan2());
        if (s.delta.size() > 1) {
          std::string names;
          for (auto& [c, _] : s.delta)
            if (c != p.chan2()) names += (names.empty() ? "" : ", ") + c;
          return err(ErrCat::LeftoverContext, p.span(), "unused channels: " + names);
        }
        if (!entails(s.vars, s.constraint, Prop::eq(s.potential, Exp::num(0))))
          return err(ErrCat::InsufficientPotential, p.span(),
                     not_entailed(s.constraint, show(s.potential) + " = 0"));
        return equal_types(s, *yt, s.offered, p.span());
      }
      case Process::Kind::Spawn: {
        const ProcDecl* d = sig.find_decl(p.callee());
        if (!d)
          return err(ErrCat::UnknownName, p.span(), "unknown process " + p.callee());
        if (d->params.size() != p.idx_args().size())
          return err(ErrCat::UnknownName, p.span(),
                     "process " + p.callee() + " expects " +
                         std::to_string(d->params.size()) + " indices, got " +
                         std::to_string(p.idx_args().size()));
        if (d->channels.size() != p.chan_args().size())
          return err(ErrCat::ChannelMisuse, p.span(),
                     "process " + p.callee() + " expects " +
                         std::to_string(d->channels.size()) + " channels, got " +
                         std::to_string(p.chan_args().size()));
        Subst inst;
        for (size_t i = 0; i < d->params.size(); ++i) {
          if (auto e1 = nat(s, p.idx_args()[i], p.span())) return e1;
          inst[d->params[i]] = p.idx_args()[i];
        }
        Prop need = subst_idx(d->constraint, inst);
        if (need.kind() != Prop::Kind::Top &&
            !entails(s.vars, s.constraint, need))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(s.constraint, show(need)));
        for (size_t i = 0; i < p.chan_args().size(); ++i) {
          const std::string& c = p.chan_args()[i];
          Type* at = delta_find(s.delta, c);
          if (!at)
            return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + c);
          Type want = subst_idx(d->channels[i].second, inst);
          if (auto e1 = equal_types(s, *at, want, p.span())) return e1;
          delta_remove(s.delta, c);
        }
        Exp callee_pot = subst_idx(d->potential, inst);
        if (!entails(s.vars, s.constraint, Prop::ge(s.potential, callee_pot)))
          return err(ErrCat::InsufficientPotential, p.span(),
                     not_entailed(s.constraint,
                                  show(s.potential) + " >= " + show(callee_pot)));
        if (delta_find(s.delta, p.chan()) || p.chan() == s.offered_chan)
          return err(ErrCat::ChannelMisuse, p.span(),
                     "channel " + p.chan() + " shadows an existing channel");
        s.delta.emplace_back(p.chan(), subst_idx(d->offered, inst));
        s.potential = Exp::sub(s.potential, callee_pot);
        return check(std::move(s), p.cont());
      }
      case Process::Kind::SendLabel: {
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::IChoice)
            return err(ErrCat::TypeMismatch, p.span(),
                       "label send on provider side of type " + show_type(t, &sig));
          const Type* b = t.find_branch(p.label());
          if (!b)
            return err(ErrCat::LabelMismatch, p.span(),
                       "label " + p.label() + " not among the type's labels");
          s.offered = *b;
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::EChoice)
          return err(ErrCat::TypeMismatch, p.span(),
                     "label send on client side of type " + show_type(t, &sig));
        const Type* b = t.find_branch(p.label());
        if (!b)
          return err(ErrCat::LabelMismatch, p.span(),
                     "label " + p.label() + " not among the type's labels");
        *slot = *b;
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Case: {
        bool offered = p.chan() == s.offered_chan;
        Type t;
        if (offered) {
          t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::EChoice)
            return err(ErrCat::TypeMismatch, p.span(),
                       "case on provider side of type " + show_type(t, &sig));
        } else {
          Type* slot = delta_find(s.delta, p.chan());
          if (!slot)
            return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
          t = unfold(sig, *slot);
          if (t.kind() != Type::Kind::IChoice)
            return err(ErrCat::TypeMismatch, p.span(),
                       "case on client side of type " + show_type(t, &sig));
        }
        std::set<std::string> covered;
        for (auto& [l, body] : p.branches()) {
          const Type* bt = t.find_branch(l);
          if (!bt)
            return err(ErrCat::LabelMismatch, p.span(),
                       "label " + l + " not among the type's labels");
          if (!covered.insert(l).second)
            return err(ErrCat::LabelMismatch, p.span(), "duplicate branch " + l);
          Sequent s2 = s;
          if (offered)
            s2.offered = *bt;
          else
            *delta_find(s2.delta, p.chan()) = *bt;
          if (auto e1 = check(std::move(s2), body)) return e1;
        }
        for (auto& [l, _] : t.branches())
          if (!covered.count(l))
            return err(ErrCat::LabelMismatch, p.span(), "missing branch " + l);
        return std::nullopt;
      }
      case Process::Kind::SendChan: {
        if (p.chan2() == p.chan())
          return err(ErrCat::ChannelMisuse, p.span(), "channel sent along itself");
        Type* wt = delta_find(s.delta, p.chan2());
        if (!wt)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan2());
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Tensor)
            return err(ErrCat::TypeMismatch, p.span(),
                       "channel send on provider side of type " + show_type(t, &sig));
          if (auto e1 = equal_types(s, *wt, t.left(), p.span())) return e1;
          delta_remove(s.delta, p.chan2());
          s.offered = t.right();
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Lolli)
          return err(ErrCat::TypeMismatch, p.span(),
                     "channel send on client side of type " + show_type(t, &sig));
        if (auto e1 = equal_types(s, *wt, t.left(), p.span())) return e1;
        *slot = t.right();
        delta_remove(s.delta, p.chan2());
        return check(std::move(s), p.cont());
      }
      case Process::Kind::RecvChan: {
        if (delta_find(s.delta, p.chan2()) || p.chan2() == s.offered_chan)
          return err(ErrCat::ChannelMisuse, p.span(),
                     "channel " + p.chan2() + " shadows an existing channel");
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Lolli)
            return err(ErrCat::TypeMismatch, p.span(),
                       "channel receive on provider side of type " + show_type(t, &sig));
          s.delta.emplace_back(p.chan2(), t.left());
          s.offered = t.right();
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Tensor)
          return err(ErrCat::TypeMismatch, p.span(),
                     "channel receive on client side of type " + show_type(t, &sig));
        *slot = t.right();
        s.delta.emplace_back(p.chan2(), t.left());
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Close: {
        if (p.chan() != s.offered_chan)
          return err(ErrCat::ChannelMisuse, p.span(),
                     "close must target the offered channel");
        Type t = unfold(sig, s.offered);
        if (t.kind() != Type::Kind::One)
          return err(ErrCat::TypeMismatch, p.span(),
                     "close on type " + show_type(t, &sig));
        if (!s.delta.empty()) {
          std::string names;
          for (auto& [c, _] : s.delta) names += (names.empty() ? "" : ", ") + c;
          return err(ErrCat::LeftoverContext, p.span(), "unused channels: " + names);
        }
        if (!entails(s.vars, s.constraint, Prop::eq(s.potential, Exp::num(0))))
          return err(ErrCat::InsufficientPotential, p.span(),
                     not_entailed(s.constraint, show(s.potential) + " = 0"));
        return std::nullopt;
      }
      case Process::Kind::Wait: {
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::One)
          return err(ErrCat::TypeMismatch, p.span(),
                     "wait on type " + show_type(t, &sig));
        delta_remove(s.delta, p.chan());
        return check(std::move(s), p.cont());
      }
      case Process::Kind::SendIdx: {
        if (auto e1 = nat(s, p.exp(), p.span())) return e1;
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Exists)
            return err(ErrCat::TypeMismatch, p.span(),
                       "index send on provider side of type " + show_type(t, &sig));
          s.offered = subst_idx(t.cont(), Subst{{t.bound_var(), p.exp()}});
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Forall)
          return err(ErrCat::TypeMismatch, p.span(),
                     "index send on client side of type " + show_type(t, &sig));
        *slot = subst_idx(t.cont(), Subst{{t.bound_var(), p.exp()}});
        return check(std::move(s), p.cont());
      }
      case Process::Kind::RecvIdx: {
        if (s.vars.contains(p.chan2()))
          return err(ErrCat::ChannelMisuse, p.span(),
                     "index variable " + p.chan2() + " shadows an existing variable");
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Forall)
            return err(ErrCat::TypeMismatch, p.span(),
                       "index receive on provider side of type " + show_type(t, &sig));
          s.offered = subst_idx(t.cont(), Subst{{t.bound_var(), Exp::var(p.chan2())}});
          s.vars = s.vars.extended(p.chan2());
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Exists)
          return err(ErrCat::TypeMismatch, p.span(),
                     "index receive on client side of type " + show_type(t, &sig));
        *slot = subst_idx(t.cont(), Subst{{t.bound_var(), Exp::var(p.chan2())}});
        s.vars = s.vars.extended(p.chan2());
        return check(std::move(s), p.cont());
      }
      case Process::Kind::AssertP: {
        if (auto e1 = scoped(s, p.prop(), p.span())) return e1;
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Assert)
            return err(ErrCat::TypeMismatch, p.span(),
                       "assert on provider side of type " + show_type(t, &sig));
          if (!entails(s.vars, s.constraint, p.prop()))
            return err(ErrCat::AssertionNotEntailed, p.span(),
                       not_entailed(s.constraint, show(p.prop())));
          if (!entails(s.vars, s.constraint, t.prop()))
            return err(ErrCat::AssertionNotEntailed, p.span(),
                       not_entailed(s.constraint, show(t.prop())));
          s.offered = t.cont();
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Assume)
          return err(ErrCat::TypeMismatch, p.span(),
                     "assert on client side of type " + show_type(t, &sig));
        if (!entails(s.vars, s.constraint, p.prop()))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(s.constraint, show(p.prop())));
        if (!entails(s.vars, s.constraint, t.prop()))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(s.constraint, show(t.prop())));
        *slot = t.cont();
        return check(std::move(s), p.cont());
      }
      case Process::Kind::AssumeP: {
        if (auto e1 = scoped(s, p.prop(), p.span())) return e1;
        if (p.chan() == s.offered_chan) {
          Type t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::Assume)
            return err(ErrCat::TypeMismatch, p.span(),
                       "assume on provider side of type " + show_type(t, &sig));
          if (!entails(s.vars, Prop::conj(s.constraint, t.prop()), p.prop()))
            return err(ErrCat::AssertionNotEntailed, p.span(),
                       not_entailed(Prop::conj(s.constraint, t.prop()), show(p.prop())));
          s.constraint = Prop::conj(s.constraint, p.prop());
          s.offered = t.cont();
          return check(std::move(s), p.cont());
        }
        Type* slot = delta_find(s.delta, p.chan());
        if (!slot)
          return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
        Type t = unfold(sig, *slot);
        if (t.kind() != Type::Kind::Assert)
          return err(ErrCat::TypeMismatch, p.span(),
                     "assume on client side of type " + show_type(t, &sig));
        if (!entails(s.vars, Prop::conj(s.constraint, t.prop()), p.prop()))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(Prop::conj(s.constraint, t.prop()), show(p.prop())));
        s.constraint = Prop::conj(s.constraint, p.prop());
        *slot = t.cont();
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Pay: {
        if (auto e1 = nat(s, p.exp(), p.span())) return e1;
        Type t;
        Type* slot = nullptr;
        if (p.chan() == s.offered_chan) {
          t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::PayPot)
            return err(ErrCat::TypeMismatch, p.span(),
                       "pay on provider side of type " + show_type(t, &sig));
        } else {
          slot = delta_find(s.delta, p.chan());
          if (!slot)
            return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
          t = unfold(sig, *slot);
          if (t.kind() != Type::Kind::GetPot)
            return err(ErrCat::TypeMismatch, p.span(),
                       "pay on client side of type " + show_type(t, &sig));
        }
        if (!entails(s.vars, s.constraint, Prop::ge(s.potential, p.exp())))
          return err(ErrCat::InsufficientPotential, p.span(),
                     not_entailed(s.constraint,
                                  show(s.potential) + " >= " + show(p.exp())));
        if (!entails(s.vars, s.constraint, Prop::eq(p.exp(), t.potential())))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(s.constraint,
                                  show(p.exp()) + " = " + show(t.potential())));
        s.potential = Exp::sub(s.potential, p.exp());
        if (slot)
          *slot = t.cont();
        else
          s.offered = t.cont();
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Get: {
        if (auto e1 = nat(s, p.exp(), p.span())) return e1;
        Type t;
        Type* slot = nullptr;
        if (p.chan() == s.offered_chan) {
          t = unfold(sig, s.offered);
          if (t.kind() != Type::Kind::GetPot)
            return err(ErrCat::TypeMismatch, p.span(),
                       "get on provider side of type " + show_type(t, &sig));
        } else {
          slot = delta_find(s.delta, p.chan());
          if (!slot)
            return err(ErrCat::ChannelMisuse, p.span(), "unknown channel " + p.chan());
          t = unfold(sig, *slot);
          if (t.kind() != Type::Kind::PayPot)
            return err(ErrCat::TypeMismatch, p.span(),
                       "get on client side of type " + show_type(t, &sig));
        }
        if (!entails(s.vars, s.constraint, Prop::eq(p.exp(), t.potential())))
          return err(ErrCat::AssertionNotEntailed, p.span(),
                     not_entailed(s.constraint,
                                  show(p.exp()) + " = " + show(t.potential())));
        s.potential = Exp::add(s.potential, p.exp());
        if (slot)
          *slot = t.cont();
        else
          s.offered = t.cont();
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Work: {
        if (auto e1 = nat(s, p.exp(), p.span())) return e1;
        if (!entails(s.vars, s.constraint, Prop::ge(s.potential, p.exp())))
          return err(ErrCat::InsufficientPotential, p.span(),
                     not_entailed(s.constraint,
                                  show(s.potential) + " >= " + show(p.exp())));
        s.potential = Exp::sub(s.potential, p.exp());
        return check(std::move(s), p.cont());
      }
      case Process::Kind::Impossible: {
        if (!unsatisfiable(s.vars, s.constraint))
          return err(ErrCat::NotImpossible, p.span(),
                     not_entailed(s.constraint, "false"));
        return std::nullopt;
      }
    }
    throw std::logic_error("check_process: bad kind");
  }
};

}  // namespace

std::optional<CheckError> check_process(const Signature& sig, Sequent seq,
                                        const Process& p) {
  Checker ck{sig};
  return ck.check(std::move(seq), p);
}

bool SigReport::ok() const {
  if (global) return false;
  for (auto& d : defs)
    if (!d.ok()) return false;
  return true;
}

SigReport check_signature(const Signature& parsed, SyntaxMode mode,
                          const CostModel& cost) {
  SigReport report;
  report.checked = parsed;
  try {
    parsed.validate_structure();
  } catch (const SignatureError& e) {
    report.global = Diagnostic{"malformed signature", e.what(), e.span};
    return report;
  }
  if (auto verr = check_signature_valid(parsed)) {
    report.global = Diagnostic{
        "invalid type", "index may be negative: " + show(verr->failing) +
                            (verr->path.empty() ? "" : " at " + verr->path),
        verr->span};
    return report;
  }
  if (mode == SyntaxMode::Implicit) {
    if (auto perr = check_polarizable(parsed)) {
      report.global = perr;
      return report;
    }
  }

  Signature elab = elaborate_internal_names(parsed);

  for (auto& def : parsed.defs) {
    const ProcDecl* decl_plain = parsed.find_decl(def.name);
    const ProcDecl* decl = elab.find_decl(def.name);
    DefReport dr;
    dr.name = def.name;
    Process body = def.body;

    if (mode == SyntaxMode::Implicit) {
      auto t0 = std::chrono::steady_clock::now();
      try {
        body = reconstruct_def(parsed, *decl_plain, def, cost);
      } catch (const ReconError& e) {
        dr.error = CheckError{ErrCat::TypeMismatch, e.span,
                              e.category + ": " + e.what() +
                                  (e.snapshot.empty() ? "" : "\n  in " + e.snapshot)};
        report.defs.push_back(std::move(dr));
        continue;
      }
      auto t1 = std::chrono::steady_clock::now();
      dr.recon_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      for (auto& rd : report.checked.defs)
        if (rd.name == def.name) rd.body = body;
    }

    Sequent seq;
    seq.vars = VarCtx{decl->params};
    seq.constraint = decl->constraint;
    for (size_t i = 0; i < decl->channels.size(); ++i)
      seq.delta.emplace_back(def.channel_names[i], decl->channels[i].second);
    seq.potential = decl->potential;
    seq.offered_chan = def.offered_chan;
    seq.offered = decl->offered;

    auto t0 = std::chrono::steady_clock::now();
    dr.error = check_process(elab, std::move(seq), body);
    auto t1 = std::chrono::steady_clock::now();
    dr.check_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.defs.push_back(std::move(dr));
  }
  return report;
}

Process erase(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::AssertP:
    case Process::Kind::AssumeP:
    case Process::Kind::Pay:
    case Process::Kind::Get:
    case Process::Kind::Work: return erase(p.cont());
    case Process::Kind::Case: {
      std::vector<std::pair<std::string, Process>> bs;
      for (auto& [l, b] : p.branches()) {
        Process eb = erase(b);
        if (eb.kind() == Process::Kind::Impossible) continue;
        bs.emplace_back(l, std::move(eb));
      }
      return Process::case_of(p.chan(), std::move(bs), p.span());
    }
    case Process::Kind::Fwd:
    case Process::Kind::Close:
    case Process::Kind::Impossible: return p;
    default: return p.with_cont(erase(p.cont()));
  }
}

}  // namespace ergo

#include "ergo/recon.hpp"

#include <algorithm>
#include <set>

namespace ergo {

namespace {

using Ctx = std::vector<std::pair<std::string, Type>>;

Type* ctx_find(Ctx& ctx, const std::string& c) {
  for (auto& [k, v] : ctx)
    if (k == c) return &v;
  return nullptr;
}

bool ctx_remove(Ctx& ctx, const std::string& c) {
  for (auto it = ctx.begin(); it != ctx.end(); ++it) {
    if (it->first == c) {
      ctx.erase(it);
      return true;
    }
  }
  return false;
}

// Unfolds one name step with a cycle guard for prefix chains that never
// reach a structural constructor.
Type unfold_guarded(const Signature& sig, const Type& t, std::set<std::string>& seen,
                    Span sp) {
  if (t.kind() != Type::Kind::Name) return t;
  if (!seen.insert(t.id()).second)
    throw ReconError("ill-polarized type",
                     "type " + t.id() + " has no structural unfolding", sp);
  return unfold(sig, t);
}

// Strips names and all constraint/potential prefixes: the structural shape.
Type strip_shape(const Signature& sig, Type t, Span sp) {
  std::set<std::string> seen;
  for (;;) {
    t = unfold_guarded(sig, t, seen, sp);
    switch (t.kind()) {
      case Type::Kind::Assert:
      case Type::Kind::Assume:
      case Type::Kind::PayPot:
      case Type::Kind::GetPot: t = t.cont(); break;
      default: return t;
    }
  }
}

std::string snapshot(const Ctx& delta, const Ctx& omega, const std::string& ochan,
                     const Type& otype, const Signature& sig) {
  std::string s;
  for (auto& [c, t] : delta) s += "(" + c + " : " + show_type(t, &sig) + ") ";
  s += "; ";
  for (auto& [c, t] : omega) s += "(" + c + " : " + show_type(t, &sig) + ") ";
  s += "|- (" + ochan + " : " + show_type(otype, &sig) + ")";
  return s;
}

// ---------------------------------------------------------------------------
// Branch reconstruction

struct BranchRecon {
  const Signature& sig;

  struct St {
    Ctx delta;
    std::string ochan;
    Type otype;
  };

  [[noreturn]] void bad(const std::string& msg, Span sp, const St& st) {
    throw ReconError("forcing failed", msg, sp, snapshot(st.delta, {}, st.ochan, st.otype, sig));
  }

  Type shape(const Type& t, Span sp) { return strip_shape(sig, t, sp); }

  Process go(St st, const Process& p) {
    switch (p.kind()) {
      case Process::Kind::Fwd:
      case Process::Kind::Close:
      case Process::Kind::Impossible: return p;
      case Process::Kind::Spawn: {
        const ProcDecl* d = sig.find_decl(p.callee());
        if (!d)
          throw ReconError("unknown name", "unknown process " + p.callee(), p.span());
        if (d->params.size() != p.idx_args().size())
          throw ReconError("unknown name",
                           "process " + p.callee() + " expects " +
                               std::to_string(d->params.size()) + " indices",
                           p.span());
        for (auto& c : p.chan_args())
          if (!ctx_remove(st.delta, c)) bad("unknown channel " + c, p.span(), st);
        Subst s;
        for (size_t i = 0; i < d->params.size(); ++i) s[d->params[i]] = p.idx_args()[i];
        st.delta.emplace_back(p.chan(), subst_idx(d->offered, s));
        Process cont = go(std::move(st), p.cont());
        return Process::spawn(p.chan(), p.callee(), p.idx_args(), p.chan_args(),
                              std::move(cont), p.span());
      }
      case Process::Kind::SendLabel: {
        Type* slot = nullptr;
        Type t;
        if (p.chan() == st.ochan) {
          t = shape(st.otype, p.span());
        } else {
          slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          t = shape(*slot, p.span());
        }
        if (t.kind() != Type::Kind::IChoice && t.kind() != Type::Kind::EChoice)
          bad("label send on non-choice channel " + p.chan(), p.span(), st);
        const Type* b = t.find_branch(p.label());
        if (!b)
          throw ReconError("unknown label",
                           "label " + p.label() + " not in the type of " + p.chan(),
                           p.span());
        if (slot)
          *slot = *b;
        else
          st.otype = *b;
        return Process::send_label(p.chan(), p.label(), go(std::move(st), p.cont()),
                                   p.span());
      }
      case Process::Kind::Case: {
        Type t;
        bool of_offered = p.chan() == st.ochan;
        if (of_offered) {
          t = shape(st.otype, p.span());
        } else {
          Type* slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          t = shape(*slot, p.span());
        }
        if (t.kind() != Type::Kind::IChoice && t.kind() != Type::Kind::EChoice)
          bad("case on non-choice channel " + p.chan(), p.span(), st);
        std::vector<std::pair<std::string, Process>> out;
        std::set<std::string> present;
        for (auto& [l, body] : p.branches()) {
          const Type* bt = t.find_branch(l);
          if (!bt)
            throw ReconError("unknown label",
                             "label " + l + " not in the type of " + p.chan(), p.span());
          if (!present.insert(l).second)
            throw ReconError("unknown label", "duplicate branch " + l, p.span());
          St st2 = st;
          if (of_offered)
            st2.otype = *bt;
          else
            *ctx_find(st2.delta, p.chan()) = *bt;
          out.emplace_back(l, go(std::move(st2), body));
        }
        for (auto& [l, bt] : t.branches())
          if (!present.count(l)) out.emplace_back(l, Process::impossible(p.span()));
        return Process::case_of(p.chan(), std::move(out), p.span());
      }
      case Process::Kind::SendChan: {
        if (p.chan() == st.ochan) {
          Type t = shape(st.otype, p.span());
          if (t.kind() != Type::Kind::Tensor)
            bad("channel send on non-tensor " + p.chan(), p.span(), st);
          if (!ctx_remove(st.delta, p.chan2()))
            bad("unknown channel " + p.chan2(), p.span(), st);
          st.otype = t.right();
        } else {
          Type* slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          Type t = shape(*slot, p.span());
          if (t.kind() != Type::Kind::Lolli)
            bad("channel send on non-lolli " + p.chan(), p.span(), st);
          *slot = t.right();
          if (!ctx_remove(st.delta, p.chan2()))
            bad("unknown channel " + p.chan2(), p.span(), st);
        }
        return Process::send_chan(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                  p.span());
      }
      case Process::Kind::RecvChan: {
        if (p.chan() == st.ochan) {
          Type t = shape(st.otype, p.span());
          if (t.kind() != Type::Kind::Lolli)
            bad("channel receive on non-lolli " + p.chan(), p.span(), st);
          st.delta.emplace_back(p.chan2(), t.left());
          st.otype = t.right();
        } else {
          Type* slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          Type t = shape(*slot, p.span());
          if (t.kind() != Type::Kind::Tensor)
            bad("channel receive on non-tensor " + p.chan(), p.span(), st);
          *slot = t.right();
          st.delta.emplace_back(p.chan2(), t.left());
        }
        return Process::recv_chan(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                  p.span());
      }
      case Process::Kind::Wait: {
        if (!ctx_remove(st.delta, p.chan()))
          bad("unknown channel " + p.chan(), p.span(), st);
        return Process::wait(p.chan(), go(std::move(st), p.cont()), p.span());
      }
      case Process::Kind::SendIdx: {
        if (p.chan() == st.ochan) {
          Type t = shape(st.otype, p.span());
          if (t.kind() != Type::Kind::Exists)
            bad("index send on non-existential " + p.chan(), p.span(), st);
          st.otype = subst_idx(t.cont(), Subst{{t.bound_var(), p.exp()}});
        } else {
          Type* slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          Type t = shape(*slot, p.span());
          if (t.kind() != Type::Kind::Forall)
            bad("index send on non-universal " + p.chan(), p.span(), st);
          *slot = subst_idx(t.cont(), Subst{{t.bound_var(), p.exp()}});
        }
        return Process::send_idx(p.chan(), p.exp(), go(std::move(st), p.cont()), p.span());
      }
      case Process::Kind::RecvIdx: {
        if (p.chan() == st.ochan) {
          Type t = shape(st.otype, p.span());
          if (t.kind() != Type::Kind::Forall)
            bad("index receive on non-universal " + p.chan(), p.span(), st);
          st.otype = subst_idx(t.cont(), Subst{{t.bound_var(), Exp::var(p.chan2())}});
        } else {
          Type* slot = ctx_find(st.delta, p.chan());
          if (!slot) bad("unknown channel " + p.chan(), p.span(), st);
          Type t = shape(*slot, p.span());
          if (t.kind() != Type::Kind::Exists)
            bad("index receive on non-existential " + p.chan(), p.span(), st);
          *slot = subst_idx(t.cont(), Subst{{t.bound_var(), Exp::var(p.chan2())}});
        }
        return Process::recv_idx(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                 p.span());
      }
      case Process::Kind::AssertP:
      case Process::Kind::AssumeP:
      case Process::Kind::Pay:
      case Process::Kind::Get:
      case Process::Kind::Work:
        throw ReconError("forcing failed",
                         "explicit construct in implicit source", p.span());
    }
    throw std::logic_error("recon_branches: bad kind");
  }
};

// ---------------------------------------------------------------------------
// Forcing reconstruction

struct ForceRecon {
  const Signature& sig;

  struct St {
    Ctx delta;
    Ctx omega;
    std::string ochan;
    Type otype;
  };

  struct Ins {
    Process::Kind kind;  // AssumeP / Get / AssertP / Pay
    std::string chan;
    Prop prop;
    Exp exp;
    Span span;
  };

  [[noreturn]] void bad(const std::string& msg, Span sp, const St& st) {
    throw ReconError("forcing failed", msg, sp,
                     snapshot(st.delta, st.omega, st.ochan, st.otype, sig));
  }

  static Process wrap(const std::vector<Ins>& pre, Process body) {
    for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
      switch (it->kind) {
        case Process::Kind::AssumeP:
          body = Process::assume_p(it->chan, it->prop, std::move(body), it->span);
          break;
        case Process::Kind::AssertP:
          body = Process::assert_p(it->chan, it->prop, std::move(body), it->span);
          break;
        case Process::Kind::Get:
          body = Process::get(it->chan, it->exp, std::move(body), it->span);
          break;
        case Process::Kind::Pay:
          body = Process::pay(it->chan, it->exp, std::move(body), it->span);
          break;
        default: throw std::logic_error("wrap: bad insertion");
      }
    }
    return body;
  }

  // Invertible phase: the offered type first, then the ordered context from
  // the right; assume/get are emitted eagerly.
  void invert(St& st, std::vector<Ins>& out, Span sp) {
    std::set<std::string> seen;
    for (;;) {
      Type t = unfold_guarded(sig, st.otype, seen, sp);
      if (t.kind() == Type::Kind::Assume) {
        out.push_back(Ins{Process::Kind::AssumeP, st.ochan, t.prop(), {}, sp});
        st.otype = t.cont();
      } else if (t.kind() == Type::Kind::GetPot) {
        out.push_back(Ins{Process::Kind::Get, st.ochan, {}, t.potential(), sp});
        st.otype = t.cont();
      } else {
        st.otype = t;
        break;
      }
    }
    while (!st.omega.empty()) {
      auto [c, t0] = st.omega.back();
      st.omega.pop_back();
      Type t = t0;
      std::set<std::string> seen_l;
      for (;;) {
        t = unfold_guarded(sig, t, seen_l, sp);
        if (t.kind() == Type::Kind::Assert) {
          out.push_back(Ins{Process::Kind::AssumeP, c, t.prop(), {}, sp});
          t = t.cont();
        } else if (t.kind() == Type::Kind::PayPot) {
          out.push_back(Ins{Process::Kind::Get, c, {}, t.potential(), sp});
          t = t.cont();
        } else {
          break;
        }
      }
      st.delta.emplace_back(c, t);
    }
  }

  // Lazy phase: assert/pay are flushed right before communicating.
  void force_right(St& st, std::vector<Ins>& out, Span sp) {
    std::set<std::string> seen;
    for (;;) {
      Type t = unfold_guarded(sig, st.otype, seen, sp);
      if (t.kind() == Type::Kind::Assert) {
        out.push_back(Ins{Process::Kind::AssertP, st.ochan, t.prop(), {}, sp});
        st.otype = t.cont();
      } else if (t.kind() == Type::Kind::PayPot) {
        out.push_back(Ins{Process::Kind::Pay, st.ochan, {}, t.potential(), sp});
        st.otype = t.cont();
      } else {
        st.otype = t;
        return;
      }
    }
  }

  void force_left(St& st, const std::string& c, std::vector<Ins>& out, Span sp) {
    Type* slot = ctx_find(st.delta, c);
    if (!slot) bad("unknown channel " + c, sp, st);
    std::set<std::string> seen;
    Type t = *slot;
    for (;;) {
      t = unfold_guarded(sig, t, seen, sp);
      if (t.kind() == Type::Kind::Assume) {
        out.push_back(Ins{Process::Kind::AssertP, c, t.prop(), {}, sp});
        t = t.cont();
      } else if (t.kind() == Type::Kind::GetPot) {
        out.push_back(Ins{Process::Kind::Pay, c, {}, t.potential(), sp});
        t = t.cont();
      } else {
        break;
      }
    }
    *slot = t;
  }

  Process go(St st, const Process& p) {
    std::vector<Ins> pre;
    invert(st, pre, p.span());
    Process core = stable(std::move(st), p, pre);
    return wrap(pre, std::move(core));
  }

  Process stable(St st, const Process& p, std::vector<Ins>& pre) {
    switch (p.kind()) {
      case Process::Kind::Fwd: {
        force_right(st, pre, p.span());
        force_left(st, p.chan2(), pre, p.span());
        return p;
      }
      case Process::Kind::Impossible: return p;
      case Process::Kind::Spawn: {
        const ProcDecl* d = sig.find_decl(p.callee());
        if (!d)
          throw ReconError("unknown name", "unknown process " + p.callee(), p.span());
        if (d->params.size() != p.idx_args().size())
          throw ReconError("unknown name",
                           "process " + p.callee() + " expects " +
                               std::to_string(d->params.size()) + " indices",
                           p.span());
        // spawn-F: force the argument channels from the last to the first
        for (auto it = p.chan_args().rbegin(); it != p.chan_args().rend(); ++it)
          force_left(st, *it, pre, p.span());
        for (auto& c : p.chan_args())
          if (!ctx_remove(st.delta, c)) bad("unknown channel " + c, p.span(), st);
        Subst s;
        for (size_t i = 0; i < d->params.size(); ++i) s[d->params[i]] = p.idx_args()[i];
        st.omega.emplace_back(p.chan(), subst_idx(d->offered, s));
        Process cont = go(std::move(st), p.cont());
        return Process::spawn(p.chan(), p.callee(), p.idx_args(), p.chan_args(),
                              std::move(cont), p.span());
      }
      case Process::Kind::SendLabel: {
        if (p.chan() == st.ochan) {
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::IChoice)
            bad("label send on channel of type " + show_type(st.otype, &sig), p.span(), st);
          const Type* b = st.otype.find_branch(p.label());
          if (!b)
            throw ReconError("unknown label",
                             "label " + p.label() + " not in the type of " + p.chan(),
                             p.span());
          st.otype = *b;
          return Process::send_label(p.chan(), p.label(), go(std::move(st), p.cont()),
                                     p.span());
        }
        force_left(st, p.chan(), pre, p.span());
        Type* slot = ctx_find(st.delta, p.chan());
        if (slot->kind() != Type::Kind::EChoice)
          bad("label send on channel of type " + show_type(*slot, &sig), p.span(), st);
        const Type* b = slot->find_branch(p.label());
        if (!b)
          throw ReconError("unknown label",
                           "label " + p.label() + " not in the type of " + p.chan(),
                           p.span());
        Type cont_t = *b;
        ctx_remove(st.delta, p.chan());
        st.omega.emplace_back(p.chan(), std::move(cont_t));
        return Process::send_label(p.chan(), p.label(), go(std::move(st), p.cont()),
                                   p.span());
      }
      case Process::Kind::Case: {
        if (p.chan() == st.ochan) {
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::EChoice)
            bad("case on channel of type " + show_type(st.otype, &sig), p.span(), st);
          std::vector<std::pair<std::string, Process>> out;
          for (auto& [l, body] : p.branches()) {
            const Type* bt = st.otype.find_branch(l);
            if (!bt)
              throw ReconError("unknown label",
                               "label " + l + " not in the type of " + p.chan(), p.span());
            St st2 = st;
            st2.otype = *bt;
            out.emplace_back(l, go(std::move(st2), body));
          }
          return Process::case_of(p.chan(), std::move(out), p.span());
        }
        force_left(st, p.chan(), pre, p.span());
        Type cur = *ctx_find(st.delta, p.chan());
        if (cur.kind() != Type::Kind::IChoice)
          bad("case on channel of type " + show_type(cur, &sig), p.span(), st);
        std::vector<std::pair<std::string, Process>> out;
        for (auto& [l, body] : p.branches()) {
          const Type* bt = cur.find_branch(l);
          if (!bt)
            throw ReconError("unknown label",
                             "label " + l + " not in the type of " + p.chan(), p.span());
          St st2 = st;
          ctx_remove(st2.delta, p.chan());
          st2.omega.emplace_back(p.chan(), *bt);
          out.emplace_back(l, go(std::move(st2), body));
        }
        return Process::case_of(p.chan(), std::move(out), p.span());
      }
      case Process::Kind::SendChan: {
        if (p.chan() == st.ochan) {
          // tensor: force the sent channel first, then the subject
          force_left(st, p.chan2(), pre, p.span());
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::Tensor)
            bad("channel send on type " + show_type(st.otype, &sig), p.span(), st);
          ctx_remove(st.delta, p.chan2());
          st.otype = st.otype.right();
        } else {
          force_left(st, p.chan2(), pre, p.span());
          force_left(st, p.chan(), pre, p.span());
          Type* slot = ctx_find(st.delta, p.chan());
          if (slot->kind() != Type::Kind::Lolli)
            bad("channel send on type " + show_type(*slot, &sig), p.span(), st);
          Type rest = slot->right();
          ctx_remove(st.delta, p.chan());
          ctx_remove(st.delta, p.chan2());
          st.omega.emplace_back(p.chan(), std::move(rest));
        }
        return Process::send_chan(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                  p.span());
      }
      case Process::Kind::RecvChan: {
        if (p.chan() == st.ochan) {
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::Lolli)
            bad("channel receive on type " + show_type(st.otype, &sig), p.span(), st);
          st.omega.emplace_back(p.chan2(), st.otype.left());
          st.otype = st.otype.right();
        } else {
          force_left(st, p.chan(), pre, p.span());
          Type* slot = ctx_find(st.delta, p.chan());
          if (slot->kind() != Type::Kind::Tensor)
            bad("channel receive on type " + show_type(*slot, &sig), p.span(), st);
          Type payload = slot->left();
          Type rest = slot->right();
          ctx_remove(st.delta, p.chan());
          st.omega.emplace_back(p.chan(), rest);
          st.omega.emplace_back(p.chan2(), payload);
        }
        return Process::recv_chan(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                  p.span());
      }
      case Process::Kind::Close: {
        if (p.chan() != st.ochan) bad("close of a used channel", p.span(), st);
        force_right(st, pre, p.span());
        if (st.otype.kind() != Type::Kind::One)
          bad("close on type " + show_type(st.otype, &sig), p.span(), st);
        return p;
      }
      case Process::Kind::Wait: {
        force_left(st, p.chan(), pre, p.span());
        Type cur = *ctx_find(st.delta, p.chan());
        if (cur.kind() != Type::Kind::One)
          bad("wait on type " + show_type(cur, &sig), p.span(), st);
        ctx_remove(st.delta, p.chan());
        return Process::wait(p.chan(), go(std::move(st), p.cont()), p.span());
      }
      case Process::Kind::SendIdx: {
        if (p.chan() == st.ochan) {
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::Exists)
            bad("index send on type " + show_type(st.otype, &sig), p.span(), st);
          st.otype = subst_idx(st.otype.cont(), Subst{{st.otype.bound_var(), p.exp()}});
        } else {
          force_left(st, p.chan(), pre, p.span());
          Type* slot = ctx_find(st.delta, p.chan());
          if (slot->kind() != Type::Kind::Forall)
            bad("index send on type " + show_type(*slot, &sig), p.span(), st);
          Type cont_t = subst_idx(slot->cont(), Subst{{slot->bound_var(), p.exp()}});
          ctx_remove(st.delta, p.chan());
          st.omega.emplace_back(p.chan(), std::move(cont_t));
        }
        return Process::send_idx(p.chan(), p.exp(), go(std::move(st), p.cont()), p.span());
      }
      case Process::Kind::RecvIdx: {
        if (p.chan() == st.ochan) {
          force_right(st, pre, p.span());
          if (st.otype.kind() != Type::Kind::Forall)
            bad("index receive on type " + show_type(st.otype, &sig), p.span(), st);
          st.otype = subst_idx(st.otype.cont(),
                               Subst{{st.otype.bound_var(), Exp::var(p.chan2())}});
        } else {
          force_left(st, p.chan(), pre, p.span());
          Type* slot = ctx_find(st.delta, p.chan());
          if (slot->kind() != Type::Kind::Exists)
            bad("index receive on type " + show_type(*slot, &sig), p.span(), st);
          Type cont_t =
              subst_idx(slot->cont(), Subst{{slot->bound_var(), Exp::var(p.chan2())}});
          ctx_remove(st.delta, p.chan());
          st.omega.emplace_back(p.chan(), std::move(cont_t));
        }
        return Process::recv_idx(p.chan(), p.chan2(), go(std::move(st), p.cont()),
                                 p.span());
      }
      case Process::Kind::AssertP:
      case Process::Kind::AssumeP:
      case Process::Kind::Pay:
      case Process::Kind::Get:
      case Process::Kind::Work:
        throw ReconError("forcing failed", "explicit construct in implicit source",
                         p.span());
    }
    throw std::logic_error("recon_force: bad kind");
  }
};

// ---------------------------------------------------------------------------
// Work insertion

bool costly(const Process& p, const CostModel& m, uint64_t& cost) {
  bool is_send = p.kind() == Process::Kind::SendLabel ||
                 p.kind() == Process::Kind::SendChan || p.kind() == Process::Kind::Close;
  bool is_recv = p.kind() == Process::Kind::Case || p.kind() == Process::Kind::RecvChan ||
                 p.kind() == Process::Kind::Wait;
  switch (m.kind) {
    case CostModel::Kind::None: return false;
    case CostModel::Kind::Send: cost = 1; return is_send;
    case CostModel::Kind::Recv: cost = 1; return is_recv;
    case CostModel::Kind::Flat: cost = m.flat; return m.flat > 0 && (is_send || is_recv);
  }
  return false;
}

Process add_work(const Process& p, const CostModel& m);

Process add_work_head(const Process& p, const CostModel& m) {
  // Rebuild a statement keeping its own head, recursing into continuations.
  if (p.kind() == Process::Kind::Case) {
    std::vector<std::pair<std::string, Process>> bs;
    bs.reserve(p.branches().size());
    for (auto& [l, b] : p.branches()) bs.emplace_back(l, add_work(b, m));
    return Process::case_of(p.chan(), std::move(bs), p.span());
  }
  if (!p.has_cont()) return p;
  return p.with_cont(add_work(p.cont(), m));
}

Process add_work(const Process& p, const CostModel& m) {
  uint64_t c = 0;
  if (p.kind() == Process::Kind::Pay) {
    // The work for a send precedes the potential transfers attached to it.
    std::vector<Process> run;
    Process cur = p;
    while (cur.kind() == Process::Kind::Pay) {
      run.push_back(cur);
      cur = cur.cont();
    }
    if (costly(cur, m, c)) {
      Process tail = add_work_head(cur, m);
      for (auto it = run.rbegin(); it != run.rend(); ++it) tail = it->with_cont(tail);
      return Process::work(Exp::num(c), std::move(tail), cur.span());
    }
    return p.with_cont(add_work(p.cont(), m));
  }
  if (costly(p, m, c))
    return Process::work(Exp::num(c), add_work_head(p, m), p.span());
  return add_work_head(p, m);
}

Process drain(const Signature& sig, const Process& p, const Exp& q) {
  switch (p.kind()) {
    case Process::Kind::Close:
    case Process::Kind::Fwd: {
      Linearized lz = linearize_exp(q);
      if (lz.ok && !lz.is_zero) return Process::work(lz.exp, p, p.span());
      return p;
    }
    case Process::Kind::Impossible: return p;
    case Process::Kind::Spawn: {
      Exp need = Exp::num(0);
      if (const ProcDecl* d = sig.find_decl(p.callee());
          d && d->params.size() == p.idx_args().size()) {
        Subst s;
        for (size_t i = 0; i < d->params.size(); ++i) s[d->params[i]] = p.idx_args()[i];
        need = subst_idx(d->potential, s);
      }
      return p.with_cont(drain(sig, p.cont(), Exp::sub(q, need)));
    }
    case Process::Kind::Pay:
      return p.with_cont(drain(sig, p.cont(), Exp::sub(q, p.exp())));
    case Process::Kind::Get:
      return p.with_cont(drain(sig, p.cont(), Exp::add(q, p.exp())));
    case Process::Kind::Work:
      return p.with_cont(drain(sig, p.cont(), Exp::sub(q, p.exp())));
    case Process::Kind::Case: {
      std::vector<std::pair<std::string, Process>> bs;
      bs.reserve(p.branches().size());
      for (auto& [l, b] : p.branches()) bs.emplace_back(l, drain(sig, b, q));
      return Process::case_of(p.chan(), std::move(bs), p.span());
    }
    default: return p.with_cont(drain(sig, p.cont(), q));
  }
}

void walk_polarizable(const Signature& sig, const Type& t, Span sp,
                      std::optional<Diagnostic>& out) {
  if (out) return;
  if (polarize(sig, t) == Polarity::IllPolarized) {
    Span where = t.span().empty() ? sp : t.span();
    out = Diagnostic{"ill-polarized type", show_type(t, &sig), where};
    return;
  }
  Type cur = t;
  for (;;) {
    switch (cur.kind()) {
      case Type::Kind::Assert:
      case Type::Kind::Assume:
      case Type::Kind::PayPot:
      case Type::Kind::GetPot: cur = cur.cont(); continue;
      case Type::Kind::Name: return;  // its definition is walked separately
      case Type::Kind::IChoice:
      case Type::Kind::EChoice:
        for (auto& [_, b] : cur.branches()) walk_polarizable(sig, b, sp, out);
        return;
      case Type::Kind::Tensor:
      case Type::Kind::Lolli:
        walk_polarizable(sig, cur.left(), sp, out);
        walk_polarizable(sig, cur.right(), sp, out);
        return;
      case Type::Kind::One: return;
      case Type::Kind::Exists:
      case Type::Kind::Forall:
        walk_polarizable(sig, cur.cont(), sp, out);
        return;
    }
  }
}

}  // namespace

std::optional<Diagnostic> check_polarizable(const Signature& sig) {
  std::optional<Diagnostic> out;
  for (auto& td : sig.types) {
    walk_polarizable(sig, td.body, td.span, out);
    if (out) return out;
  }
  for (auto& d : sig.decls) {
    for (auto& [c, t] : d.channels) {
      walk_polarizable(sig, t, d.span, out);
      if (out) return out;
      if (!is_structural(sig, t))
        return Diagnostic{"ill-polarized type",
                          "declaration type of " + c + " is not structural: " +
                              show_type(t, &sig),
                          d.span};
    }
    walk_polarizable(sig, d.offered, d.span, out);
    if (out) return out;
    if (!is_structural(sig, d.offered))
      return Diagnostic{"ill-polarized type",
                        "offered type of " + d.name + " is not structural: " +
                            show_type(d.offered, &sig),
                        d.span};
  }
  return std::nullopt;
}

Process recon_branches(const Signature& sig, const ProcDecl& decl, const ProcDef& def) {
  BranchRecon br{sig};
  BranchRecon::St st;
  for (size_t i = 0; i < decl.channels.size(); ++i)
    st.delta.emplace_back(def.channel_names[i], decl.channels[i].second);
  st.ochan = def.offered_chan;
  st.otype = decl.offered;
  return br.go(std::move(st), def.body);
}

Process recon_force(const Signature& sig, const ProcDecl& decl, const ProcDef& def,
                    const Process& body) {
  ForceRecon fr{sig};
  ForceRecon::St st;
  // Declaration types are structural; they start stable.
  for (size_t i = 0; i < decl.channels.size(); ++i)
    st.delta.emplace_back(def.channel_names[i], decl.channels[i].second);
  st.ochan = def.offered_chan;
  st.otype = decl.offered;
  return fr.go(std::move(st), body);
}

Process insert_work(const Signature& sig, const ProcDecl& decl, const Process& body,
                    const CostModel& model) {
  Process with_costs = add_work(body, model);
  return drain(sig, with_costs, decl.potential);
}

Process reconstruct_def(const Signature& sig, const ProcDecl& decl, const ProcDef& def,
                        const CostModel& model) {
  Process p = recon_branches(sig, decl, def);
  p = recon_force(sig, decl, def, p);
  return insert_work(sig, decl, p, model);
}

Signature reconstruct(const Signature& sig, const CostModel& model) {
  Signature out = sig;
  for (auto& def : out.defs) {
    const ProcDecl* d = out.find_decl(def.name);
    if (!d) throw ReconError("unknown name", "definition without declaration: " + def.name,
                             def.span);
    def.body = reconstruct_def(out, *d, def, model);
  }
  return out;
}

}  // namespace ergo

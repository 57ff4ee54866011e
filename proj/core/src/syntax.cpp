#include "ergo/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace ergo {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

Type Type::ichoice(std::vector<std::pair<std::string, Type>> branches, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IChoice;
  n->span = sp;
  n->branches = std::move(branches);
  return Type(std::move(n));
}

Type Type::echoice(std::vector<std::pair<std::string, Type>> branches, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::EChoice;
  n->span = sp;
  n->branches = std::move(branches);
  return Type(std::move(n));
}

Type Type::tensor(Type a, Type b, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tensor;
  n->span = sp;
  n->kids = {std::move(a), std::move(b)};
  return Type(std::move(n));
}

Type Type::lolli(Type a, Type b, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lolli;
  n->span = sp;
  n->kids = {std::move(a), std::move(b)};
  return Type(std::move(n));
}

Type Type::one(Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::One;
  n->span = sp;
  return Type(std::move(n));
}

Type Type::name(std::string id, std::vector<Exp> args, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Name;
  n->span = sp;
  n->id = std::move(id);
  n->args = std::move(args);
  return Type(std::move(n));
}

Type Type::assert_t(Prop phi, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Assert;
  n->span = sp;
  n->prop = std::move(phi);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

Type Type::assume_t(Prop phi, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Assume;
  n->span = sp;
  n->prop = std::move(phi);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

Type Type::exists_t(std::string var, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->span = sp;
  n->id = std::move(var);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

Type Type::forall_t(std::string var, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->span = sp;
  n->id = std::move(var);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

Type Type::paypot(Exp r, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::PayPot;
  n->span = sp;
  n->pot = std::move(r);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

Type Type::getpot(Exp r, Type a, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::GetPot;
  n->span = sp;
  n->pot = std::move(r);
  n->kids = {std::move(a)};
  return Type(std::move(n));
}

const Type* Type::find_branch(const std::string& label) const {
  for (auto& [l, t] : node_->branches)
    if (l == label) return &t;
  return nullptr;
}

bool Type::structurally_equal(const Type& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::IChoice:
    case Kind::EChoice: {
      if (branches().size() != o.branches().size()) return false;
      for (size_t i = 0; i < branches().size(); ++i) {
        if (branches()[i].first != o.branches()[i].first) return false;
        if (!branches()[i].second.structurally_equal(o.branches()[i].second)) return false;
      }
      return true;
    }
    case Kind::Tensor:
    case Kind::Lolli:
      return left().structurally_equal(o.left()) && right().structurally_equal(o.right());
    case Kind::One: return true;
    case Kind::Name: {
      if (id() != o.id() || args().size() != o.args().size()) return false;
      for (size_t i = 0; i < args().size(); ++i)
        if (!args()[i].structurally_equal(o.args()[i])) return false;
      return true;
    }
    case Kind::Assert:
    case Kind::Assume:
      return prop().structurally_equal(o.prop()) && cont().structurally_equal(o.cont());
    case Kind::Exists:
    case Kind::Forall:
      return bound_var() == o.bound_var() && cont().structurally_equal(o.cont());
    case Kind::PayPot:
    case Kind::GetPot:
      return potential().structurally_equal(o.potential()) && cont().structurally_equal(o.cont());
  }
  return false;
}

namespace {

void type_free_vars(const Type& t, std::vector<std::string>& bound,
                    std::vector<std::string>& out) {
  auto add_exp = [&](const Exp& e) {
    std::vector<std::string> fv;
    e.free_vars(fv);
    for (auto& v : fv)
      if (!contains(bound, v) && !contains(out, v)) out.push_back(v);
  };
  auto add_prop = [&](const Prop& p) {
    std::vector<std::string> fv;
    p.free_vars(fv);
    for (auto& v : fv)
      if (!contains(bound, v) && !contains(out, v)) out.push_back(v);
  };
  switch (t.kind()) {
    case Type::Kind::IChoice:
    case Type::Kind::EChoice:
      for (auto& [_, b] : t.branches()) type_free_vars(b, bound, out);
      return;
    case Type::Kind::Tensor:
    case Type::Kind::Lolli:
      type_free_vars(t.left(), bound, out);
      type_free_vars(t.right(), bound, out);
      return;
    case Type::Kind::One: return;
    case Type::Kind::Name:
      for (auto& e : t.args()) add_exp(e);
      return;
    case Type::Kind::Assert:
    case Type::Kind::Assume:
      add_prop(t.prop());
      type_free_vars(t.cont(), bound, out);
      return;
    case Type::Kind::Exists:
    case Type::Kind::Forall: {
      bound.push_back(t.bound_var());
      type_free_vars(t.cont(), bound, out);
      bound.pop_back();
      return;
    }
    case Type::Kind::PayPot:
    case Type::Kind::GetPot:
      add_exp(t.potential());
      type_free_vars(t.cont(), bound, out);
      return;
  }
}

}  // namespace

void Type::free_idx_vars(std::vector<std::string>& out) const {
  std::vector<std::string> bound;
  type_free_vars(*this, bound, out);
}

Type subst_idx(const Type& t, const Subst& s) {
  if (s.empty()) return t;
  switch (t.kind()) {
    case Type::Kind::IChoice:
    case Type::Kind::EChoice: {
      std::vector<std::pair<std::string, Type>> bs;
      bs.reserve(t.branches().size());
      for (auto& [l, b] : t.branches()) bs.emplace_back(l, subst_idx(b, s));
      return t.kind() == Type::Kind::IChoice ? Type::ichoice(std::move(bs), t.span())
                                             : Type::echoice(std::move(bs), t.span());
    }
    case Type::Kind::Tensor:
      return Type::tensor(subst_idx(t.left(), s), subst_idx(t.right(), s), t.span());
    case Type::Kind::Lolli:
      return Type::lolli(subst_idx(t.left(), s), subst_idx(t.right(), s), t.span());
    case Type::Kind::One: return t;
    case Type::Kind::Name: {
      std::vector<Exp> args;
      args.reserve(t.args().size());
      for (auto& e : t.args()) args.push_back(subst_idx(e, s));
      return Type::name(t.id(), std::move(args), t.span());
    }
    case Type::Kind::Assert:
      return Type::assert_t(subst_idx(t.prop(), s), subst_idx(t.cont(), s), t.span());
    case Type::Kind::Assume:
      return Type::assume_t(subst_idx(t.prop(), s), subst_idx(t.cont(), s), t.span());
    case Type::Kind::Exists:
    case Type::Kind::Forall: {
      Subst inner = s;
      inner.erase(t.bound_var());
      bool capture = false;
      for (auto& [_, rep] : inner)
        if (rep.mentions(t.bound_var())) { capture = true; break; }
      std::string bound = t.bound_var();
      Type body = t.cont();
      if (capture) {
        std::vector<std::string> avoid;
        body.free_idx_vars(avoid);
        for (auto& [from, rep] : inner) {
          avoid.push_back(from);
          rep.free_vars(avoid);
        }
        bound = fresh_name(t.bound_var(), avoid);
        body = subst_idx(body, Subst{{t.bound_var(), Exp::var(bound)}});
      }
      Type out = inner.empty() ? body : subst_idx(body, inner);
      return t.kind() == Type::Kind::Exists ? Type::exists_t(bound, out, t.span())
                                            : Type::forall_t(bound, out, t.span());
    }
    case Type::Kind::PayPot:
      return Type::paypot(subst_idx(t.potential(), s), subst_idx(t.cont(), s), t.span());
    case Type::Kind::GetPot:
      return Type::getpot(subst_idx(t.potential(), s), subst_idx(t.cont(), s), t.span());
  }
  throw std::logic_error("subst_idx(Type): bad kind");
}

// ---------------------------------------------------------------------------
// Process

Process Process::fwd(std::string x, std::string y, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Fwd;
  n->span = sp;
  n->chan = std::move(x);
  n->chan2 = std::move(y);
  return Process(std::move(n));
}

Process Process::spawn(std::string x, std::string callee, std::vector<Exp> idx_args,
                       std::vector<std::string> chan_args, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Spawn;
  n->span = sp;
  n->chan = std::move(x);
  n->label = std::move(callee);
  n->exps = std::move(idx_args);
  n->chans = std::move(chan_args);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::send_label(std::string x, std::string label, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::SendLabel;
  n->span = sp;
  n->chan = std::move(x);
  n->label = std::move(label);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::case_of(std::string x, std::vector<std::pair<std::string, Process>> branches,
                         Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Case;
  n->span = sp;
  n->chan = std::move(x);
  n->branches = std::move(branches);
  return Process(std::move(n));
}

Process Process::send_chan(std::string x, std::string w, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::SendChan;
  n->span = sp;
  n->chan = std::move(x);
  n->chan2 = std::move(w);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::recv_chan(std::string x, std::string y, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::RecvChan;
  n->span = sp;
  n->chan = std::move(x);
  n->chan2 = std::move(y);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::close(std::string x, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Close;
  n->span = sp;
  n->chan = std::move(x);
  return Process(std::move(n));
}

Process Process::wait(std::string x, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Wait;
  n->span = sp;
  n->chan = std::move(x);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::send_idx(std::string x, Exp e, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::SendIdx;
  n->span = sp;
  n->chan = std::move(x);
  n->exps = {std::move(e)};
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::recv_idx(std::string x, std::string v, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::RecvIdx;
  n->span = sp;
  n->chan = std::move(x);
  n->chan2 = std::move(v);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::assert_p(std::string x, Prop phi, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::AssertP;
  n->span = sp;
  n->chan = std::move(x);
  n->prop = std::move(phi);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::assume_p(std::string x, Prop phi, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::AssumeP;
  n->span = sp;
  n->chan = std::move(x);
  n->prop = std::move(phi);
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::pay(std::string x, Exp r, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pay;
  n->span = sp;
  n->chan = std::move(x);
  n->exps = {std::move(r)};
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::get(std::string x, Exp r, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Get;
  n->span = sp;
  n->chan = std::move(x);
  n->exps = {std::move(r)};
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::work(Exp r, Process cont, Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Work;
  n->span = sp;
  n->exps = {std::move(r)};
  n->kids = {std::move(cont)};
  return Process(std::move(n));
}

Process Process::impossible(Span sp) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Impossible;
  n->span = sp;
  return Process(std::move(n));
}

Process Process::with_cont(Process new_cont) const {
  auto n = std::make_shared<Node>(*node_);
  n->kids = {std::move(new_cont)};
  return Process(std::move(n));
}

bool Process::structurally_equal(const Process& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  if (node_->chan != o.node_->chan || node_->chan2 != o.node_->chan2 ||
      node_->label != o.node_->label || node_->chans != o.node_->chans)
    return false;
  if (node_->exps.size() != o.node_->exps.size()) return false;
  for (size_t i = 0; i < node_->exps.size(); ++i)
    if (!node_->exps[i].structurally_equal(o.node_->exps[i])) return false;
  if (kind() == Kind::AssertP || kind() == Kind::AssumeP)
    if (!prop().structurally_equal(o.prop())) return false;
  if (node_->kids.size() != o.node_->kids.size()) return false;
  for (size_t i = 0; i < node_->kids.size(); ++i)
    if (!node_->kids[i].structurally_equal(o.node_->kids[i])) return false;
  if (node_->branches.size() != o.node_->branches.size()) return false;
  for (size_t i = 0; i < node_->branches.size(); ++i) {
    if (node_->branches[i].first != o.node_->branches[i].first) return false;
    if (!node_->branches[i].second.structurally_equal(o.node_->branches[i].second))
      return false;
  }
  return true;
}

size_t Process::node_count() const {
  size_t n = 1;
  for (auto& k : node_->kids) n += k.node_count();
  for (auto& [_, b] : node_->branches) n += b.node_count();
  return n;
}

namespace {

void collect_chans(const Process& p, std::vector<std::string>& bound,
                   std::vector<std::string>& out) {
  auto add = [&](const std::string& c) {
    if (!c.empty() && !contains(bound, c) && !contains(out, c)) out.push_back(c);
  };
  switch (p.kind()) {
    case Process::Kind::Fwd:
      add(p.chan());
      add(p.chan2());
      return;
    case Process::Kind::Spawn: {
      for (auto& c : p.chan_args()) add(c);
      bound.push_back(p.chan());
      collect_chans(p.cont(), bound, out);
      bound.pop_back();
      return;
    }
    case Process::Kind::RecvChan: {
      add(p.chan());
      bound.push_back(p.chan2());
      collect_chans(p.cont(), bound, out);
      bound.pop_back();
      return;
    }
    case Process::Kind::SendChan:
      add(p.chan());
      add(p.chan2());
      collect_chans(p.cont(), bound, out);
      return;
    case Process::Kind::Case:
      add(p.chan());
      for (auto& [_, b] : p.branches()) collect_chans(b, bound, out);
      return;
    case Process::Kind::Close:
      add(p.chan());
      return;
    case Process::Kind::Impossible: return;
    case Process::Kind::Work:
      collect_chans(p.cont(), bound, out);
      return;
    default:
      add(p.chan());
      collect_chans(p.cont(), bound, out);
      return;
  }
}

}  // namespace

void Process::free_chans(std::vector<std::string>& out) const {
  std::vector<std::string> bound;
  collect_chans(*this, bound, out);
}

Process rename_chan(const Process& p, const std::string& from, const std::string& to) {
  if (from == to) return p;
  auto r = [&](const std::string& c) { return c == from ? to : c; };
  switch (p.kind()) {
    case Process::Kind::Fwd:
      return Process::fwd(r(p.chan()), r(p.chan2()), p.span());
    case Process::Kind::Spawn: {
      std::vector<std::string> args;
      args.reserve(p.chan_args().size());
      for (auto& c : p.chan_args()) args.push_back(r(c));
      Process cont = p.chan() == from ? p.cont() : rename_chan(p.cont(), from, to);
      return Process::spawn(p.chan(), p.callee(), p.idx_args(), std::move(args),
                            std::move(cont), p.span());
    }
    case Process::Kind::SendLabel:
      return Process::send_label(r(p.chan()), p.label(), rename_chan(p.cont(), from, to),
                                 p.span());
    case Process::Kind::Case: {
      std::vector<std::pair<std::string, Process>> bs;
      bs.reserve(p.branches().size());
      for (auto& [l, b] : p.branches()) bs.emplace_back(l, rename_chan(b, from, to));
      return Process::case_of(r(p.chan()), std::move(bs), p.span());
    }
    case Process::Kind::SendChan:
      return Process::send_chan(r(p.chan()), r(p.chan2()), rename_chan(p.cont(), from, to),
                                p.span());
    case Process::Kind::RecvChan: {
      Process cont = p.chan2() == from ? p.cont() : rename_chan(p.cont(), from, to);
      return Process::recv_chan(r(p.chan()), p.chan2(), std::move(cont), p.span());
    }
    case Process::Kind::Close: return Process::close(r(p.chan()), p.span());
    case Process::Kind::Wait:
      return Process::wait(r(p.chan()), rename_chan(p.cont(), from, to), p.span());
    case Process::Kind::SendIdx:
      return Process::send_idx(r(p.chan()), p.exp(), rename_chan(p.cont(), from, to),
                               p.span());
    case Process::Kind::RecvIdx:
      return Process::recv_idx(r(p.chan()), p.chan2(), rename_chan(p.cont(), from, to),
                               p.span());
    case Process::Kind::AssertP:
      return Process::assert_p(r(p.chan()), p.prop(), rename_chan(p.cont(), from, to),
                               p.span());
    case Process::Kind::AssumeP:
      return Process::assume_p(r(p.chan()), p.prop(), rename_chan(p.cont(), from, to),
                               p.span());
    case Process::Kind::Pay:
      return Process::pay(r(p.chan()), p.exp(), rename_chan(p.cont(), from, to), p.span());
    case Process::Kind::Get:
      return Process::get(r(p.chan()), p.exp(), rename_chan(p.cont(), from, to), p.span());
    case Process::Kind::Work:
      return Process::work(p.exp(), rename_chan(p.cont(), from, to), p.span());
    case Process::Kind::Impossible: return p;
  }
  throw std::logic_error("rename_chan: bad kind");
}

Process subst_idx(const Process& p, const Subst& s) {
  if (s.empty()) return p;
  auto se = [&](const Exp& e) { return subst_idx(e, s); };
  switch (p.kind()) {
    case Process::Kind::Fwd:
    case Process::Kind::Close:
    case Process::Kind::Impossible: return p;
    case Process::Kind::Spawn: {
      std::vector<Exp> idx;
      idx.reserve(p.idx_args().size());
      for (auto& e : p.idx_args()) idx.push_back(se(e));
      return Process::spawn(p.chan(), p.callee(), std::move(idx), p.chan_args(),
                            subst_idx(p.cont(), s), p.span());
    }
    case Process::Kind::SendLabel:
      return Process::send_label(p.chan(), p.label(), subst_idx(p.cont(), s), p.span());
    case Process::Kind::Case: {
      std::vector<std::pair<std::string, Process>> bs;
      bs.reserve(p.branches().size());
      for (auto& [l, b] : p.branches()) bs.emplace_back(l, subst_idx(b, s));
      return Process::case_of(p.chan(), std::move(bs), p.span());
    }
    case Process::Kind::SendChan:
      return Process::send_chan(p.chan(), p.chan2(), subst_idx(p.cont(), s), p.span());
    case Process::Kind::RecvChan:
      return Process::recv_chan(p.chan(), p.chan2(), subst_idx(p.cont(), s), p.span());
    case Process::Kind::Wait:
      return Process::wait(p.chan(), subst_idx(p.cont(), s), p.span());
    case Process::Kind::SendIdx:
      return Process::send_idx(p.chan(), se(p.exp()), subst_idx(p.cont(), s), p.span());
    case Process::Kind::RecvIdx: {
      Subst inner = s;
      inner.erase(p.chan2());
      bool capture = false;
      for (auto& [_, rep] : inner)
        if (rep.mentions(p.chan2())) { capture = true; break; }
      if (capture)
        throw std::logic_error("subst_idx(Process): index binder capture on " + p.chan2());
      return Process::recv_idx(p.chan(), p.chan2(), subst_idx(p.cont(), inner), p.span());
    }
    case Process::Kind::AssertP:
      return Process::assert_p(p.chan(), subst_idx(p.prop(), s), subst_idx(p.cont(), s),
                               p.span());
    case Process::Kind::AssumeP:
      return Process::assume_p(p.chan(), subst_idx(p.prop(), s), subst_idx(p.cont(), s),
                               p.span());
    case Process::Kind::Pay:
      return Process::pay(p.chan(), se(p.exp()), subst_idx(p.cont(), s), p.span());
    case Process::Kind::Get:
      return Process::get(p.chan(), se(p.exp()), subst_idx(p.cont(), s), p.span());
    case Process::Kind::Work:
      return Process::work(se(p.exp()), subst_idx(p.cont(), s), p.span());
  }
  throw std::logic_error("subst_idx(Process): bad kind");
}

// ---------------------------------------------------------------------------
// Signature

const TypeDef* Signature::find_type(const std::string& name) const {
  for (auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

const ProcDecl* Signature::find_decl(const std::string& name) const {
  for (auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

const ProcDef* Signature::find_def(const std::string& name) const {
  for (auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

void check_name_uses(const Signature& sig, const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Name: {
      const TypeDef* def = sig.find_type(t.id());
      if (!def) throw SignatureError("unknown type name: " + t.id(), t.span());
      if (def->params.size() != t.args().size())
        throw SignatureError("type " + t.id() + " expects " +
                                 std::to_string(def->params.size()) + " indices, got " +
                                 std::to_string(t.args().size()),
                             t.span());
      return;
    }
    case Type::Kind::IChoice:
    case Type::Kind::EChoice: {
      std::set<std::string> seen;
      if (t.branches().empty())
        throw SignatureError("empty choice type", t.span());
      for (auto& [l, b] : t.branches()) {
        if (!seen.insert(l).second)
          throw SignatureError("duplicate label in choice: " + l, t.span());
        check_name_uses(sig, b);
      }
      return;
    }
    case Type::Kind::Tensor:
    case Type::Kind::Lolli:
      check_name_uses(sig, t.left());
      check_name_uses(sig, t.right());
      return;
    case Type::Kind::One: return;
    default: check_name_uses(sig, t.cont()); return;
  }
}

}  // namespace

void Signature::validate_structure() const {
  std::set<std::string> tnames;
  for (auto& t : types) {
    if (!tnames.insert(t.name).second)
      throw SignatureError("duplicate type definition: " + t.name, t.span);
    if (t.body.kind() == Type::Kind::Name)
      throw SignatureError("type definition not contractive: " + t.name, t.span);
    std::set<std::string> ps(t.params.begin(), t.params.end());
    if (ps.size() != t.params.size())
      throw SignatureError("duplicate index parameter in " + t.name, t.span);
  }
  std::set<std::string> dnames;
  for (auto& d : decls) {
    if (!dnames.insert(d.name).second)
      throw SignatureError("duplicate declaration: " + d.name, d.span);
    std::set<std::string> ps(d.params.begin(), d.params.end());
    if (ps.size() != d.params.size())
      throw SignatureError("duplicate index parameter in " + d.name, d.span);
    std::set<std::string> cs;
    for (auto& [c, _] : d.channels)
      if (!cs.insert(c).second)
        throw SignatureError("duplicate channel in declaration " + d.name, d.span);
    if (cs.count(d.offered_chan))
      throw SignatureError("offered channel shadows a used channel in " + d.name, d.span);
  }
  std::set<std::string> fnames;
  for (auto& f : defs) {
    if (!fnames.insert(f.name).second)
      throw SignatureError("duplicate definition: " + f.name, f.span);
    const ProcDecl* d = find_decl(f.name);
    if (!d) throw SignatureError("definition without declaration: " + f.name, f.span);
    if (d->channels.size() != f.channel_names.size())
      throw SignatureError("definition " + f.name + " takes " +
                               std::to_string(f.channel_names.size()) +
                               " channels but declaration lists " +
                               std::to_string(d->channels.size()),
                           f.span);
  }
  for (auto& d : decls)
    if (!find_def(d.name))
      throw SignatureError("declaration without definition: " + d.name, d.span);
  for (auto& t : types) check_name_uses(*this, t.body);
  for (auto& d : decls) {
    for (auto& [_, ty] : d.channels) check_name_uses(*this, ty);
    check_name_uses(*this, d.offered);
  }
}

Type unfold(const Signature& sig, const Type& t) {
  if (t.kind() != Type::Kind::Name) return t;
  const TypeDef* def = sig.find_type(t.id());
  if (!def) throw SignatureError("unknown type name: " + t.id(), t.span());
  if (def->params.size() != t.args().size())
    throw SignatureError("arity mismatch for " + t.id(), t.span());
  Subst s;
  for (size_t i = 0; i < def->params.size(); ++i) s[def->params[i]] = t.args()[i];
  return subst_idx(def->body, s);
}

// ---------------------------------------------------------------------------
// Validity

namespace {

struct ValidityCtx {
  const Signature& sig;
  std::optional<ValidityError> error;

  bool exp_ok(const VarCtx& vars, const Prop& c, const Exp& e, const std::string& path,
              Span sp) {
    NatCheck nc = check_nat(vars, c, e);
    if (!nc.ok) {
      error = ValidityError{path, nc.failing, sp};
      return false;
    }
    return true;
  }

  bool prop_ok(const VarCtx& vars, const Prop& c, const Prop& p, const std::string& path,
               Span sp) {
    switch (p.kind()) {
      case Prop::Kind::Eq:
      case Prop::Kind::Gt:
        return exp_ok(vars, c, p.exp_lhs(), path, sp) && exp_ok(vars, c, p.exp_rhs(), path, sp);
      case Prop::Kind::Divides: return exp_ok(vars, c, p.divided(), path, sp);
      case Prop::Kind::Top:
      case Prop::Kind::Bot: return true;
      case Prop::Kind::And:
      case Prop::Kind::Or:
        return prop_ok(vars, c, p.lhs(), path, sp) && prop_ok(vars, c, p.rhs(), path, sp);
      case Prop::Kind::Not: return prop_ok(vars, c, p.body(), path, sp);
      case Prop::Kind::Exists:
      case Prop::Kind::Forall:
        return prop_ok(vars.extended(p.var()), c, p.body(), path, sp);
    }
    return true;
  }

  bool walk(const VarCtx& vars, const Prop& c, const Type& t, const std::string& path) {
    switch (t.kind()) {
      case Type::Kind::IChoice:
      case Type::Kind::EChoice: {
        for (auto& [l, b] : t.branches())
          if (!walk(vars, c, b, path + "." + l)) return false;
        return true;
      }
      case Type::Kind::Tensor:
      case Type::Kind::Lolli: {
        const char* op = t.kind() == Type::Kind::Tensor ? "*" : "-o";
        return walk(vars, c, t.left(), path + ".left(" + op + ")") &&
               walk(vars, c, t.right(), path + ".right(" + op + ")");
      }
      case Type::Kind::One: return true;
      case Type::Kind::Name: {
        for (auto& e : t.args())
          if (!exp_ok(vars, c, e, path + "." + t.id(), t.span())) return false;
        return true;
      }
      case Type::Kind::Assert:
      case Type::Kind::Assume: {
        if (!prop_ok(vars, c, t.prop(), path, t.span())) return false;
        // Constraints accumulate along the path for both polarities.
        return walk(vars, Prop::conj(c, t.prop()), t.cont(), path);
      }
      case Type::Kind::Exists:
      case Type::Kind::Forall: {
        std::string v = t.bound_var();
        if (vars.contains(v)) {
          error = ValidityError{path + ": quantifier shadows index variable " + v,
                                Exp::var(v), t.span()};
          return false;
        }
        return walk(vars.extended(v), c, t.cont(), path);
      }
      case Type::Kind::PayPot:
      case Type::Kind::GetPot:
        if (!exp_ok(vars, c, t.potential(), path, t.span())) return false;
        return walk(vars, c, t.cont(), path);
    }
    return true;
  }
};

}  // namespace

std::optional<ValidityError> check_type_valid(const Signature& sig, const VarCtx& vars,
                                              const Prop& constraint, const Type& t) {
  ValidityCtx ctx{sig, std::nullopt};
  ctx.walk(vars, constraint, t, "");
  return ctx.error;
}

std::optional<ValidityError> check_signature_valid(const Signature& sig) {
  for (auto& td : sig.types) {
    VarCtx vars{td.params};
    if (auto err = check_type_valid(sig, vars, Prop::top(), td.body)) {
      err->path = td.name + err->path;
      return err;
    }
  }
  for (auto& d : sig.decls) {
    VarCtx vars{d.params};
    ValidityCtx pctx{sig, std::nullopt};
    if (!pctx.prop_ok(vars, Prop::top(), d.constraint, d.name + ".constraint", d.span))
      return pctx.error;
    for (auto& [c, ty] : d.channels) {
      if (auto err = check_type_valid(sig, vars, d.constraint, ty)) {
        err->path = d.name + "(" + c + ")" + err->path;
        return err;
      }
    }
    if (auto err = check_type_valid(sig, vars, d.constraint, d.offered)) {
      err->path = d.name + "(" + d.offered_chan + ")" + err->path;
      return err;
    }
    ValidityCtx qctx{sig, std::nullopt};
    if (!qctx.exp_ok(vars, d.constraint, d.potential, d.name + ".potential", d.span))
      return qctx.error;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Internal names

namespace {

struct Elaborator {
  std::vector<TypeDef> generated;
  std::set<std::string> used;
  std::string base;
  int counter = 0;

  std::string fresh(const std::string& hint) {
    if (!hint.empty()) {
      std::string candidate = "%" + base + "." + hint;
      if (used.insert(candidate).second) return candidate;
    }
    for (;;) {
      ++counter;
      std::string candidate = "%" + base + "." + std::to_string(counter);
      if (used.insert(candidate).second) return candidate;
    }
  }

  // Rewrites a child position: structural subexpressions get internal names.
  Type name_child(const Type& t, const std::string& hint) {
    if (t.kind() == Type::Kind::Name) return t;
    std::vector<std::string> params;
    t.free_idx_vars(params);
    Type body = elaborate(t);
    std::string n = fresh(hint);
    generated.push_back(TypeDef{n, params, body, t.span(), true});
    std::vector<Exp> args;
    args.reserve(params.size());
    for (auto& p : params) args.push_back(Exp::var(p));
    return Type::name(n, std::move(args), t.span());
  }

  // Keeps the top constructor, replaces every child with a name.
  Type elaborate(const Type& t) {
    switch (t.kind()) {
      case Type::Kind::IChoice:
      case Type::Kind::EChoice: {
        std::vector<std::pair<std::string, Type>> bs;
        bs.reserve(t.branches().size());
        for (auto& [l, b] : t.branches()) bs.emplace_back(l, name_child(b, l));
        return t.kind() == Type::Kind::IChoice ? Type::ichoice(std::move(bs), t.span())
                                               : Type::echoice(std::move(bs), t.span());
      }
      case Type::Kind::Tensor:
        return Type::tensor(name_child(t.left(), ""), name_child(t.right(), ""), t.span());
      case Type::Kind::Lolli:
        return Type::lolli(name_child(t.left(), ""), name_child(t.right(), ""), t.span());
      case Type::Kind::One:
      case Type::Kind::Name: return t;
      case Type::Kind::Assert:
        return Type::assert_t(t.prop(), name_child(t.cont(), ""), t.span());
      case Type::Kind::Assume:
        return Type::assume_t(t.prop(), name_child(t.cont(), ""), t.span());
      case Type::Kind::Exists:
        return Type::exists_t(t.bound_var(), name_child(t.cont(), ""), t.span());
      case Type::Kind::Forall:
        return Type::forall_t(t.bound_var(), name_child(t.cont(), ""), t.span());
      case Type::Kind::PayPot:
        return Type::paypot(t.potential(), name_child(t.cont(), ""), t.span());
      case Type::Kind::GetPot:
        return Type::getpot(t.potential(), name_child(t.cont(), ""), t.span());
    }
    throw std::logic_error("elaborate: bad kind");
  }

  // Declaration positions may be arbitrary types, including bare names.
  Type elaborate_position(const Type& t) {
    if (t.kind() == Type::Kind::Name) return t;
    return elaborate(t);
  }
};

}  // namespace

Signature elaborate_internal_names(const Signature& sig) {
  Signature out;
  out.decls = sig.decls;
  out.defs = sig.defs;
  for (auto& td : sig.types) {
    if (td.generated) {  // already elaborated: keep as-is
      out.types.push_back(td);
      continue;
    }
    Elaborator el;
    el.base = td.name;
    Type body = el.elaborate(td.body);
    out.types.push_back(TypeDef{td.name, td.params, body, td.span, false});
    for (auto& g : el.generated) out.types.push_back(g);
  }
  for (auto& d : out.decls) {
    Elaborator el;
    el.base = d.name;
    for (auto& [c, ty] : d.channels) ty = el.elaborate_position(ty);
    d.offered = el.elaborate_position(d.offered);
    for (auto& g : el.generated) out.types.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polarity

Polarity polarize(const Signature& sig, const Type& t) {
  std::set<std::string> seen;
  Type cur = t;
  int mode = 0;  // 0 neutral, +1 positive, -1 negative
  for (;;) {
    switch (cur.kind()) {
      case Type::Kind::Assert:
      case Type::Kind::PayPot:
        if (mode < 0) return Polarity::IllPolarized;
        mode = 1;
        cur = cur.cont();
        break;
      case Type::Kind::Assume:
      case Type::Kind::GetPot:
        if (mode > 0) return Polarity::IllPolarized;
        mode = -1;
        cur = cur.cont();
        break;
      case Type::Kind::Name: {
        if (!seen.insert(cur.id()).second) return Polarity::IllPolarized;
        cur = unfold(sig, cur);
        break;
      }
      default:
        if (mode > 0) return Polarity::Positive;
        if (mode < 0) return Polarity::Negative;
        return Polarity::NeutralStructural;
    }
  }
}

bool is_structural(const Signature& sig, const Type& t) {
  return polarize(sig, t) == Polarity::NeutralStructural;
}

}  // namespace ergo

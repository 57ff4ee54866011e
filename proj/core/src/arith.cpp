#include "ergo/arith.hpp"

#include <algorithm>

namespace ergo {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

Exp Exp::num(uint64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = value;
  return Exp(std::move(n));
}

Exp Exp::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Exp(std::move(n));
}

Exp Exp::add(Exp a, Exp b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->lhs = {std::move(a), std::move(b)};
  return Exp(std::move(n));
}

Exp Exp::sub(Exp a, Exp b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->lhs = {std::move(a), std::move(b)};
  return Exp(std::move(n));
}

Exp Exp::mul(uint64_t coeff, Exp e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->value = coeff;
  n->lhs = {std::move(e)};
  return Exp(std::move(n));
}

bool Exp::closed() const {
  switch (kind()) {
    case Kind::Const: return true;
    case Kind::Var: return false;
    case Kind::Add:
    case Kind::Sub: return lhs().closed() && rhs().closed();
    case Kind::Mul: return operand().closed();
  }
  return false;
}

void Exp::free_vars(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Const: return;
    case Kind::Var:
      if (!contains(out, name())) out.push_back(name());
      return;
    case Kind::Add:
    case Kind::Sub:
      lhs().free_vars(out);
      rhs().free_vars(out);
      return;
    case Kind::Mul: operand().free_vars(out); return;
  }
}

bool Exp::mentions(const std::string& v) const {
  switch (kind()) {
    case Kind::Const: return false;
    case Kind::Var: return name() == v;
    case Kind::Add:
    case Kind::Sub: return lhs().mentions(v) || rhs().mentions(v);
    case Kind::Mul: return operand().mentions(v);
  }
  return false;
}

bool Exp::structurally_equal(const Exp& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Const: return value() == o.value();
    case Kind::Var: return name() == o.name();
    case Kind::Add:
    case Kind::Sub:
      return lhs().structurally_equal(o.lhs()) && rhs().structurally_equal(o.rhs());
    case Kind::Mul:
      return value() == o.value() && operand().structurally_equal(o.operand());
  }
  return false;
}

Prop Prop::eq(Exp a, Exp b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Eq;
  n->exps = {std::move(a), std::move(b)};
  return Prop(std::move(n));
}

Prop Prop::gt(Exp a, Exp b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Gt;
  n->exps = {std::move(a), std::move(b)};
  return Prop(std::move(n));
}

Prop Prop::top() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Top;
  return Prop(std::move(n));
}

Prop Prop::bot() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bot;
  return Prop(std::move(n));
}

Prop Prop::conj(Prop a, Prop b) {
  if (a.kind() == Kind::Top) return b;
  if (b.kind() == Kind::Top) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->props = {std::move(a), std::move(b)};
  return Prop(std::move(n));
}

Prop Prop::disj(Prop a, Prop b) {
  if (a.kind() == Kind::Bot) return b;
  if (b.kind() == Kind::Bot) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->props = {std::move(a), std::move(b)};
  return Prop(std::move(n));
}

Prop Prop::neg(Prop a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->props = {std::move(a)};
  return Prop(std::move(n));
}

Prop Prop::exists(std::string var, Prop body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->name = std::move(var);
  n->props = {std::move(body)};
  return Prop(std::move(n));
}

Prop Prop::forall(std::string var, Prop body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->name = std::move(var);
  n->props = {std::move(body)};
  return Prop(std::move(n));
}

Prop Prop::divides(uint64_t d, Exp e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Divides;
  n->value = d;
  n->exps = {std::move(e)};
  return Prop(std::move(n));
}

Prop Prop::iff(Prop a, Prop b) {
  return conj(disj(neg(a), b), disj(neg(b), a));
}

bool Prop::closed() const {
  std::vector<std::string> fv;
  free_vars(fv);
  return fv.empty();
}

bool Prop::quantifier_free() const {
  switch (kind()) {
    case Kind::Exists:
    case Kind::Forall: return false;
    case Kind::And:
    case Kind::Or: return lhs().quantifier_free() && rhs().quantifier_free();
    case Kind::Not: return body().quantifier_free();
    default: return true;
  }
}

void Prop::free_vars(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Eq:
    case Kind::Gt:
      exp_lhs().free_vars(out);
      exp_rhs().free_vars(out);
      return;
    case Kind::Divides: divided().free_vars(out); return;
    case Kind::Top:
    case Kind::Bot: return;
    case Kind::And:
    case Kind::Or:
      lhs().free_vars(out);
      rhs().free_vars(out);
      return;
    case Kind::Not: body().free_vars(out); return;
    case Kind::Exists:
    case Kind::Forall: {
      std::vector<std::string> inner;
      body().free_vars(inner);
      for (auto& v : inner)
        if (v != var() && !contains(out, v)) out.push_back(v);
      return;
    }
  }
}

bool Prop::mentions(const std::string& v) const {
  std::vector<std::string> fv;
  free_vars(fv);
  return contains(fv, v);
}

bool Prop::structurally_equal(const Prop& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Eq:
    case Kind::Gt:
      return exp_lhs().structurally_equal(o.exp_lhs()) &&
             exp_rhs().structurally_equal(o.exp_rhs());
    case Kind::Divides:
      return divisor() == o.divisor() && divided().structurally_equal(o.divided());
    case Kind::Top:
    case Kind::Bot: return true;
    case Kind::And:
    case Kind::Or:
      return lhs().structurally_equal(o.lhs()) && rhs().structurally_equal(o.rhs());
    case Kind::Not: return body().structurally_equal(o.body());
    case Kind::Exists:
    case Kind::Forall:
      return var() == o.var() && body().structurally_equal(o.body());
  }
  return false;
}

VarCtx::VarCtx(std::vector<std::string> names) : names_(std::move(names)) {
  for (size_t i = 0; i < names_.size(); ++i)
    for (size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j])
        throw std::invalid_argument("duplicate index variable: " + names_[i]);
}

VarCtx VarCtx::extended(const std::string& name) const {
  std::vector<std::string> next = names_;
  next.push_back(name);
  return VarCtx(std::move(next));
}

bool VarCtx::contains(const std::string& name) const {
  return ergo::contains(names_, name);
}

uint64_t eval_exp(const Exp& e, const Env& env) {
  switch (e.kind()) {
    case Exp::Kind::Const: return e.value();
    case Exp::Kind::Var: {
      auto it = env.find(e.name());
      if (it == env.end())
        throw std::logic_error("unbound index variable in evaluation: " + e.name());
      return it->second;
    }
    case Exp::Kind::Add: return eval_exp(e.lhs(), env) + eval_exp(e.rhs(), env);
    case Exp::Kind::Sub: {
      uint64_t a = eval_exp(e.lhs(), env);
      uint64_t b = eval_exp(e.rhs(), env);
      if (b > a) throw UnderflowError("natural subtraction underflow: " + show(e));
      return a - b;
    }
    case Exp::Kind::Mul: return e.value() * eval_exp(e.operand(), env);
  }
  throw std::logic_error("eval_exp: bad kind");
}

bool eval_prop(const Prop& p, const Env& env) {
  switch (p.kind()) {
    case Prop::Kind::Eq: return eval_exp(p.exp_lhs(), env) == eval_exp(p.exp_rhs(), env);
    case Prop::Kind::Gt: return eval_exp(p.exp_lhs(), env) > eval_exp(p.exp_rhs(), env);
    case Prop::Kind::Top: return true;
    case Prop::Kind::Bot: return false;
    case Prop::Kind::And: return eval_prop(p.lhs(), env) && eval_prop(p.rhs(), env);
    case Prop::Kind::Or: return eval_prop(p.lhs(), env) || eval_prop(p.rhs(), env);
    case Prop::Kind::Not: return !eval_prop(p.body(), env);
    case Prop::Kind::Divides: return eval_exp(p.divided(), env) % p.divisor() == 0;
    case Prop::Kind::Exists:
    case Prop::Kind::Forall:
      throw std::logic_error("eval_prop: quantified proposition");
  }
  throw std::logic_error("eval_prop: bad kind");
}

namespace {

Exp fold(const Exp& e) {
  if (e.kind() == Exp::Kind::Const || e.kind() == Exp::Kind::Var) return e;
  if (!e.closed()) return e;
  try {
    return Exp::num(eval_exp(e));
  } catch (const UnderflowError&) {
    return e;  // leave underflowing closed subtractions symbolic
  }
}

}  // namespace

Exp subst_idx(const Exp& e, const Subst& s) {
  switch (e.kind()) {
    case Exp::Kind::Const: return e;
    case Exp::Kind::Var: {
      auto it = s.find(e.name());
      return it == s.end() ? e : it->second;
    }
    case Exp::Kind::Add: return fold(Exp::add(subst_idx(e.lhs(), s), subst_idx(e.rhs(), s)));
    case Exp::Kind::Sub: return fold(Exp::sub(subst_idx(e.lhs(), s), subst_idx(e.rhs(), s)));
    case Exp::Kind::Mul: return fold(Exp::mul(e.value(), subst_idx(e.operand(), s)));
  }
  throw std::logic_error("subst_idx: bad kind");
}

Prop subst_idx(const Prop& p, const Subst& s) {
  switch (p.kind()) {
    case Prop::Kind::Eq:
      return Prop::eq(subst_idx(p.exp_lhs(), s), subst_idx(p.exp_rhs(), s));
    case Prop::Kind::Gt:
      return Prop::gt(subst_idx(p.exp_lhs(), s), subst_idx(p.exp_rhs(), s));
    case Prop::Kind::Top:
    case Prop::Kind::Bot: return p;
    case Prop::Kind::And:
      return Prop::conj(subst_idx(p.lhs(), s), subst_idx(p.rhs(), s));
    case Prop::Kind::Or:
      return Prop::disj(subst_idx(p.lhs(), s), subst_idx(p.rhs(), s));
    case Prop::Kind::Not: return Prop::neg(subst_idx(p.body(), s));
    case Prop::Kind::Divides:
      return Prop::divides(p.divisor(), subst_idx(p.divided(), s));
    case Prop::Kind::Exists:
    case Prop::Kind::Forall: {
      Subst inner = s;
      inner.erase(p.var());
      if (inner.empty()) return p;
      // Rename the binder when a replacement would capture it.
      bool capture = false;
      for (auto& [_, rep] : inner)
        if (rep.mentions(p.var())) { capture = true; break; }
      std::string bound = p.var();
      Prop body = p.body();
      if (capture) {
        std::vector<std::string> avoid;
        body.free_vars(avoid);
        for (auto& [from, rep] : inner) {
          avoid.push_back(from);
          rep.free_vars(avoid);
        }
        bound = fresh_name(p.var(), avoid);
        body = subst_idx(body, Subst{{p.var(), Exp::var(bound)}});
      }
      Prop out = subst_idx(body, inner);
      return p.kind() == Prop::Kind::Exists ? Prop::exists(bound, out)
                                            : Prop::forall(bound, out);
    }
  }
  throw std::logic_error("subst_idx: bad kind");
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid) {
  std::string name = base;
  while (contains(avoid, name)) name += '\'';
  return name;
}

namespace {

// Rendering precedence: additive 1, multiplicative 2, atoms 3.
void show_exp(const Exp& e, int level, std::string& out) {
  switch (e.kind()) {
    case Exp::Kind::Const: out += std::to_string(e.value()); return;
    case Exp::Kind::Var: out += e.name(); return;
    case Exp::Kind::Add:
    case Exp::Kind::Sub: {
      bool paren = level > 1;
      if (paren) out += '(';
      show_exp(e.lhs(), 1, out);
      out += e.kind() == Exp::Kind::Add ? "+" : "-";
      show_exp(e.rhs(), 2, out);
      if (paren) out += ')';
      return;
    }
    case Exp::Kind::Mul: {
      bool paren = level > 2;
      if (paren) out += '(';
      out += std::to_string(e.value());
      out += '*';
      show_exp(e.operand(), 3, out);
      if (paren) out += ')';
      return;
    }
  }
}

// Precedence: quantifiers 0, \/ 1, /\ 2, ~ 3, atoms 4.
void show_prop(const Prop& p, int level, std::string& out) {
  switch (p.kind()) {
    case Prop::Kind::Eq:
    case Prop::Kind::Gt:
      show_exp(p.exp_lhs(), 1, out);
      out += p.kind() == Prop::Kind::Eq ? " = " : " > ";
      show_exp(p.exp_rhs(), 1, out);
      return;
    case Prop::Kind::Top: out += "true"; return;
    case Prop::Kind::Bot: out += "false"; return;
    case Prop::Kind::Divides:
      out += '(';
      out += std::to_string(p.divisor());
      out += '|';
      show_exp(p.divided(), 1, out);
      out += ')';
      return;
    case Prop::Kind::And: {
      bool paren = level > 2;
      if (paren) out += '(';
      show_prop(p.lhs(), 2, out);
      out += " /\\ ";
      show_prop(p.rhs(), 3, out);
      if (paren) out += ')';
      return;
    }
    case Prop::Kind::Or: {
      bool paren = level > 1;
      if (paren) out += '(';
      show_prop(p.lhs(), 1, out);
      out += " \\/ ";
      show_prop(p.rhs(), 2, out);
      if (paren) out += ')';
      return;
    }
    case Prop::Kind::Not: {
      out += '~';
      show_prop(p.body(), 4, out);
      return;
    }
    case Prop::Kind::Exists:
    case Prop::Kind::Forall: {
      bool paren = level > 0;
      if (paren) out += '(';
      out += p.kind() == Prop::Kind::Exists ? '?' : '!';
      out += p.var();
      out += ". ";
      show_prop(p.body(), 0, out);
      if (paren) out += ')';
      return;
    }
  }
}

}  // namespace

std::string show(const Exp& e) {
  std::string out;
  show_exp(e, 1, out);
  return out;
}

std::string show(const Prop& p) {
  std::string out;
  show_prop(p, 0, out);
  return out;
}

}  // namespace ergo

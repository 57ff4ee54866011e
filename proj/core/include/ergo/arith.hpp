#ifndef ERGO_ARITH_HPP
#define ERGO_ARITH_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergo {

/// Raised when natural subtraction would go below zero during evaluation.
/// Reaching this at runtime signals a validity-checking bug upstream, so it
/// is an error rather than a truncation.
struct UnderflowError : std::runtime_error {
  explicit UnderflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a variable-by-variable product is formed. The index domain is
/// linear arithmetic; nonlinear constraints are rejected, not solved.
struct NonlinearError : std::runtime_error {
  explicit NonlinearError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear arithmetic expression over natural numbers.
/// Multiplication always has a constant coefficient on one side.
class Exp {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul };

  Exp() : Exp(num(0)) {}

  static Exp num(uint64_t value);
  static Exp var(std::string name);
  static Exp add(Exp a, Exp b);
  static Exp sub(Exp a, Exp b);
  static Exp mul(uint64_t coeff, Exp e);

  Kind kind() const { return node_->kind; }
  uint64_t value() const { return node_->value; }  // Const coefficient or literal
  const std::string& name() const { return node_->name; }
  const Exp& lhs() const { return node_->lhs[0]; }
  const Exp& rhs() const { return node_->lhs[1]; }
  const Exp& operand() const { return node_->lhs[0]; }  // Mul

  bool closed() const;
  void free_vars(std::vector<std::string>& out) const;  // first-occurrence order
  bool mentions(const std::string& v) const;

  bool structurally_equal(const Exp& other) const;

 private:
  struct Node {
    Kind kind;
    uint64_t value = 0;
    std::string name;
    std::vector<Exp> lhs;  // binary ops use [0],[1]; Mul uses [0]
  };
  std::shared_ptr<const Node> node_;
  explicit Exp(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

/// Arithmetic proposition. Divisibility atoms only arise inside the
/// quantifier-elimination pipeline; they print for debugging but do not parse.
class Prop {
 public:
  enum class Kind { Eq, Gt, Top, Bot, And, Or, Not, Exists, Forall, Divides };

  Prop() : Prop(top()) {}

  static Prop eq(Exp a, Exp b);
  static Prop gt(Exp a, Exp b);
  static Prop top();
  static Prop bot();
  static Prop conj(Prop a, Prop b);
  static Prop disj(Prop a, Prop b);
  static Prop neg(Prop a);
  static Prop exists(std::string var, Prop body);
  static Prop forall(std::string var, Prop body);
  static Prop divides(uint64_t d, Exp e);

  // Derived comparisons (over naturals, a >= b iff a+1 > b).
  static Prop ge(Exp a, Exp b) { return gt(Exp::add(std::move(a), Exp::num(1)), std::move(b)); }
  static Prop lt(Exp a, Exp b) { return gt(std::move(b), std::move(a)); }
  static Prop le(Exp a, Exp b) { return ge(std::move(b), std::move(a)); }
  static Prop iff(Prop a, Prop b);

  Kind kind() const { return node_->kind; }
  const Exp& exp_lhs() const { return node_->exps[0]; }
  const Exp& exp_rhs() const { return node_->exps[1]; }
  const Prop& lhs() const { return node_->props[0]; }
  const Prop& rhs() const { return node_->props[1]; }
  const Prop& body() const { return node_->props[0]; }  // Not / Exists / Forall
  const std::string& var() const { return node_->name; }
  uint64_t divisor() const { return node_->value; }
  const Exp& divided() const { return node_->exps[0]; }

  bool closed() const;
  bool quantifier_free() const;
  void free_vars(std::vector<std::string>& out) const;
  bool mentions(const std::string& v) const;

  bool structurally_equal(const Prop& other) const;

 private:
  struct Node {
    Kind kind;
    uint64_t value = 0;
    std::string name;
    std::vector<Exp> exps;
    std::vector<Prop> props;
  };
  std::shared_ptr<const Node> node_;
  explicit Prop(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

/// Ordered set of index-variable names: the variable context of judgments.
class VarCtx {
 public:
  VarCtx() = default;
  explicit VarCtx(std::vector<std::string> names);

  VarCtx extended(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  bool empty() const { return names_.empty(); }
  size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

using Env = std::map<std::string, uint64_t>;

/// Evaluates a closed expression; subtraction is exact (errors on underflow).
uint64_t eval_exp(const Exp& e, const Env& env = {});

/// Evaluates a closed, quantifier-free proposition.
bool eval_prop(const Prop& p, const Env& env = {});

/// Quantifier elimination over the naturals: Cooper's method with a
/// lower-bound-only expansion (solutions are bounded below by zero) and
/// substitution of x = e equations before expansion. The result has the same
/// free variables, no quantifiers, and evaluates without subtraction.
Prop qe_cooper(const Prop& p);

/// Semantic entailment: forall V. C -> phi over the naturals.
/// Free variables of C and phi must be contained in V.
bool entails(const VarCtx& vars, const Prop& constraint, const Prop& phi);

/// True iff phi is unsatisfiable under the context (V ; C |= false).
bool unsatisfiable(const VarCtx& vars, const Prop& constraint);

/// Checks that every subtraction in e is provably non-negative under the
/// constraint, innermost-out. Returns the first offending subexpression.
struct NatCheck {
  bool ok = true;
  Exp failing;  // meaningful when !ok
};
NatCheck check_nat(const VarCtx& vars, const Prop& constraint, const Exp& e);

using Subst = std::map<std::string, Exp>;

/// Capture-avoiding simultaneous substitution. Closed subexpressions are
/// folded to constants (underflowing folds are left symbolic).
Exp subst_idx(const Exp& e, const Subst& s);
Prop subst_idx(const Prop& p, const Subst& s);

/// Normalizes an expression to a linear combination and re-renders it, or
/// returns nothing when a coefficient is negative. Used to simplify drained
/// potentials; returns Exp::num(0) for the zero combination.
struct Linearized {
  bool ok = false;
  Exp exp;
  bool is_zero = false;
};
Linearized linearize_exp(const Exp& e);

// Concrete-syntax rendering, used verbatim inside diagnostics.
std::string show(const Exp& e);
std::string show(const Prop& p);

std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid);

}  // namespace ergo

#endif  // ERGO_ARITH_HPP

#ifndef ERGO_SYNTAX_HPP
#define ERGO_SYNTAX_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergo/arith.hpp"

namespace ergo {

/// Byte range into the source buffer; attached to every AST node.
struct Span {
  uint32_t start = 0;
  uint32_t end = 0;
  bool empty() const { return start == end; }
};

/// Session type. After internal-name elaboration every structural
/// constructor's children are type names.
class Type {
 public:
  enum class Kind {
    IChoice,  // +{l : A, ...}
    EChoice,  // &{l : A, ...}
    Tensor,   // A * B
    Lolli,    // A -o B
    One,      // 1
    Name,     // V{e}...{e}
    Assert,   // ?{phi}. A
    Assume,   // !{phi}. A
    Exists,   // ?n. A
    Forall,   // !n. A
    PayPot,   // |{r}> A
    GetPot    // <{r}| A
  };

  Type() = default;
  bool valid_node() const { return node_ != nullptr; }

  static Type ichoice(std::vector<std::pair<std::string, Type>> branches, Span sp = {});
  static Type echoice(std::vector<std::pair<std::string, Type>> branches, Span sp = {});
  static Type tensor(Type a, Type b, Span sp = {});
  static Type lolli(Type a, Type b, Span sp = {});
  static Type one(Span sp = {});
  static Type name(std::string id, std::vector<Exp> args, Span sp = {});
  static Type assert_t(Prop phi, Type a, Span sp = {});
  static Type assume_t(Prop phi, Type a, Span sp = {});
  static Type exists_t(std::string var, Type a, Span sp = {});
  static Type forall_t(std::string var, Type a, Span sp = {});
  static Type paypot(Exp r, Type a, Span sp = {});
  static Type getpot(Exp r, Type a, Span sp = {});

  Kind kind() const { return node_->kind; }
  Span span() const { return node_->span; }
  const std::vector<std::pair<std::string, Type>>& branches() const { return node_->branches; }
  const Type& left() const { return node_->kids[0]; }   // Tensor/Lolli
  const Type& right() const { return node_->kids[1]; }  // Tensor/Lolli
  const Type& cont() const { return node_->kids[0]; }   // prefix constructors
  const std::string& id() const { return node_->id; }   // Name
  const std::vector<Exp>& args() const { return node_->args; }
  const Prop& prop() const { return node_->prop; }      // Assert/Assume
  const std::string& bound_var() const { return node_->id; }  // Exists/Forall
  const Exp& potential() const { return node_->pot; }   // PayPot/GetPot

  const Type* find_branch(const std::string& label) const;

  bool structurally_equal(const Type& other) const;
  void free_idx_vars(std::vector<std::string>& out) const;

 private:
  struct Node {
    Kind kind;
    Span span;
    std::string id;
    std::vector<Exp> args;
    Prop prop;
    Exp pot;
    std::vector<Type> kids;
    std::vector<std::pair<std::string, Type>> branches;
  };
  std::shared_ptr<const Node> node_;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

Type subst_idx(const Type& t, const Subst& s);

/// Process expression.
class Process {
 public:
  enum class Kind {
    Fwd,        // x <- y
    Spawn,      // x <- f{e}... <- ys ; P
    SendLabel,  // x.k ; P
    Case,       // case x ( l => P | ... )
    SendChan,   // send x w ; P
    RecvChan,   // y <- recv x ; P
    Close,      // close x
    Wait,       // wait x ; P
    SendIdx,    // send x {e} ; P
    RecvIdx,    // {n} <- recv x ; P
    AssertP,    // assert x {phi} ; P
    AssumeP,    // assume x {phi} ; P
    Pay,        // pay x {r} ; P
    Get,        // get x {r} ; P
    Work,       // work {r} ; P
    Impossible  // impossible
  };

  Process() = default;
  bool valid_node() const { return node_ != nullptr; }

  static Process fwd(std::string x, std::string y, Span sp = {});
  static Process spawn(std::string x, std::string callee, std::vector<Exp> idx_args,
                       std::vector<std::string> chan_args, Process cont, Span sp = {});
  static Process send_label(std::string x, std::string label, Process cont, Span sp = {});
  static Process case_of(std::string x, std::vector<std::pair<std::string, Process>> branches,
                         Span sp = {});
  static Process send_chan(std::string x, std::string w, Process cont, Span sp = {});
  static Process recv_chan(std::string x, std::string y, Process cont, Span sp = {});
  static Process close(std::string x, Span sp = {});
  static Process wait(std::string x, Process cont, Span sp = {});
  static Process send_idx(std::string x, Exp e, Process cont, Span sp = {});
  static Process recv_idx(std::string x, std::string n, Process cont, Span sp = {});
  static Process assert_p(std::string x, Prop phi, Process cont, Span sp = {});
  static Process assume_p(std::string x, Prop phi, Process cont, Span sp = {});
  static Process pay(std::string x, Exp r, Process cont, Span sp = {});
  static Process get(std::string x, Exp r, Process cont, Span sp = {});
  static Process work(Exp r, Process cont, Span sp = {});
  static Process impossible(Span sp = {});

  Kind kind() const { return node_->kind; }
  Span span() const { return node_->span; }
  const std::string& chan() const { return node_->chan; }      // subject channel
  const std::string& chan2() const { return node_->chan2; }    // Fwd target / sent / bound
  const std::string& label() const { return node_->label; }
  const std::string& callee() const { return node_->label; }   // Spawn
  const std::vector<Exp>& idx_args() const { return node_->exps; }
  const std::vector<std::string>& chan_args() const { return node_->chans; }
  const Exp& exp() const { return node_->exps[0]; }            // SendIdx/Pay/Get/Work
  const Prop& prop() const { return node_->prop; }
  const Process& cont() const { return node_->kids[0]; }
  const std::vector<std::pair<std::string, Process>>& branches() const { return node_->branches; }

  bool has_cont() const { return !node_->kids.empty(); }
  Process with_cont(Process new_cont) const;

  bool structurally_equal(const Process& other) const;  // ignores spans
  size_t node_count() const;
  void free_chans(std::vector<std::string>& out) const;

 private:
  struct Node {
    Kind kind;
    Span span;
    std::string chan, chan2, label;
    std::vector<Exp> exps;
    std::vector<std::string> chans;
    Prop prop;
    std::vector<Process> kids;
    std::vector<std::pair<std::string, Process>> branches;
  };
  std::shared_ptr<const Node> node_;
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

/// Renames channel occurrences (free occurrences only; binders shadow).
Process rename_chan(const Process& p, const std::string& from, const std::string& to);
/// Substitutes index expressions within a process body.
Process subst_idx(const Process& p, const Subst& s);

struct TypeDef {
  std::string name;
  std::vector<std::string> params;
  Type body;
  Span span;
  bool generated = false;  // internal name introduced by elaboration
};

struct ProcDecl {
  std::string name;
  std::vector<std::string> params;
  Prop constraint;  // conjunction of the {n|phi} parts, Top when absent
  std::vector<std::pair<std::string, Type>> channels;  // used channels
  Exp potential;
  std::string offered_chan;
  Type offered;
  Span span;
};

struct ProcDef {
  std::string name;
  std::string offered_chan;
  std::vector<std::string> channel_names;
  Process body;
  Span span;
};

struct SignatureError : std::runtime_error {
  Span span;
  SignatureError(std::string msg, Span sp) : std::runtime_error(std::move(msg)), span(sp) {}
};

class Signature {
 public:
  std::vector<TypeDef> types;
  std::vector<ProcDecl> decls;
  std::vector<ProcDef> defs;

  const TypeDef* find_type(const std::string& name) const;
  const ProcDecl* find_decl(const std::string& name) const;
  const ProcDef* find_def(const std::string& name) const;

  /// Checks arities, definition/declaration pairing, duplicate names, and
  /// contractivity. Throws SignatureError.
  void validate_structure() const;
};

/// One-step definition expansion; identity on structural types. The result is
/// never a bare name (contractivity is enforced at signature load).
Type unfold(const Signature& sig, const Type& t);

/// Type validity: every index expression provably denotes a natural under the
/// constraints accumulated along the path.
struct ValidityError {
  std::string path;  // constructor/label trail
  Exp failing;
  Span span;
};
std::optional<ValidityError> check_type_valid(const Signature& sig, const VarCtx& vars,
                                              const Prop& constraint, const Type& t);
/// Validity for a whole signature (type definitions and declaration types).
std::optional<ValidityError> check_signature_valid(const Signature& sig);

/// Assigns internal names to structural subexpressions of every type in the
/// signature. Generated names start with '%', are parameterized over exactly
/// their free index variables in first-occurrence order, and render as their
/// source form in diagnostics.
Signature elaborate_internal_names(const Signature& sig);

enum class Polarity { Positive, Negative, NeutralStructural, IllPolarized };

/// Polarity of the prefix chain: asserts/paypots are positive, assumes/getpots
/// negative, structural constructors neutral. Mixed chains are ill-polarized.
Polarity polarize(const Signature& sig, const Type& t);

/// A type is structural at the top when its prefix chain is empty.
bool is_structural(const Signature& sig, const Type& t);

}  // namespace ergo

#endif  // ERGO_SYNTAX_HPP

#ifndef ERGO_TYPECHECK_HPP
#define ERGO_TYPECHECK_HPP

#include <optional>
#include <string>
#include <vector>

#include "ergo/parser.hpp"
#include "ergo/recon.hpp"
#include "ergo/syntax.hpp"

namespace ergo {

enum class ErrCat {
  LabelMismatch,
  AssertionNotEntailed,
  InsufficientPotential,
  ChannelMisuse,
  LeftoverContext,
  TypeMismatch,
  UnknownName,
  NotImpossible,
};

const char* err_category_name(ErrCat c);

struct CheckError {
  ErrCat category;
  Span span;
  std::string rendered;  // the failing judgment in concrete syntax

  Diagnostic to_diagnostic() const {
    return Diagnostic{err_category_name(category), rendered, span};
  }
};

/// The typing sequent V ; C ; Delta |-{q} P :: (x : A).
struct Sequent {
  VarCtx vars;
  Prop constraint;
  std::vector<std::pair<std::string, Type>> delta;
  Exp potential;
  std::string offered_chan;
  Type offered;
};

/// Explicit, syntax-directed checking. The signature must be elaborated.
std::optional<CheckError> check_process(const Signature& sig, Sequent seq,
                                        const Process& p);

enum class SyntaxMode { Explicit, Implicit };

struct DefReport {
  std::string name;
  std::optional<CheckError> error;
  double recon_ms = 0.0;
  double check_ms = 0.0;
  bool ok() const { return !error.has_value(); }
};

struct SigReport {
  std::optional<Diagnostic> global;  // structure/validity/polarization failure
  std::vector<DefReport> defs;
  /// The reconstructed signature (implicit mode) or the input (explicit mode).
  Signature checked;
  bool ok() const;
};

/// Validity-checks, elaborates, reconstructs (implicit mode), and checks
/// every definition.
SigReport check_signature(const Signature& parsed, SyntaxMode mode,
                          const CostModel& cost);

/// Removes assert/assume/pay/get/work constructs and impossible branches.
Process erase(const Process& p);

}  // namespace ergo

#endif  // ERGO_TYPECHECK_HPP

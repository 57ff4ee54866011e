#ifndef ERGO_RECON_HPP
#define ERGO_RECON_HPP

#include <optional>
#include <string>

#include "ergo/parser.hpp"
#include "ergo/syntax.hpp"

namespace ergo {

/// What counts as work. Index, constraint, and potential messages are always
/// exempt; only real communication is metered.
struct CostModel {
  enum class Kind { None, Send, Recv, Flat } kind = Kind::None;
  uint64_t flat = 0;  // per-operation cost under Flat (sends and receives)

  static CostModel none() { return {Kind::None, 0}; }
  static CostModel send() { return {Kind::Send, 0}; }
  static CostModel recv() { return {Kind::Recv, 0}; }
  static CostModel flat_cost(uint64_t r) { return {Kind::Flat, r}; }
};

struct ReconError : std::runtime_error {
  std::string category;  // "ill-polarized type" | "forcing failed" | "unknown label" | ...
  Span span;
  std::string snapshot;  // sequent snapshot in concrete syntax (may be empty)
  ReconError(std::string cat, std::string msg, Span sp, std::string snap = "")
      : std::runtime_error(std::move(msg)),
        category(std::move(cat)),
        span(sp),
        snapshot(std::move(snap)) {}
};

/// Recon-mode validity: every type polarizes and every declaration is
/// structural at the top level.
std::optional<Diagnostic> check_polarizable(const Signature& sig);

/// Completes case expressions with `label => impossible` branches for labels
/// present in the type but absent in source. Extra source labels are errors.
Process recon_branches(const Signature& sig, const ProcDecl& decl, const ProcDef& def);

/// Forcing-calculus reconstruction: assume/get inserted eagerly at inversion
/// points, assert/pay lazily right before the next structural action on the
/// channel. Entailment side conditions are deferred to the final explicit
/// check; inserted constructs carry the span of the triggering source action.
Process recon_force(const Signature& sig, const ProcDecl& decl, const ProcDef& def,
                    const Process& body);

/// Inserts work per cost model, and a final drain so leaf potentials are zero.
/// A send's work lands after its asserts but before its pays.
Process insert_work(const Signature& sig, const ProcDecl& decl, const Process& body,
                    const CostModel& model);

/// Branches, then constraints and potential, then work.
Process reconstruct_def(const Signature& sig, const ProcDecl& decl, const ProcDef& def,
                        const CostModel& model);
Signature reconstruct(const Signature& sig, const CostModel& model);

}  // namespace ergo

#endif  // ERGO_RECON_HPP

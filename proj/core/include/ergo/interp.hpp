#ifndef ERGO_INTERP_HPP
#define ERGO_INTERP_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergo/typecheck.hpp"

namespace ergo {

struct InterpError : std::runtime_error {
  std::string kind;  // "NonEmptyContext" | "ConstraintUnsatisfied" | ...
  InterpError(std::string k, const std::string& msg)
      : std::runtime_error(msg), kind(std::move(k)) {}
};

struct Msg {
  enum class Payload { Label, Channel, Close, Index, Assert, Pay };
  Payload payload;
  bool from_provider = true;
  std::string on;    // the channel communicated on
  std::string cont;  // continuation channel (empty for Close)
  std::string label;
  std::string chan;
  uint64_t index = 0;
  Prop prop;
  uint64_t amount = 0;
};

/// proc(c, w, P) or msg(c, w, M), extended with a runtime potential counter
/// mirroring the static annotation.
struct SemObject {
  bool is_msg = false;
  std::string provides;
  uint64_t work = 0;
  uint64_t potential = 0;
  Process body;  // proc body, or the message's process form
  Msg msg;       // valid when is_msg
  uint64_t seq = 0;
};

struct StepResult {
  enum class Kind { Stepped, Poised, Stuck };
  Kind kind = Kind::Poised;
  std::string rule;
  std::string detail;                 // stuck reason
  std::vector<std::string> channels;  // channels the rule touched
};

class Configuration {
 public:
  std::vector<SemObject> objects;  // creation order
  std::map<std::string, Type> chan_types;
  std::string external;       // current external channel
  std::string external_name;  // stable display name for the trace
  std::vector<std::string> trace;
  uint64_t observed_work = 0;
  uint64_t observed_potential = 0;
  uint64_t fresh_counter = 0;
  uint64_t seq_counter = 0;
  bool debug_checks = true;  // evaluate closed assert/assume props

  std::shared_ptr<const Signature> sig;       // executable signature
  std::shared_ptr<const Signature> sig_elab;  // elaborated, for typing

  uint64_t total_work() const;
  uint64_t total_potential() const;

  std::string fresh_chan();
};

/// proc(a, 0, P_f[...]) with the potential counter initialized from the
/// declaration. The process must have an empty channel context and satisfy
/// its declaration constraint at the given indices.
Configuration spawn_config(const Signature& sig, const std::string& proc,
                           const std::vector<uint64_t>& idx_args);

/// One deterministic step: first applicable rule in object-creation order.
StepResult step(Configuration& cfg);

struct RunResult {
  StepResult::Kind outcome = StepResult::Kind::Poised;
  std::string detail;
  uint64_t steps = 0;
  bool budget_exhausted = false;
  uint64_t work = 0;       // total, including messages observed externally
  uint64_t potential = 0;  // remaining
  std::vector<std::string> trace;
};

/// Steps until poised or the budget runs out, draining messages on the
/// external channel into the trace. Checks energy conservation every step.
RunResult run(Configuration& cfg, uint64_t budget);

/// Re-derives a configuration typing: every object checks at its tracked
/// potential with ground indices.
struct ConfigTypeError {
  std::string provides;
  CheckError error;
};
std::optional<ConfigTypeError> type_config(const Configuration& cfg);

}  // namespace ergo

#endif  // ERGO_INTERP_HPP

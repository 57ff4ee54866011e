#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ergo/interp.hpp"
#include "ergo/parser.hpp"
#include "ergo/recon.hpp"
#include "ergo/typecheck.hpp"
#include "ergo/typeeq.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatic = 1;
constexpr int kExitParse = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string input;
  std::string syntax = "implicit";
  std::string cost = "none";
  bool json = false;
  int verbosity = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ergo::CostModel parse_cost(const std::string& s) {
  if (s == "none") return ergo::CostModel::none();
  if (s == "send") return ergo::CostModel::send();
  if (s == "recv") return ergo::CostModel::recv();
  if (s.rfind("flat:", 0) == 0)
    return ergo::CostModel::flat_cost(std::stoull(s.substr(5)));
  throw CLI::ValidationError("--cost", "expected none|send|recv|flat:R");
}

ergo::SyntaxMode parse_mode(const std::string& s) {
  if (s == "implicit") return ergo::SyntaxMode::Implicit;
  if (s == "explicit") return ergo::SyntaxMode::Explicit;
  throw CLI::ValidationError("--syntax", "expected implicit|explicit");
}

int with_parsed(const Options& opt, std::string& source, ergo::Signature& sig) {
  try {
    source = read_file(opt.input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  try {
    sig = ergo::parse_signature(source);
  } catch (const ergo::ParseError& e) {
    std::cerr << ergo::render_diagnostic(
        ergo::Diagnostic{"parse error", e.what(), e.span}, source);
    return kExitParse;
  }
  return kExitOk;
}

int report_check(const ergo::SigReport& report, const std::string& source,
                 const Options& opt, bool quiet_ok) {
  if (report.global) {
    std::cerr << ergo::render_diagnostic(*report.global, source);
    return kExitStatic;
  }
  bool failed = false;
  for (auto& d : report.defs) {
    if (opt.json) {
      nlohmann::json line = {
          {"name", d.name},
          {"verdict", d.ok() ? "ok" : ergo::err_category_name(d.error->category)},
          {"ms", d.recon_ms + d.check_ms},
      };
      std::cout << line.dump() << "\n";
    } else if (d.ok()) {
      if (!quiet_ok) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", d.recon_ms + d.check_ms);
        std::cout << d.name << ": ok (" << buf << " ms)\n";
      }
    }
    if (!d.ok()) {
      failed = true;
      if (!opt.json)
        std::cerr << d.name << ":\n"
                  << ergo::render_diagnostic(d.error->to_diagnostic(), source);
    }
  }
  return failed ? kExitStatic : kExitOk;
}

int cmd_check(const Options& opt) {
  std::string source;
  ergo::Signature sig;
  if (int rc = with_parsed(opt, source, sig)) return rc;
  ergo::SigReport report =
      ergo::check_signature(sig, parse_mode(opt.syntax), parse_cost(opt.cost));
  return report_check(report, source, opt, false);
}

int cmd_recon(const Options& opt) {
  std::string source;
  ergo::Signature sig;
  if (int rc = with_parsed(opt, source, sig)) return rc;
  ergo::SigReport report =
      ergo::check_signature(sig, ergo::SyntaxMode::Implicit, parse_cost(opt.cost));
  if (report.global) {
    std::cerr << ergo::render_diagnostic(*report.global, source);
    return kExitStatic;
  }
  std::cout << ergo::render_signature(report.checked);
  for (auto& d : report.defs)
    if (!d.ok())
      std::cerr << d.name << ":\n"
                << ergo::render_diagnostic(d.error->to_diagnostic(), source);
  return report.ok() ? kExitOk : kExitStatic;
}

int cmd_run(const Options& opt, const std::string& proc,
            const std::vector<uint64_t>& args, uint64_t budget) {
  std::string source;
  ergo::Signature sig;
  if (int rc = with_parsed(opt, source, sig)) return rc;
  ergo::SigReport report =
      ergo::check_signature(sig, parse_mode(opt.syntax), parse_cost(opt.cost));
  if (int rc = report_check(report, source, opt, true)) return rc;
  try {
    ergo::Configuration cfg = ergo::spawn_config(report.checked, proc, args);
    ergo::RunResult r = ergo::run(cfg, budget);
    for (auto& line : r.trace) std::cout << line << "\n";
    std::cout << "work=" << r.work << " potential=" << r.potential << "\n";
    if (r.outcome == ergo::StepResult::Kind::Stuck) {
      std::cerr << "error:stuck: " << r.detail << "\n";
      return kExitRuntime;
    }
    if (r.budget_exhausted) {
      std::cerr << "error:budget exhausted after " << r.steps << " steps\n";
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const ergo::InterpError& e) {
    std::cerr << "error:" << e.kind << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_eq(const Options& opt, const std::string& lhs, const std::string& rhs,
           const std::string& vars_csv, const std::string& constraint_src) {
  std::string source;
  ergo::Signature sig;
  if (int rc = with_parsed(opt, source, sig)) return rc;
  try {
    sig.validate_structure();
  } catch (const ergo::SignatureError& e) {
    std::cerr << ergo::render_diagnostic(
        ergo::Diagnostic{"malformed signature", e.what(), e.span}, source);
    return kExitStatic;
  }
  try {
    ergo::Type a = ergo::parse_type_expr(lhs);
    ergo::Type b = ergo::parse_type_expr(rhs);
    std::vector<std::string> vars;
    std::stringstream ss(vars_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) vars.push_back(item);
    ergo::Prop c =
        constraint_src.empty() ? ergo::Prop::top() : ergo::parse_prop_expr(constraint_src);
    ergo::Signature elab = ergo::elaborate_internal_names(sig);
    ergo::EqVerdict v =
        ergo::type_equal(elab, ergo::VarCtx{vars}, c, a, b);
    switch (v.kind) {
      case ergo::EqVerdict::Kind::Equal: std::cout << "equal\n"; return kExitOk;
      case ergo::EqVerdict::Kind::NotEqual: {
        std::cout << "not equal\n";
        for (auto& step : v.path) std::cout << "  " << step << "\n";
        return kExitStatic;
      }
      case ergo::EqVerdict::Kind::Unknown: std::cout << "unknown\n"; return kExitStatic;
    }
    return kExitStatic;
  } catch (const ergo::ParseError& e) {
    std::cerr << "error:parse error: " << e.what() << "\n";
    return kExitParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"checker, reconstructor, and interpreter for ergometric session types"};
  app.require_subcommand(1);

  Options opt;
  std::string proc;
  std::vector<uint64_t> run_args;
  uint64_t budget = 1000000;
  std::string eq_lhs, eq_rhs, eq_vars, eq_constraint;

  auto add_common = [&](CLI::App* sub, bool with_syntax = true) {
    sub->add_option("file", opt.input, "input signature")->required();
    if (with_syntax)
      sub->add_option("--syntax", opt.syntax, "implicit|explicit (default implicit)");
    sub->add_option("--cost", opt.cost, "none|send|recv|flat:R (default none)");
    sub->add_flag("--json", opt.json, "machine-readable JSON-lines report");
    sub->add_flag("-v,--verbose", opt.verbosity, "verbosity");
  };

  CLI::App* check = app.add_subcommand("check", "type-check every definition");
  add_common(check);

  CLI::App* recon = app.add_subcommand("recon", "print the reconstructed explicit signature");
  add_common(recon, false);

  CLI::App* runcmd = app.add_subcommand("run", "execute a process");
  add_common(runcmd);
  runcmd->add_option("proc", proc, "process to spawn")->required();
  runcmd->add_option("args", run_args, "ground index arguments");
  runcmd->add_option("--budget", budget, "max steps (default 1000000)");

  CLI::App* eq = app.add_subcommand("eq", "decide type equality");
  eq->add_option("file", opt.input, "signature providing type definitions")->required();
  eq->add_option("lhs", eq_lhs, "left type expression")->required();
  eq->add_option("rhs", eq_rhs, "right type expression")->required();
  eq->add_option("--vars", eq_vars, "comma-separated free index variables");
  eq->add_option("--constraint", eq_constraint, "constraint over the variables");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(opt);
    if (recon->parsed()) return cmd_recon(opt);
    if (runcmd->parsed()) return cmd_run(opt, proc, run_args, budget);
    if (eq->parsed()) return cmd_eq(opt, eq_lhs, eq_rhs, eq_vars, eq_constraint);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStatic;
  }
  return kExitOk;
}

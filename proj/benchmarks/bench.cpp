#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "ergo/interp.hpp"
#include "ergo/parser.hpp"
#include "ergo/typecheck.hpp"
#include "ergo/typeeq.hpp"

using namespace ergo;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) {
  return read_file(std::string(ERGO_CORPUS_DIR) + "/" + name);
}

void BM_qe_parity(benchmark::State& state) {
  Prop parity = parse_prop_expr("!n. ?k. (n = 2*k \\/ n = 2*k+1)");
  for (auto _ : state) benchmark::DoNotOptimize(qe_cooper(parity));
}
BENCHMARK(BM_qe_parity);

void BM_entails_def_rule(benchmark::State& state) {
  VarCtx vars{{"x", "y"}};
  Prop phi = parse_prop_expr(
      "?X. ?Y. (X = x+1 /\\ Y = y /\\ X+1 = x+2 /\\ Y+1 = y+1)");
  for (auto _ : state) benchmark::DoNotOptimize(entails(vars, Prop::top(), phi));
}
BENCHMARK(BM_entails_def_rule);

void BM_type_equal_ctr(benchmark::State& state) {
  Signature sig = elaborate_internal_names(parse_signature(
      "type ctr{x}{y} = +{lt : ?{x < y}. ctr{x+1}{y}, ge : ?{x >= y}. 1}\n"));
  Type a = parse_type_expr("ctr{x}{y}");
  Type b = parse_type_expr("ctr{x+1}{y+1}");
  VarCtx vars{{"x", "y"}};
  for (auto _ : state)
    benchmark::DoNotOptimize(type_equal(sig, vars, Prop::top(), a, b));
}
BENCHMARK(BM_type_equal_ctr);

void BM_check_list(benchmark::State& state) {
  Signature sig = parse_signature(corpus("list.txt"));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        check_signature(sig, SyntaxMode::Implicit, CostModel::send()));
}
BENCHMARK(BM_check_list)->Unit(benchmark::kMillisecond);

void BM_check_tries(benchmark::State& state) {
  Signature sig = parse_signature(corpus("tries.txt"));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        check_signature(sig, SyntaxMode::Implicit, CostModel::send()));
}
BENCHMARK(BM_check_tries)->Unit(benchmark::kMillisecond);

void BM_run_queue_driver(benchmark::State& state) {
  Signature sig = parse_signature(corpus("drivers/queue_drive.txt"));
  SigReport r = check_signature(sig, SyntaxMode::Implicit, CostModel::send());
  for (auto _ : state) {
    Configuration cfg = spawn_config(r.checked, "main", {});
    benchmark::DoNotOptimize(run(cfg, 1000000));
  }
}
BENCHMARK(BM_run_queue_driver)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

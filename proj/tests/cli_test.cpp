#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "testutil.hpp"

#ifndef ERGO_CLI_PATH
#define ERGO_CLI_PATH "ergo"
#endif

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  std::string out_path = "cli_test_out.txt";
  std::string cmd = std::string(ERGO_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  int rc = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WEXITSTATUS(rc);
  r.out = testutil::read_file(out_path);
  std::remove(out_path.c_str());
  return r;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("check reports one ok line per definition") {
  CmdResult r =
      run_cli("check --syntax=implicit --cost=send " + q(testutil::corpus_path("list.txt")));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("nil: ok (") != std::string::npos);
  CHECK(r.out.find("filter: ok (") != std::string::npos);
}

TEST_CASE("check exits 1 on a static error with a rendered diagnostic") {
  std::ofstream f("cli_bad.txt");
  f << "decl f : . |- (x : 1)\nproc x <- f <- = impossible\n";
  f.close();
  CmdResult r = run_cli("check cli_bad.txt");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("error:not impossible") != std::string::npos);
  std::remove("cli_bad.txt");
}

TEST_CASE("parse errors exit 2") {
  std::ofstream f("cli_parse.txt");
  f << "type t = +{}\n";
  f.close();
  CmdResult r = run_cli("check cli_parse.txt");
  CHECK(r.exit_code == 2);
  std::remove("cli_parse.txt");
}

TEST_CASE("recon output re-parses and re-checks in explicit mode") {
  CmdResult r = run_cli("recon --cost=send " + q(testutil::corpus_path("queue.txt")));
  REQUIRE(r.exit_code == 0);
  std::ofstream f("cli_recon.txt");
  f << r.out;
  f.close();
  CmdResult r2 = run_cli("check --syntax=explicit --cost=none cli_recon.txt");
  CHECK(r2.exit_code == 0);
  std::remove("cli_recon.txt");
}

TEST_CASE("run prints the trace and the totals line") {
  CmdResult r = run_cli("run --cost=none " +
                        q(testutil::corpus_path("drivers/nat_drive.txt")) + " main");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("c.b1\n") != std::string::npos);
  CHECK(r.out.find("send c {0}\n") != std::string::npos);
  CHECK(r.out.find("close c\n") != std::string::npos);
  CHECK(r.out.find("work=0 potential=0") != std::string::npos);
}

TEST_CASE("run exits 3 when the budget runs out") {
  CmdResult r = run_cli("run --cost=send --budget 2 " +
                        q(testutil::corpus_path("drivers/counter_drive.txt")) + " main");
  CHECK(r.exit_code == 3);
}

TEST_CASE("eq answers the worked example") {
  CmdResult r = run_cli("eq " + q(testutil::corpus_path("integers.txt")) +
                        " 'ctr{x}{y}' 'ctr{x+1}{y+1}' --vars x,y");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "equal\n");
  CmdResult r2 = run_cli("eq " + q(testutil::corpus_path("integers.txt")) +
                         " 'sign{x}{y}' 'ctr{x}{y}' --vars x,y");
  CHECK(r2.exit_code == 1);
  CHECK(r2.out.find("not equal") != std::string::npos);
}

TEST_CASE("json mode emits one stable object per definition") {
  CmdResult r = run_cli("check --json --cost=none " +
                        q(testutil::corpus_path("ternary.txt")));
  CHECK(r.exit_code == 0);
  std::vector<std::string> names;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    REQUIRE(j.contains("name"));
    REQUIRE(j.contains("verdict"));
    REQUIRE(j.contains("ms"));
    CHECK(j["verdict"] == "ok");
    CHECK(j["ms"].is_number());
    names.push_back(j["name"]);
  }
  CHECK(names == std::vector<std::string>{"zero", "succ", "drop"});
}

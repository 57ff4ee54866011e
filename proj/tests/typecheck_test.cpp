#include <functional>

#include "doctest.h"
#include "ergo/typecheck.hpp"
#include "testutil.hpp"

using namespace ergo;

namespace {

SigReport check_src(const std::string& src, SyntaxMode mode, CostModel cost) {
  return check_signature(parse_signature(src), mode, cost);
}

std::string first_error(const SigReport& r) {
  if (r.global) return r.global->category + ": " + r.global->message;
  for (auto& d : r.defs)
    if (!d.ok())
      return d.name + ": " + err_category_name(d.error->category) + ": " +
             d.error->rendered;
  return "";
}

}  // namespace

TEST_CASE("every corpus signature checks in implicit mode") {
  for (auto& entry : testutil::corpus_entries()) {
    SigReport r = check_signature(testutil::parse_corpus(entry.file),
                                  SyntaxMode::Implicit, entry.cost);
    CAPTURE(entry.file);
    CAPTURE(first_error(r));
    CHECK(r.ok());
  }
}

TEST_CASE("the explicit basic queue checks as written") {
  SigReport r = check_signature(
      parse_signature(testutil::read_file(
          testutil::corpus_path("explicit/queue_basic_explicit.txt"))),
      SyntaxMode::Explicit, CostModel::none());
  CAPTURE(first_error(r));
  CHECK(r.ok());
}

TEST_CASE("the naive dbl0 reports the unprovable doubling assertion") {
  const char* src =
      "type bin{n} = +{ b0 : ?{n > 0}. ?k. ?{n = 2*k}. bin{k},\n"
      "                 b1 : ?k. ?{n = 2*k+1}. bin{k},\n"
      "                 e : ?{n = 0}. 1 }\n"
      "decl dbl0{n} : (x : bin{n}) |- (y : bin{2*n})\n"
      "proc y <- dbl0{n} <- x =\n"
      "  y.b0 ; send y {n} ;\n"
      "  y <- x\n";
  SigReport r = check_src(src, SyntaxMode::Implicit, CostModel::none());
  REQUIRE_FALSE(r.ok());
  const DefReport& d = r.defs[0];
  REQUIRE(d.error.has_value());
  CHECK(d.error->category == ErrCat::AssertionNotEntailed);
  CHECK(d.error->rendered == "true |/= 2*n > 0");
  // the span covers the witness send that forced the assertion
  std::string src_str(src);
  std::string covered =
      src_str.substr(d.error->span.start, d.error->span.end - d.error->span.start);
  CHECK(covered == "send y {n}");
}

TEST_CASE("under-declared potential pinpoints the exact deficit") {
  const char* src =
      "type nat = +{zero : 1, succ : nat}\n"
      "type list{n}{p} = +{ cons : ?{n > 0}. |{p}> nat * list{n-1}{p},\n"
      "                     nil : ?{n = 0}. 1 }\n"
      "decl cons{n}{p} : (x : nat) (t : list{n}{p}) |{p+1}- (l : list{n+1}{p})\n"
      "proc l <- cons{n}{p} <- x t =\n"
      "l.cons ; send l x ; l <- t\n";
  SigReport r = check_src(src, SyntaxMode::Implicit, CostModel::send());
  REQUIRE_FALSE(r.ok());
  const DefReport& d = r.defs[0];
  REQUIRE(d.error.has_value());
  CHECK(d.error->category == ErrCat::InsufficientPotential);
  CHECK(d.error->rendered == "true |/= p+1-1 >= 1");
  std::string src_str(src);
  std::string covered =
      src_str.substr(d.error->span.start, d.error->span.end - d.error->span.start);
  CHECK(covered == "send l x");
}

TEST_CASE("forward requires zero potential") {
  const char* src =
      "decl f : (y : 1) |{1}- (x : 1)\n"
      "proc x <- f <- y = x <- y\n";
  SigReport r = check_src(src, SyntaxMode::Explicit, CostModel::none());
  REQUIRE_FALSE(r.ok());
  CHECK(r.defs[0].error->category == ErrCat::InsufficientPotential);
  CHECK(r.defs[0].error->rendered == "true |/= 1 = 0");
}

TEST_CASE("impossible requires an unsatisfiable context") {
  const char* ok =
      "type t{n} = +{a : ?{n > 0}. 1, b : ?{n = 0}. 1}\n"
      "decl f{n|n > 0} : (x : t{n}) |- (u : 1)\n"
      "proc u <- f{n} <- x =\n"
      "  case x ( a => assume x {n > 0} ; wait x ; close u\n"
      "         | b => assume x {n = 0} ; impossible )\n";
  CHECK(check_src(ok, SyntaxMode::Explicit, CostModel::none()).ok());
  const char* bad =
      "decl g : . |- (u : 1)\n"
      "proc u <- g <- = impossible\n";
  SigReport r = check_src(bad, SyntaxMode::Explicit, CostModel::none());
  REQUIRE_FALSE(r.ok());
  CHECK(r.defs[0].error->category == ErrCat::NotImpossible);
}

TEST_CASE("leftover linear channels are reported") {
  const char* src =
      "decl f : (a : 1) (b : 1) |- (x : 1)\n"
      "proc x <- f <- a b = wait a ; close x\n";
  SigReport r = check_src(src, SyntaxMode::Explicit, CostModel::none());
  REQUIRE_FALSE(r.ok());
  CHECK(r.defs[0].error->category == ErrCat::LeftoverContext);
}

TEST_CASE("single-token mutations fail with spans at the mutation site") {
  // Each entry: a full signature plus the substring the error must cover.
  struct Mutation {
    const char* name;
    std::string src;
    std::string site;
  };
  const std::string base_src =
      testutil::read_file(testutil::corpus_path("explicit/queue_basic_explicit.txt"));
  std::vector<Mutation> cases;
  auto swap_one = [&](const char* name, const std::string& from, const std::string& to,
                      const std::string& site) {
    std::string src = base_src;
    auto pos = src.find(from);
    REQUIRE(pos != std::string::npos);
    src.replace(pos, from.size(), to);
    cases.push_back(Mutation{name, src, site});
  };
  swap_one("nonexistent label", "s.none", "s.nonne", "s.nonne");
  swap_one("wrong assert", "assert s {0 = 0}", "assert s {0 = 1}", "assert s {0 = 1}");
  swap_one("send on wrong channel", "send t y", "send s y", "send s y");
  swap_one("off-by-one index", "elem{n+1} <- x t", "elem{n} <- x t",
           "s <- elem{n} <- x t");
  swap_one("forward to wrong channel", "s <- t", "s <- x", "s <- x");
  swap_one("unknown callee", "e <- empty <-", "e <- empthy <-", "e <- empthy <-");
  swap_one("dropped assert", "assert s {0 = 0} ;\n                  close s", "close s",
           "close s");
  swap_one("spurious get", "s.some", "get s {1} ; s.some", "get s {1}");
  swap_one("case on wrong channel", "case s ( ins => x <- recv s",
           "case t ( ins => x <- recv s", "case t");
  swap_one("recv on wrong side", "y <- recv s", "y <- recv t", "y <- recv t");

  // dropped pay, against an explicit ergometric source
  {
    std::string pot_src =
        "type plist{n}{p} = +{ cons : ?{n > 0}. |{p}> 1 * plist{n-1}{p},\n"
        "                      nil : ?{n = 0}. 1 }\n"
        "decl cons1{n}{p} : (x : 1) (t : plist{n}{p}) |{p}- (l : plist{n+1}{p})\n"
        "proc l <- cons1{n}{p} <- x t =\n"
        "  l.cons ; assert l {n+1 > 0} ; pay l {p} ; send l x ; l <- t\n";
    std::string dropped = pot_src;
    auto pos = dropped.find("pay l {p} ; ");
    REQUIRE(pos != std::string::npos);
    dropped.erase(pos, std::string("pay l {p} ; ").size());
    REQUIRE(check_src(pot_src, SyntaxMode::Explicit, CostModel::none()).ok());
    cases.push_back(Mutation{"dropped pay", dropped, "send l x"});
  }

  for (auto& m : cases) {
    CAPTURE(m.name);
    SigReport r = check_src(m.src, SyntaxMode::Explicit, CostModel::none());
    REQUIRE_FALSE(r.ok());
    const CheckError* err = nullptr;
    for (auto& d : r.defs)
      if (!d.ok()) {
        err = &*d.error;
        break;
      }
    REQUIRE(err != nullptr);
    std::string covered = m.src.substr(err->span.start, err->span.end - err->span.start);
    CHECK(covered == m.site);
  }
}

TEST_CASE("erase removes reconstruction constructs and impossible branches") {
  const char* src =
      "type t{n} = +{a : ?{n > 0}. 1, b : ?{n = 0}. 1}\n"
      "decl f{n|n > 0} : (x : t{n}) |- (u : 1)\n"
      "proc u <- f{n} <- x =\n"
      "  case x ( a => wait x ; close u )\n";
  Signature sig = parse_signature(src);
  SigReport r = check_signature(sig, SyntaxMode::Implicit, CostModel::none());
  REQUIRE(r.ok());
  const Process& reconstructed = r.checked.defs[0].body;
  // reconstruction added the assume and the impossible branch
  CHECK(reconstructed.branches().size() == 2);
  // erasing brings back the source
  CHECK(erase(reconstructed).structurally_equal(sig.defs[0].body));
  // erase is the identity on processes without implicit constructs
  Process plain = parse_signature(
                      "decl g : (a : 1) |- (x : 1)\n"
                      "proc x <- g <- a = wait a ; close x\n")
                      .defs[0]
                      .body;
  CHECK(erase(plain).structurally_equal(plain));
}

TEST_CASE("leaf potentials are provably zero in accepted derivations") {
  // acceptance of nil under the send model implies both leaves drained
  Signature sig = testutil::parse_corpus("list.txt");
  SigReport r = check_signature(sig, SyntaxMode::Implicit, CostModel::send());
  REQUIRE(r.ok());
  // mutate the reconstructed nil by dropping its final work: must now fail
  const ProcDef* nil = r.checked.find_def("nil");
  REQUIRE(nil != nullptr);
  std::function<Process(const Process&)> drop_last_work = [&](const Process& p) -> Process {
    if (p.kind() == Process::Kind::Work && p.cont().kind() == Process::Kind::Close)
      return p.cont();
    if (!p.has_cont()) return p;
    return p.with_cont(drop_last_work(p.cont()));
  };
  Signature mutated = r.checked;
  for (auto& d : mutated.defs)
    if (d.name == "nil") d.body = drop_last_work(d.body);
  SigReport r2 = check_signature(mutated, SyntaxMode::Explicit, CostModel::none());
  const DefReport* dn = nullptr;
  for (auto& d : r2.defs)
    if (d.name == "nil") dn = &d;
  REQUIRE(dn != nullptr);
  REQUIRE_FALSE(dn->ok());
  CHECK(dn->error->category == ErrCat::InsufficientPotential);
}

TEST_CASE("json-style report data is stable") {
  SigReport r = check_signature(testutil::parse_corpus("ternary.txt"),
                                SyntaxMode::Implicit, CostModel::none());
  REQUIRE(r.ok());
  std::vector<std::string> names;
  for (auto& d : r.defs) names.push_back(d.name);
  CHECK(names == std::vector<std::string>{"zero", "succ", "drop"});
}

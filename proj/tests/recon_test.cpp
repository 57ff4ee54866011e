#include <functional>

#include "doctest.h"
#include "ergo/recon.hpp"
#include "ergo/typecheck.hpp"
#include "testutil.hpp"

using namespace ergo;

namespace {

struct Pieces {
  Signature sig;
  const ProcDecl* decl;
  const ProcDef* def;
};

Pieces pieces(const std::string& src, const std::string& name) {
  Pieces p{parse_signature(src), nullptr, nullptr};
  p.decl = p.sig.find_decl(name);
  p.def = p.sig.find_def(name);
  REQUIRE(p.decl != nullptr);
  REQUIRE(p.def != nullptr);
  return p;
}

// Renders a process on one line for compact golden comparisons.
std::string flat(const Process& p) {
  std::string s = show_process(p, 0);
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += c;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

TEST_CASE("missing branches become impossible") {
  const char* src =
      "type bin{n} = +{ b0 : ?{n > 0}. ?k. ?{n = 2*k}. bin{k},\n"
      "                 b1 : ?k. ?{n = 2*k+1}. bin{k},\n"
      "                 e : ?{n = 0}. 1 }\n"
      "decl dbl0{n} : (x : bin{n}) |- (y : bin{2*n})\n"
      "decl pred{n|n > 0} : (x : bin{n}) |- (y : bin{n-1})\n"
      "proc y <- pred{n} <- x =\n"
      "  case x ( b0 => {k} <- recv x ;\n"
      "                 y.b1 ; send y {k-1} ;\n"
      "                 y <- pred{k} <- x\n"
      "         | b1 => {k} <- recv x ;\n"
      "                 y <- dbl0{k} <- x )\n"
      "proc y <- dbl0{n} <- x = case x ( e => wait x ; y.e ; close y )\n";
  Pieces p = pieces(src, "pred");
  Process out = recon_branches(p.sig, *p.decl, *p.def);
  REQUIRE(out.branches().size() == 3);
  CHECK(out.branches()[2].first == "e");
  CHECK(out.branches()[2].second.kind() == Process::Kind::Impossible);

  // a fully covered case is unchanged
  const char* full =
      "type two = +{a : 1, b : 1}\n"
      "decl f : (x : two) |- (u : 1)\n"
      "proc u <- f <- x = case x ( a => wait x ; close u | b => wait x ; close u )\n";
  Pieces q = pieces(full, "f");
  CHECK(recon_branches(q.sig, *q.decl, *q.def).structurally_equal(q.def->body));

  // an alien label is an error
  const char* alien =
      "type two = +{a : 1, b : 1}\n"
      "decl f : (x : two) |- (u : 1)\n"
      "proc u <- f <- x = case x ( c => wait x ; close u )\n";
  Pieces r = pieces(alien, "f");
  CHECK_THROWS_AS(recon_branches(r.sig, *r.decl, *r.def), ReconError);
}

TEST_CASE("forcing inserts the trivial assert of the basic queue") {
  std::string src =
      testutil::read_file(testutil::corpus_path("explicit/queue_basic_explicit.txt"));
  // strip the asserts to get the implicit form
  Signature sig = parse_signature(src);
  Signature implicit = sig;
  for (auto& d : implicit.defs) d.body = erase(d.body);
  const ProcDecl* decl = implicit.find_decl("empty");
  const ProcDef* def = implicit.find_def("empty");
  Process forced = recon_force(implicit, *decl, *def, def->body);
  CHECK(flat(forced).find("assert s {0 = 0}") != std::string::npos);
  // and the result matches the hand-written explicit body
  CHECK(forced.structurally_equal(sig.defs[0].body));
}

TEST_CASE("nil reconstructs to the reference listing") {
  std::string src = testutil::corpus_source("list.txt");
  Signature sig = parse_signature(src);
  const ProcDecl* decl = sig.find_decl("nil");
  const ProcDef* def = sig.find_def("nil");

  Process forced = recon_force(sig, *decl, *def, recon_branches(sig, *decl, *def));
  CHECK(flat(forced) == "l.nil ; assert l {0 = 0} ; close l");

  Process worked = insert_work(sig, *decl, forced, CostModel::send());
  CHECK(flat(worked) == "work ; l.nil ; assert l {0 = 0} ; work ; close l");

  // no cost model: only the leftover drain remains
  Process drained = insert_work(sig, *decl, forced, CostModel::none());
  CHECK(flat(drained) == "l.nil ; assert l {0 = 0} ; work {2} ; close l");
}

TEST_CASE("the two-list queue enq branch receives its potential up front") {
  Signature sig = testutil::parse_corpus("queue.txt");
  const ProcDecl* decl = sig.find_decl("queue_lists");
  const ProcDef* def = sig.find_def("queue_lists");
  Process forced = recon_force(sig, *decl, *def, recon_branches(sig, *decl, *def));
  const Process* enq = nullptr;
  for (auto& [l, b] : forced.branches())
    if (l == "enq") enq = &b;
  REQUIRE(enq != nullptr);
  // get q {6} is the first inserted construct, before the channel receive
  CHECK(enq->kind() == Process::Kind::Get);
  CHECK(enq->chan() == "q");
  CHECK(show(enq->exp()) == "6");
  CHECK(enq->cont().kind() == Process::Kind::RecvChan);
}

TEST_CASE("surplus potential drains before a forward") {
  const char* src =
      "decl f : (y : 1) |{3}- (x : 1)\n"
      "proc x <- f <- y = x <- y\n";
  Pieces p = pieces(src, "f");
  Process out = reconstruct_def(p.sig, *p.decl, *p.def, CostModel::none());
  CHECK(flat(out) == "work {3} ; x <- y");
}

TEST_CASE("the flat cost model charges sends and receives alike") {
  const char* src =
      "decl f : (a : 1) |{4}- (x : 1)\n"
      "proc x <- f <- a = wait a ; close x\n";
  Pieces p = pieces(src, "f");
  Process out = reconstruct_def(p.sig, *p.decl, *p.def, CostModel::flat_cost(2));
  CHECK(flat(out) == "work {2} ; wait a ; work {2} ; close x");
  SigReport exact = check_signature(parse_signature(src), SyntaxMode::Implicit,
                                    CostModel::flat_cost(2));
  CHECK(exact.ok());
  const char* low =
      "decl f : (a : 1) |{3}- (x : 1)\n"
      "proc x <- f <- a = wait a ; close x\n";
  SigReport short_of = check_signature(parse_signature(low), SyntaxMode::Implicit,
                                       CostModel::flat_cost(2));
  REQUIRE_FALSE(short_of.ok());
  CHECK(short_of.defs[0].error->category == ErrCat::InsufficientPotential);
}

TEST_CASE("reconstruction round-trips on every corpus program") {
  for (auto& entry : testutil::corpus_entries()) {
    Signature sig = testutil::parse_corpus(entry.file);
    SigReport r = check_signature(sig, SyntaxMode::Implicit, entry.cost);
    CAPTURE(entry.file);
    REQUIRE(r.ok());
    for (size_t i = 0; i < sig.defs.size(); ++i) {
      CAPTURE(sig.defs[i].name);
      const Process& original = sig.defs[i].body;
      const Process& reconstructed = r.checked.defs[i].body;
      // soundness came from r.ok(); erasing recovers the source
      CHECK(erase(reconstructed).structurally_equal(original));
      // construct insertion only: reconstruction never shrinks a program
      CHECK(reconstructed.node_count() >= original.node_count());
    }
    // completeness: re-erasing the reconstructed corpus and reconstructing
    // again still checks
    Signature round = r.checked;
    for (auto& d : round.defs) d.body = erase(d.body);
    SigReport r2 = check_signature(round, SyntaxMode::Implicit, entry.cost);
    CHECK(r2.ok());
  }
}

TEST_CASE("reconstructed output re-parses and re-checks in explicit mode") {
  for (auto& entry : testutil::corpus_entries()) {
    Signature sig = testutil::parse_corpus(entry.file);
    SigReport r = check_signature(sig, SyntaxMode::Implicit, entry.cost);
    REQUIRE(r.ok());
    std::string rendered = render_signature(r.checked);
    CAPTURE(entry.file);
    Signature reparsed = parse_signature(rendered);
    SigReport r2 = check_signature(reparsed, SyntaxMode::Explicit, CostModel::none());
    CHECK(r2.ok());
  }
}

namespace {

// The eagerness discipline: within one channel's segment (the stretch
// between structural actions on it), no assume/get may follow an assert/pay.
struct EagernessScan {
  std::map<std::string, int> phase;  // 0 inverting, 1 forcing

  bool structural(const Process& p) {
    switch (p.kind()) {
      case Process::Kind::SendLabel:
      case Process::Kind::Case:
      case Process::Kind::SendChan:
      case Process::Kind::RecvChan:
      case Process::Kind::Close:
      case Process::Kind::Wait:
      case Process::Kind::SendIdx:
      case Process::Kind::RecvIdx:
      case Process::Kind::Fwd: return true;
      default: return false;
    }
  }

  bool walk(const Process& p) {
    EagernessScan saved = *this;
    switch (p.kind()) {
      case Process::Kind::AssumeP:
      case Process::Kind::Get:
        if (phase[p.chan()] == 1) return false;  // lazy construct came first
        return walk(p.cont());
      case Process::Kind::AssertP:
      case Process::Kind::Pay:
        phase[p.chan()] = 1;
        return walk(p.cont());
      case Process::Kind::Case: {
        phase[p.chan()] = 0;
        for (auto& [_, b] : p.branches()) {
          *this = saved;
          phase[p.chan()] = 0;
          if (!walk(b)) return false;
        }
        return true;
      }
      default: {
        if (structural(p)) {
          phase[p.chan()] = 0;
          if (p.kind() == Process::Kind::Fwd) phase[p.chan2()] = 0;
        }
        if (!p.has_cont()) return true;
        return walk(p.cont());
      }
    }
  }
};

}  // namespace

TEST_CASE("eagerness: inversions precede forcings within every segment") {
  for (auto& entry : testutil::corpus_entries()) {
    Signature sig = testutil::parse_corpus(entry.file);
    SigReport r = check_signature(sig, SyntaxMode::Implicit, entry.cost);
    REQUIRE(r.ok());
    for (auto& def : r.checked.defs) {
      CAPTURE(entry.file);
      CAPTURE(def.name);
      EagernessScan scan;
      CHECK(scan.walk(def.body));
    }
  }
}

TEST_CASE("ill-polarized signatures are rejected before reconstruction") {
  Signature sig = parse_signature(
      "type bad = +{a : !{0 = 0}. ?{0 = 0}. 1}\n"
      "decl f : . |- (x : bad)\n"
      "proc x <- f <- = x.a ; close x\n");
  auto diag = check_polarizable(sig);
  REQUIRE(diag.has_value());
  CHECK(diag->category == "ill-polarized type");
  SigReport r = check_signature(sig, SyntaxMode::Implicit, CostModel::none());
  CHECK_FALSE(r.ok());
}

TEST_CASE("explicit constructs in implicit source are rejected") {
  const char* src =
      "decl f : . |- (x : 1)\n"
      "proc x <- f <- = work ; close x\n";
  Signature sig = parse_signature(src);
  SigReport r = check_signature(sig, SyntaxMode::Implicit, CostModel::none());
  CHECK_FALSE(r.ok());
}

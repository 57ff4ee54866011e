#include <random>

#include "doctest.h"
#include "ergo/parser.hpp"
#include "testutil.hpp"

using namespace ergo;

TEST_CASE("lexing the surface syntax") {
  auto toks = lex("<{6}| nat -o queue{n+1}");
  std::vector<Tok> kinds;
  for (auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<Tok>{Tok::Lt, Tok::LBrace, Tok::Nat, Tok::RBrace, Tok::Bar,
                                  Tok::Ident, Tok::Lolli, Tok::Ident, Tok::LBrace,
                                  Tok::Ident, Tok::Plus, Tok::Nat, Tok::RBrace,
                                  Tok::Eof});

  CHECK(lex("").size() == 1);  // just Eof

  auto toks2 = lex("x.k ; close x");
  CHECK(toks2[0].kind == Tok::Ident);
  CHECK(toks2[1].kind == Tok::Dot);
  CHECK(toks2[2].kind == Tok::Ident);
  CHECK(toks2[3].kind == Tok::Semi);
  CHECK(toks2[4].kind == Tok::KwClose);

  CHECK(lex("% comment only\n").size() == 1);
  CHECK_THROWS_AS(lex("$"), ParseError);

  // '-o' splits from identifiers starting with o
  auto toks3 = lex("n-old");
  CHECK(toks3[1].kind == Tok::Minus);
  CHECK(toks3[2].text == "old");
}

TEST_CASE("token lexemes round-trip to source slices") {
  std::string src = testutil::corpus_source("queue.txt");
  for (auto& t : lex(src)) {
    if (t.kind == Tok::Eof) continue;
    CHECK(src.substr(t.span.start, t.span.end - t.span.start) == t.text);
  }
}

TEST_CASE("declaration forms") {
  Signature sig = parse_signature(
      "type list{n}{p} = +{nil : ?{n = 0}. 1}\n"
      "decl nil{p} : . |{2}- (l : list{0}{p})\n"
      "proc l <- nil{p} <- = l.nil ; close l\n"
      "decl f : . |- (x : 1)\n"
      "proc x <- f <- = close x\n");
  REQUIRE(sig.decls.size() == 2);
  CHECK(eval_exp(sig.decls[0].potential) == 2);
  CHECK(sig.decls[0].offered.kind() == Type::Kind::Name);
  CHECK(eval_exp(sig.decls[1].potential) == 0);
}

TEST_CASE("the two-list queue type parses with its getpot annotations") {
  Signature sig = testutil::parse_corpus("queue.txt");
  const TypeDef* q = sig.find_type("queue");
  REQUIRE(q != nullptr);
  const Type* enq = q->body.find_branch("enq");
  const Type* deq = q->body.find_branch("deq");
  REQUIRE(enq);
  REQUIRE(deq);
  CHECK(enq->kind() == Type::Kind::GetPot);
  CHECK(eval_exp(enq->potential()) == 6);
  CHECK(deq->kind() == Type::Kind::GetPot);
  CHECK(eval_exp(deq->potential()) == 4);
}

TEST_CASE("type operator precedence") {
  // prefixes scope over everything to their right
  Type t = parse_type_expr("<{6}| nat -o queue{n+1}");
  REQUIRE(t.kind() == Type::Kind::GetPot);
  CHECK(t.cont().kind() == Type::Kind::Lolli);
  // '*' binds tighter than '-o'
  Type u = parse_type_expr("1 * 1 -o 1");
  REQUIRE(u.kind() == Type::Kind::Lolli);
  CHECK(u.left().kind() == Type::Kind::Tensor);
  // '*' is right-associative
  Type w = parse_type_expr("a * b * 1");
  REQUIRE(w.kind() == Type::Kind::Tensor);
  CHECK(w.right().kind() == Type::Kind::Tensor);
  // quantifier prefixes may follow an arrow without parentheses
  Type s = parse_type_expr("!k. a{k} -o ?m. ?{m <= k}. b{m}");
  REQUIRE(s.kind() == Type::Kind::Forall);
  REQUIRE(s.cont().kind() == Type::Kind::Lolli);
  CHECK(s.cont().right().kind() == Type::Kind::Exists);
}

TEST_CASE("nonlinear products are rejected at construction") {
  CHECK_THROWS_WITH_AS(
      parse_signature("type t{q}{n} = +{a : |{(q+2)*n+2}> 1}\n"),
      doctest::Contains("nonlinear"), ParseError);
}

TEST_CASE("tail calls desugar to spawn plus forward") {
  Signature sig = parse_signature(
      "decl f : . |- (x : 1)\n"
      "proc x <- f <- = close x\n"
      "decl g : . |- (y : 1)\n"
      "proc y <- g <- = y <- f <-\n");
  const Process& body = sig.defs[1].body;
  REQUIRE(body.kind() == Process::Kind::Spawn);
  CHECK(body.cont().kind() == Process::Kind::Fwd);
  CHECK(body.cont().chan() == "y");
  CHECK(body.cont().chan2() == body.chan());
}

TEST_CASE("all corpus areas parse") {
  for (auto& entry : testutil::corpus_entries()) {
    CAPTURE(entry.file);
    CHECK_NOTHROW(testutil::parse_corpus(entry.file));
  }
}

TEST_CASE("render then parse is the identity on the corpus") {
  for (auto& entry : testutil::corpus_entries()) {
    CAPTURE(entry.file);
    Signature sig = testutil::parse_corpus(entry.file);
    Signature reparsed = parse_signature(render_signature(sig));
    REQUIRE(sig.types.size() == reparsed.types.size());
    for (size_t i = 0; i < sig.types.size(); ++i) {
      CAPTURE(sig.types[i].name);
      CHECK(sig.types[i].name == reparsed.types[i].name);
      CHECK(sig.types[i].params == reparsed.types[i].params);
      CHECK(sig.types[i].body.structurally_equal(reparsed.types[i].body));
    }
    REQUIRE(sig.decls.size() == reparsed.decls.size());
    for (size_t i = 0; i < sig.decls.size(); ++i) {
      CAPTURE(sig.decls[i].name);
      CHECK(sig.decls[i].constraint.structurally_equal(reparsed.decls[i].constraint));
      CHECK(sig.decls[i].potential.structurally_equal(reparsed.decls[i].potential));
      CHECK(sig.decls[i].offered.structurally_equal(reparsed.decls[i].offered));
      REQUIRE(sig.decls[i].channels.size() == reparsed.decls[i].channels.size());
      for (size_t j = 0; j < sig.decls[i].channels.size(); ++j)
        CHECK(sig.decls[i].channels[j].second.structurally_equal(
            reparsed.decls[i].channels[j].second));
    }
    REQUIRE(sig.defs.size() == reparsed.defs.size());
    for (size_t i = 0; i < sig.defs.size(); ++i) {
      CAPTURE(sig.defs[i].name);
      CHECK(sig.defs[i].body.structurally_equal(reparsed.defs[i].body));
    }
  }
}

namespace {
void check_span_containment(const Process& p, Span parent, bool is_root) {
  if (!is_root) {
    CHECK(p.span().start >= parent.start);
  }
  for (auto& [_, b] : p.branches()) check_span_containment(b, p.span(), false);
  if (p.has_cont()) check_span_containment(p.cont(), p.span(), false);
}
}  // namespace

TEST_CASE("statement spans advance monotonically") {
  for (auto& entry : testutil::corpus_entries()) {
    Signature sig = testutil::parse_corpus(entry.file);
    for (auto& def : sig.defs) check_span_containment(def.body, def.span, true);
  }
}

TEST_CASE("diagnostic rendering underlines the span") {
  std::string src = "proc y <- dbl0{n} <- x =\n  y.b0 ; send y {n} ;\n";
  Diagnostic d{"assertion not entailed", "true |/= 2*n > 0", Span{34, 44}};
  std::string out = render_diagnostic(d, src);
  CHECK(out ==
        "error:assertion not entailed: true |/= 2*n > 0\n"
        "  y.b0 ; send y {n} ;\n"
        "         ~~~~~~~~~~\n");
}

TEST_CASE("the parser fails cleanly on mangled input") {
  // deleting, duplicating, or swapping tokens must yield ParseError or a
  // well-formed signature, never a crash or an out-of-range access
  std::string src = testutil::corpus_source("queue_linear.txt");
  std::mt19937 rng(31337);
  for (int t = 0; t < 400; ++t) {
    std::string mutated = src;
    size_t at = rng() % mutated.size();
    switch (rng() % 4) {
      case 0: mutated.erase(at, 1 + rng() % 5); break;
      case 1: mutated.insert(at, std::string(1, "{}()|<>-;.!?*+&="[rng() % 16])); break;
      case 2: mutated[at] = static_cast<char>(' ' + rng() % 94); break;
      default: {
        size_t at2 = rng() % mutated.size();
        std::swap(mutated[at], mutated[at2]);
        break;
      }
    }
    try {
      Signature sig = parse_signature(mutated);
      sig.validate_structure();
    } catch (const ParseError&) {
    } catch (const SignatureError&) {
    }
  }
  CHECK(true);
}

TEST_CASE("parse error at end of input points past the last line") {
  try {
    parse_signature("decl f : . |- (x : 1)\nproc x <- f <- =");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unexpected end of input") != std::string::npos);
    std::string out =
        render_diagnostic(Diagnostic{"parse error", e.what(), e.span},
                          "decl f : . |- (x : 1)\nproc x <- f <- =");
    CHECK(out.find("~") != std::string::npos);
  }
}

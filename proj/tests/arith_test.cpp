#include <random>

#include "doctest.h"
#include "ergo/arith.hpp"
#include "oracle.hpp"

using namespace ergo;

namespace {

Exp v(const char* n) { return Exp::var(n); }
Exp c(uint64_t k) { return Exp::num(k); }

// Random formula generator: <=2 quantifiers, <=3 free variables,
// coefficients <= 4, constants <= 8, no subtraction (evaluation stays total).
struct Gen {
  std::mt19937 rng;
  explicit Gen(uint32_t seed) : rng(seed) {}
  int pick(int n) { return static_cast<int>(rng() % static_cast<uint32_t>(n)); }

  Exp exp(const std::vector<std::string>& scope, int depth) {
    int k = pick(depth <= 0 || scope.empty() ? 2 : 5);
    if (scope.empty() && k == 1) k = 0;
    switch (k) {
      case 0: return c(static_cast<uint64_t>(pick(9)));
      case 1: return Exp::var(scope[static_cast<size_t>(pick(static_cast<int>(scope.size())))]);
      case 2:
      case 3: return Exp::add(exp(scope, depth - 1), exp(scope, depth - 1));
      default: return Exp::mul(static_cast<uint64_t>(1 + pick(4)), exp(scope, depth - 1));
    }
  }

  Prop prop(std::vector<std::string> scope, int depth, int quants) {
    int k = pick(depth <= 0 ? 2 : 8);
    switch (k) {
      case 0: return Prop::eq(exp(scope, 2), exp(scope, 2));
      case 1: return Prop::gt(exp(scope, 2), exp(scope, 2));
      case 2: return Prop::conj(prop(scope, depth - 1, quants), prop(scope, depth - 1, quants));
      case 3: return Prop::disj(prop(scope, depth - 1, quants), prop(scope, depth - 1, quants));
      case 4: return Prop::neg(prop(scope, depth - 1, quants));
      default: {
        if (quants <= 0) return Prop::gt(exp(scope, 2), exp(scope, 2));
        std::string qv = "q" + std::to_string(quants);
        scope.push_back(qv);
        Prop body = prop(scope, depth - 1, quants - 1);
        return pick(2) ? Prop::exists(qv, body) : Prop::forall(qv, body);
      }
    }
  }
};

}  // namespace

TEST_CASE("eval_exp basics") {
  CHECK(eval_exp(Exp::add(c(2), c(3))) == 5);
  CHECK(eval_exp(Exp::sub(Exp::add(v("n"), c(1)), c(1)), {{"n", 0}}) == 0);
  CHECK(eval_exp(Exp::add(Exp::mul(2, v("k")), c(1)), {{"k", 3}}) == 7);
  // cross-check via entails on the closed proposition 2*3+1 = 7
  CHECK(entails(VarCtx{}, Prop::top(),
                Prop::eq(Exp::add(Exp::mul(2, c(3)), c(1)), c(7))));
  CHECK_THROWS_AS(eval_exp(Exp::sub(c(2), c(3))), UnderflowError);
}

TEST_CASE("eval_prop basics") {
  CHECK(eval_prop(Prop::eq(c(0), c(0))));
  CHECK_FALSE(eval_prop(Prop::gt(c(1), c(1))));
  CHECK(eval_prop(Prop::conj(Prop::eq(c(2), c(2)), Prop::neg(Prop::gt(c(3), c(4))))));
}

TEST_CASE("qe_cooper worked examples") {
  // forall n. exists k. (n = 2k \/ n = 2k+1)
  Prop parity = Prop::forall(
      "n", Prop::exists("k", Prop::disj(Prop::eq(v("n"), Exp::mul(2, v("k"))),
                                        Prop::eq(v("n"), Exp::add(Exp::mul(2, v("k")), c(1))))));
  Prop q = qe_cooper(parity);
  CHECK(q.quantifier_free());
  CHECK(eval_prop(q));

  Prop contra =
      Prop::exists("k", Prop::conj(Prop::gt(v("k"), c(5)), Prop::eq(v("k"), c(3))));
  CHECK_FALSE(eval_prop(qe_cooper(contra)));

  Prop even = Prop::exists("k", Prop::eq(v("n"), Exp::mul(2, v("k"))));
  Prop evq = qe_cooper(even);
  CHECK(evq.quantifier_free());
  for (uint64_t n = 0; n <= 20; ++n) {
    // brute-force witness search up to n
    bool expect = false;
    for (uint64_t k = 0; k <= n; ++k) expect |= (n == 2 * k);
    CHECK(eval_prop(evq, {{"n", n}}) == expect);
  }
}

TEST_CASE("entails examples") {
  VarCtx xy{{"x", "y"}};
  // exists X,Y. X = x+1 /\ Y = y /\ X+1 = x+2 /\ Y+1 = y+1
  Prop phi = Prop::exists(
      "X", Prop::exists(
               "Y", Prop::conj(Prop::conj(Prop::eq(v("X"), Exp::add(v("x"), c(1))),
                                          Prop::eq(v("Y"), v("y"))),
                               Prop::conj(Prop::eq(Exp::add(v("X"), c(1)), Exp::add(v("x"), c(2))),
                                          Prop::eq(Exp::add(v("Y"), c(1)),
                                                   Exp::add(v("y"), c(1)))))));
  CHECK(entails(xy, Prop::top(), phi));

  VarCtx n{{"n"}};
  CHECK_FALSE(entails(n, Prop::eq(v("n"), c(0)), Prop::gt(v("n"), c(0))));
  CHECK(entails(n, Prop::conj(Prop::gt(v("n"), c(0)), Prop::eq(v("n"), c(0))), Prop::bot()));
  CHECK_THROWS_AS(entails(n, Prop::top(), Prop::gt(v("m"), c(0))), std::invalid_argument);
}

TEST_CASE("check_nat") {
  VarCtx n{{"n"}};
  CHECK(check_nat(n, Prop::gt(v("n"), c(0)), Exp::sub(v("n"), c(1))).ok);
  CHECK_FALSE(check_nat(n, Prop::top(), Exp::sub(v("n"), c(1))).ok);
  CHECK(check_nat(VarCtx{}, Prop::top(), Exp::sub(c(5), c(2))).ok);
}

TEST_CASE("subst_idx") {
  // (n+1)[n := 2k] = 2k+1
  Exp e = subst_idx(Exp::add(v("n"), c(1)), {{"n", Exp::mul(2, v("k"))}});
  CHECK(e.structurally_equal(Exp::add(Exp::mul(2, v("k")), c(1))));

  // capture avoidance: (exists n. n = m)[m := n] binds a renamed variable
  Prop p = subst_idx(Prop::exists("n", Prop::eq(v("n"), v("m"))), {{"m", v("n")}});
  REQUIRE(p.kind() == Prop::Kind::Exists);
  CHECK(p.var() != "n");
  CHECK(p.body().structurally_equal(Prop::eq(v(p.var().c_str()), v("n"))));

  // compose with eval_prop
  Prop q = subst_idx(Prop::eq(v("n"), Exp::mul(2, v("k"))), {{"n", c(6)}, {"k", c(3)}});
  CHECK(eval_prop(q));
}

TEST_CASE("subst commutes with eval") {
  Gen g(20240817);
  std::vector<std::string> scope = {"a", "b"};
  for (int t = 0; t < 100; ++t) {
    Exp e = g.exp(scope, 3);
    uint64_t av = static_cast<uint64_t>(g.pick(10));
    uint64_t bv = static_cast<uint64_t>(g.pick(10));
    Exp closed = subst_idx(e, {{"a", c(av)}, {"b", c(bv)}});
    CHECK(eval_exp(closed) == eval_exp(e, {{"a", av}, {"b", bv}}));
  }
}

TEST_CASE("entails agrees with eval_prop on closed formulas") {
  Gen g(7);
  for (int t = 0; t < 200; ++t) {
    Prop p = g.prop({}, 3, 0);
    CHECK(entails(VarCtx{}, Prop::top(), p) == eval_prop(p));
  }
}

TEST_CASE("trivial entailments hold under any sampled context") {
  Gen g(99);
  std::vector<std::string> scope = {"a", "b"};
  for (int t = 0; t < 50; ++t) {
    Prop ctx = g.prop(scope, 2, 1);
    Prop phi = g.prop(scope, 2, 0);
    VarCtx vc{scope};
    CHECK(entails(vc, ctx, Prop::top()));
    CHECK(entails(vc, Prop::conj(ctx, Prop::bot()), phi));
  }
}

TEST_CASE("qe_cooper is semantics-preserving against the brute-force oracle") {
  Gen g(12345);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    int nfree = g.pick(4);
    std::vector<std::string> fv;
    for (int i = 0; i < nfree; ++i) fv.push_back("v" + std::to_string(i));
    Prop p = g.prop(fv, 3, 2);
    Prop q = qe_cooper(p);
    REQUIRE(q.quantifier_free());
    std::vector<std::string> pf;
    p.free_vars(pf);
    uint64_t step = pf.size() >= 3 ? 4 : 1;
    std::vector<uint64_t> asn(pf.size(), 0);
    for (;;) {
      oracle::IEnv ienv;
      Env env;
      for (size_t i = 0; i < pf.size(); ++i) {
        ienv[pf[i]] = static_cast<long long>(asn[i]);
        env[pf[i]] = asn[i];
      }
      CHECK(oracle::holds(p, ienv) == eval_prop(q, env));
      ++checked;
      size_t i = 0;
      for (; i < pf.size(); ++i) {
        if (asn[i] + step <= 12) {
          asn[i] += step;
          break;
        }
        asn[i] = 0;
      }
      if (i == pf.size()) break;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("rendering") {
  CHECK(show(Exp::sub(Exp::add(v("p"), c(1)), c(1))) == "p+1-1");
  CHECK(show(Exp::mul(2, v("n"))) == "2*n");
  CHECK(show(Exp::mul(2, Exp::add(v("n"), c(1)))) == "2*(n+1)");
  CHECK(show(Prop::gt(Exp::mul(2, v("n")), c(0))) == "2*n > 0");
  CHECK(show(Prop::top()) == "true");
  CHECK(show(Prop::conj(Prop::eq(v("n"), c(0)), Prop::neg(Prop::bot()))) ==
        "n = 0 /\\ ~false");
  CHECK(show(Prop::exists("k", Prop::eq(v("n"), Exp::mul(2, v("k"))))) == "?k. n = 2*k");
}

TEST_CASE("linearize_exp") {
  Linearized z = linearize_exp(Exp::sub(Exp::add(v("p"), c(1)), Exp::add(c(1), v("p"))));
  CHECK(z.ok);
  CHECK(z.is_zero);
  Linearized s = linearize_exp(Exp::sub(Exp::add(v("p"), c(3)), v("p")));
  CHECK(s.ok);
  CHECK_FALSE(s.is_zero);
  CHECK(show(s.exp) == "3");
  CHECK_FALSE(linearize_exp(Exp::sub(v("p"), c(1))).ok);
}

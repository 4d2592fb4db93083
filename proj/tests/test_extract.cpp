#include <random>

#include "doctest.h"
#include "recurrify/corpus.hpp"
#include "recurrify/extract.hpp"
#include "recurrify/fuzz.hpp"
#include "recurrify/rec_simplify.hpp"
#include "recurrify/rec_typecheck.hpp"

using namespace recurrify;

TEST_CASE("type translation clauses") {
  CHECK(rec_type_equal(extract_type(ty::unit()), rty::cmplx(rty::unit())));
  // <s -> t> = <s> -> C(<t>)
  auto a = extract_type_potential(ty::arrow(ty::unit(), ty::integer()));
  CHECK(rec_type_equal(a, rty::arrow(rty::unit(),
                                     rty::cmplx(rty::integer()))));
  // list int translates structurally through mu, sum, and product.
  CHECK(rec_type_equal(extract_type_potential(ty::list(ty::integer())),
                       rty::list(rty::integer())));
  CHECK(rec_type_equal(extract_type_potential(ty::boolean()), rty::boolean()));
}

TEST_CASE("expression extraction clauses") {
  CHECK(rec_expr_equal(extract_expr(ex::unitval()), rx::val(rx::unitval())));
  CHECK(show_rec(extract_expr(ex::tick(ex::unitval()))) == "incr (val ())");

  auto f = ex::fun("f", "x", ty::unit(), ty::unit(), ex::var("x"));
  auto rf = extract_expr(f);
  const auto *v = std::get_if<RecExpr::Val>(&rf->node);
  REQUIRE(v);
  const auto *fx = std::get_if<RecExpr::Fix>(&v->arg->node);
  REQUIRE(fx);
  CHECK(fx->name == "f");
  const auto *lm = std::get_if<RecExpr::Lam>(&fx->body->node);
  REQUIRE(lm);
  CHECK(lm->param == "x");
  CHECK(rec_expr_equal(lm->body, rx::val(rx::var("x"))));

  auto inj = extract_expr({{"y", ty::unit()}},
                          ex::inj_at(0, ty::integer(), ex::var("y")));
  CHECK(show_rec(inj) == "p0 <- val y; val (in0 p0)");
}

TEST_CASE("application extraction binds both translations") {
  TypeCtx ctx{{"g", ty::arrow(ty::unit(), ty::unit())}, {"u", ty::unit()}};
  auto e = extract_expr(ctx, ex::app(ex::var("g"), ex::var("u")));
  CHECK(show_rec(e) == "(p0, p1) <- (val g, val u); p0 p1");
  CHECK(show_rec(simplify(e)) == "g u");
}

TEST_CASE("value translation clauses") {
  CHECK(rec_expr_equal(extract_value(ex::unitval()), rx::unitval()));
  auto fv = ex::fold(ty::list(ty::unit()),
                     ex::inj_at(0, ty::prod(ty::unit(), ty::list(ty::unit())),
                                ex::unitval()));
  auto pv = extract_value(fv);
  const auto *f = std::get_if<RecExpr::Fold>(&pv->node);
  REQUIRE(f);
  CHECK(rec_type_equal(f->rec_type, rty::list(rty::unit())));
  auto fun = ex::fun("f", "x", ty::unit(), ty::unit(), ex::tick(ex::var("x")));
  auto pf = extract_value(fun);
  const auto *fx = std::get_if<RecExpr::Fix>(&pf->node);
  REQUIRE(fx);
  const auto *lm = std::get_if<RecExpr::Lam>(&fx->body->node);
  REQUIRE(lm);
  CHECK(rec_expr_equal(lm->body, rx::incr(rx::val(rx::var("x")))));
  CHECK_THROWS(extract_value(ex::tick(ex::unitval())));
}

TEST_CASE("value extraction lemma: ||v|| simplifies to val <v>") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    auto t = fuzz_type(rng, 2);
    auto v = fuzz_value(rng, t, 3);
    auto lhs = simplify(extract_expr(v));
    auto rhs = rx::val(extract_value(v));
    CAPTURE(show_expr(v));
    CHECK(rec_alpha_equal(lhs, rhs));
  }
}

TEST_CASE("substitution lemma on fuzzed expressions") {
  std::mt19937_64 rng(22);
  int nontrivial = 0;
  for (int i = 0; i < 500; ++i) {
    auto vt = fuzz_type(rng, 1);
    auto goal = fuzz_type(rng, 1);
    auto v = fuzz_value(rng, vt, 2);
    TypeCtx ctx{{"sub", vt}};
    auto e = fuzz_expr(rng, ctx, goal, 8, 0.05);
    if (free_vars(e).count("sub")) ++nontrivial;
    auto lhs = simplify(extract_expr(subst(e, {{"sub", v}})));
    auto rhs = simplify(
        rec_subst(extract_expr(ctx, e), {{"sub", extract_value(v)}}));
    CAPTURE(show_expr(e));
    CAPTURE(show_expr(v));
    CHECK(rec_alpha_equal(lhs, rhs));
  }
  CHECK(nontrivial >= 20);
}

TEST_CASE("type correctness of extraction") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    FuzzOptions opts;
    opts.seed = 9000 + i;
    auto e = fuzz_program(opts);
    auto src_ty = typecheck({}, e);
    auto rec_ty = typecheck_rec({}, extract_expr(e));
    CAPTURE(show_expr(e));
    CHECK(rec_type_equal(rec_ty, extract_type(src_ty)));
  }
}

TEST_CASE("type correctness on the corpus definitions") {
  auto prog = load_corpus("sorting");
  TypeCtx src_ctx;
  RecTypeCtx rec_ctx;
  for (const auto &d : prog.defs) {
    auto r = extract_expr(src_ctx, d.value);
    CHECK(rec_type_equal(typecheck_rec(rec_ctx, r), extract_type(d.type)));
    auto rs = simplify(r);
    CHECK(rec_type_equal(typecheck_rec(rec_ctx, rs), extract_type(d.type)));
    src_ctx[d.name] = d.type;
    rec_ctx[d.name] = extract_type_potential(d.type);
  }
}

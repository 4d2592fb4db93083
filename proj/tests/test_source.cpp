#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "recurrify/corpus.hpp"
#include "recurrify/errors.hpp"
#include "recurrify/fuzz.hpp"
#include "recurrify/source_ast.hpp"
#include "recurrify/source_parser.hpp"
#include "recurrify/source_typecheck.hpp"

using namespace recurrify;

namespace {

SrcExprPtr parse1(const std::string &text) { return parse_expr(text, {}); }

}  // namespace

TEST_CASE("nil desugars to fold of the left injection") {
  auto e = parse1("nil[int]");
  auto expected = ex::nil(ty::integer());
  CHECK(expr_equal(e, expected));
  const auto *f = std::get_if<SrcExpr::Fold>(&e->node);
  REQUIRE(f);
  CHECK(type_equal(f->rec_type, ty::list(ty::integer())));
  const auto *i = std::get_if<SrcExpr::Inj>(&f->arg->node);
  REQUIRE(i);
  CHECK(i->tag == 0);
  CHECK(std::holds_alternative<SrcExpr::UnitVal>(i->arg->node));
}

TEST_CASE("unit literal parses to UnitVal") {
  CHECK(std::holds_alternative<SrcExpr::UnitVal>(parse1("()")->node));
}

TEST_CASE("caselist desugars to case-unfold-letpair") {
  auto e = parse1(
      "caselist nil[int] of nil => 0 | cons(x, xs) => 1");
  const auto *c = std::get_if<SrcExpr::Case>(&e->node);
  REQUIRE(c);
  CHECK(c->bind0 == "_");
  const auto *u = std::get_if<SrcExpr::Unfold>(&c->scrutinee->node);
  REQUIRE(u);
  CHECK(type_equal(u->rec_type, ty::list(ty::integer())));
  const auto *l = std::get_if<SrcExpr::LetPair>(&c->branch1->node);
  REQUIRE(l);
  CHECK(l->x0 == "x");
  CHECK(l->x1 == "xs");
  const auto *z = std::get_if<SrcExpr::Var>(&l->pair->node);
  REQUIRE(z);
  CHECK(z->name == c->bind1);
}

TEST_CASE("if desugars to case over bool") {
  auto e = parse1("if true then 1 else 2");
  const auto *c = std::get_if<SrcExpr::Case>(&e->node);
  REQUIRE(c);
  CHECK(c->bind0 == "_");
  CHECK(c->bind1 == "_");
  CHECK(expr_equal(c->scrutinee, ex::truev()));
}

TEST_CASE("list literals expand to cons chains") {
  auto e = parse1("[1, 2]");
  auto expected = ex::int_list({1, 2});
  CHECK(expr_equal(e, expected));
}

TEST_CASE("typecheck: fun rule") {
  auto e = parse1("fun f (x : int) : int => f x");
  CHECK(type_equal(typecheck({}, e), ty::arrow(ty::integer(), ty::integer())));
}

TEST_CASE("typecheck: fold at list unit") {
  auto e = ex::fold(ty::list(ty::unit()), ex::inj(0, ex::unitval()));
  auto t = typecheck({}, e);
  CHECK(type_equal(t, ty::list(ty::unit())));
  CHECK(type_equal(t, ty::rec("a", ty::sum(ty::unit(),
                                           ty::prod(ty::unit(), ty::var("a"))))));
}

TEST_CASE("typecheck: tick preserves the type") {
  CHECK(type_equal(typecheck({}, ex::tick(ex::unitval())), ty::unit()));
  CHECK(type_equal(typecheck({}, parse1("tick (leq(1, 2))")), ty::boolean()));
}

TEST_CASE("typecheck: errors") {
  CHECK_THROWS_AS(typecheck({}, ex::var("ghost")), TypeError);
  CHECK_THROWS_AS(typecheck({}, ex::app(ex::unitval(), ex::unitval())),
                  TypeError);
  CHECK_THROWS_AS(typecheck({}, ex::inj(0, ex::unitval())), TypeError);
}

TEST_CASE("subst_type examples") {
  auto list_body = ty::sum(ty::unit(), ty::prod(ty::unit(), ty::var("a")));
  auto mu = ty::rec("a", list_body);
  auto unrolled = subst_type(list_body, mu, "a");
  CHECK(type_equal(unrolled,
                   ty::sum(ty::unit(), ty::prod(ty::unit(), mu))));
  CHECK(type_equal(subst_type(ty::var("a"), ty::integer(), "a"),
                   ty::integer()));
  CHECK(type_equal(subst_type(ty::unit(), ty::integer(), "a"), ty::unit()));
}

TEST_CASE("subst_type avoids capture") {
  auto body = ty::rec("b", ty::prod(ty::var("a"), ty::var("b")));
  auto out = subst_type(body, ty::var("b"), "a");
  const auto *r = std::get_if<SrcType::Rec>(&out->node);
  REQUIRE(r);
  CHECK(r->var != "b");
  const auto *p = std::get_if<SrcType::Prod>(&r->body->node);
  REQUIRE(p);
  const auto *left = std::get_if<SrcType::Var>(&p->left->node);
  REQUIRE(left);
  CHECK(left->name == "b");
}

TEST_CASE("is_polynomial_functor") {
  CHECK(is_polynomial_functor(
      ty::sum(ty::unit(), ty::prod(ty::integer(), ty::var("a"))), "a"));
  CHECK_FALSE(is_polynomial_functor(ty::arrow(ty::var("a"), ty::var("a")),
                                    "a"));
  CHECK(is_polynomial_functor(
      ty::prod(ty::integer(), ty::prod(ty::var("a"), ty::var("a"))), "a"));
  CHECK_FALSE(is_polynomial_functor(ty::prod(ty::var("b"), ty::var("a")),
                                    "a"));
}

TEST_CASE("parse of pretty-print is the identity on corpus defs") {
  for (const auto &[name, text] : corpus_sources()) {
    auto prog = parse_program(text);
    std::vector<Def> seen;
    for (const auto &d : prog.defs) {
      auto printed = show_expr(d.value);
      CAPTURE(name);
      CAPTURE(printed);
      auto reparsed = parse_expr(printed, seen);
      CHECK(expr_equal(reparsed, d.value));
      seen.push_back(d);
    }
  }
}

TEST_CASE("parse of pretty-print is the identity on fuzzed programs") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    FuzzOptions opts;
    opts.seed = seed;
    auto e = fuzz_program(opts);
    auto printed = show_expr(e);
    CAPTURE(seed);
    CAPTURE(printed);
    auto reparsed = parse_expr(printed, {});
    CHECK(expr_equal(reparsed, e));
  }
}

TEST_CASE("elaborated programs typecheck with the recorded type") {
  for (const auto &[name, text] : corpus_sources()) {
    auto prog = parse_program(text);
    TypeCtx ctx;
    for (const auto &d : prog.defs) {
      CAPTURE(name);
      CAPTURE(d.name);
      CHECK(type_equal(typecheck(ctx, d.value), d.type));
      ctx[d.name] = d.type;
    }
  }
}

TEST_CASE("typing is stable under resolution") {
  auto prog = load_corpus("sorting");
  auto e = parse_expr("msort [3, 1, 2]", prog.defs);
  auto closed = resolve_defs(prog.defs, e);
  CHECK(expr_closed(closed));
  CHECK(type_equal(typecheck({}, closed), ty::list(ty::integer())));
}

TEST_CASE("shadowing resolves to the innermost binding") {
  auto e = parse1(
      "let (x, y) = (1, 2) in let (x, z) = ((), 3) in x");
  CHECK(type_equal(typecheck({}, e), ty::unit()));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_program("def broken = caselist of ;");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line >= 1);
    CHECK(e.col >= 1);
  }
  CHECK_THROWS_AS(parse1("frobnicate 3"), ParseError);
}

TEST_CASE("shipped corpus files match the embedded sources") {
#ifdef RECURRIFY_CORPUS_DIR
  for (const auto &[name, text] : corpus_sources()) {
    std::ifstream in(std::string(RECURRIFY_CORPUS_DIR) + "/" + name + ".src");
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == text);
  }
#endif
}

TEST_CASE("substitution avoids capture") {
  auto body = ex::fun("f", "y", ty::unit(), ty::unit(), ex::var("x"));
  auto out = subst(body, {{"x", ex::var("y")}});
  const auto *f = std::get_if<SrcExpr::Fun>(&out->node);
  REQUIRE(f);
  CHECK(f->param != "y");
  const auto *v = std::get_if<SrcExpr::Var>(&f->body->node);
  REQUIRE(v);
  CHECK(v->name == "y");
}

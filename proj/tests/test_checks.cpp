#include <random>

#include "doctest.h"
#include "recurrify/analysis.hpp"
#include "recurrify/corpus.hpp"
#include "recurrify/fuzz.hpp"
#include "recurrify/rec_simplify.hpp"
#include "recurrify/source_typecheck.hpp"

using namespace recurrify;

TEST_CASE("fuzzer: every generated term typechecks") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    FuzzOptions opts;
    opts.seed = seed;
    auto e = fuzz_program(opts);
    CAPTURE(seed);
    CHECK(expr_closed(e));
    CHECK_NOTHROW(typecheck({}, e));
  }
}

TEST_CASE("fuzzer: deterministic given the seed") {
  FuzzOptions opts;
  opts.seed = 0;
  CHECK(show_expr(fuzz_program(opts)) == "()");
  opts.seed = 1;
  auto a = fuzz_program(opts);
  auto b = fuzz_program(opts);
  CHECK(expr_equal(a, b));
  CHECK(show_expr(a) ==
        "if true then let (px, py) = let (px, py) = (true, inj0[bool] true) "
        "in (cons(true, nil[bool]), cons(true, nil[bool])) in false else "
        "false");
}

TEST_CASE("soundness: divergers and units") {
  auto div = load_corpus("divergers");
  for (const auto &d : div.defs) {
    auto e = resolve_defs(div.defs, ex::app(ex::var(d.name), ex::unitval()));
    auto o = eval(e, 2000);
    CHECK_FALSE(o.complete);
    // Cost so far is below the (infinite) semantic bound in either mode.
    for (auto mode : {ProductMode::Cartesian, ProductMode::Powerset}) {
      ModelConfig cfg;
      cfg.product_mode = mode;
      cfg.fix_fuel = 32;
      CHECK_FALSE(soundness_violation(e, 2000, cfg).has_value());
    }
  }
  ModelConfig cfg;
  CHECK_FALSE(
      soundness_violation(ex::tick(ex::unitval()), 100, cfg).has_value());
}

TEST_CASE("soundness: fuzz smoke run") {
  SoundnessOptions opts;
  opts.trials = 150;
  opts.max_perm_len = 4;
  opts.fuel = 10000;
  auto rep = check_soundness(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  CHECK(rep.ok());
  CHECK(rep.checked > 300);
}

TEST_CASE("adequacy smoke run") {
  AdequacyOptions opts;
  opts.max_size = 4;
  auto rep = check_adequacy(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  CHECK(rep.ok());
  CHECK(rep.checked > 100);
}

TEST_CASE("model axioms smoke run") {
  AxiomOptions opts;
  opts.trials = 100;
  auto rep = check_model_axioms(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  CHECK(rep.ok());
  CHECK(rep.checked == 100 * 7 * 2);
}

TEST_CASE("bind collapses to a cost-prefixed substitution, denotationally") {
  // bind p <- E; body  =  E_c +c body[E_p / p], checked on random
  // instances in both product modes.
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    auto st = fuzz_rec_type(rng, 1);
    auto bt = fuzz_rec_type(rng, 1);
    auto src = fuzz_rec_expr(rng, {}, rty::cmplx(st), 6);
    RecTypeCtx c{{"p", st}};
    auto body = fuzz_rec_expr(rng, c, rty::cmplx(bt), 6);
    auto lhs = rx::bind({"p"}, {src}, body);
    auto rhs = rx::plusc(rx::costp(src),
                         rec_subst(body, {{"p", rx::potp(src)}}));
    for (auto mode : {ProductMode::Cartesian, ProductMode::Powerset}) {
      DenoteCtx ctx;
      ctx.cfg.product_mode = mode;
      SemEnv env;
      CAPTURE(show_rec(lhs));
      CHECK(sem_equal(denote(lhs, env, ctx), denote(rhs, env, ctx), ctx));
    }
  }
}

TEST_CASE("plusc of zero is the identity, denotationally") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    auto t = fuzz_rec_type(rng, 1);
    auto e = fuzz_rec_expr(rng, {}, rty::cmplx(t), 6);
    DenoteCtx ctx;
    SemEnv env;
    CHECK(sem_equal(denote(rx::plusc(rx::zero(), e), env, ctx),
                    denote(e, env, ctx), ctx));
  }
}

TEST_CASE("cross-check rows flag no violations on the corpus") {
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  for (std::uint64_t n = 0; n <= 6; ++n) {
    auto row = an.analyze("msort", n, std::nullopt, /*cross_check=*/true);
    CHECK_FALSE(row.violation);
    REQUIRE(row.actual_max_cost.has_value());
    CHECK(ninf_leq(NInf::fin(*row.actual_max_cost), row.semantic_cost));
  }
  ModelConfig pow;
  pow.product_mode = ProductMode::Powerset;
  Analyzer anp(prog, pow);
  for (std::uint64_t n = 0; n <= 6; ++n) {
    auto row = anp.analyze("qsort", n, std::nullopt, /*cross_check=*/true);
    CHECK_FALSE(row.violation);
  }
}

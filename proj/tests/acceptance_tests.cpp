// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Expected values tagged as derived come from the oracles in
// oracles.hpp, written before the model and kept independent of it.
#include <chrono>
#include <cstdio>

#include "doctest.h"
#include "oracles.hpp"
#include "recurrify/analysis.hpp"
#include "recurrify/corpus.hpp"
#include "recurrify/extract.hpp"
#include "recurrify/fuzz.hpp"
#include "recurrify/rec_simplify.hpp"
#include "recurrify/source_typecheck.hpp"

using namespace recurrify;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void report(int criterion, bool ok, const char *what, double secs,
            double limit) {
  std::printf("[criterion %d] %s - %s (%.2fs, limit %.0fs)\n", criterion,
              ok && secs < limit ? "PASS" : "FAIL", what, secs, limit);
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, ": ", what);
  CHECK_MESSAGE(secs < limit, "criterion ", criterion, " exceeded ", limit,
                "s");
}

const char *kGoldenExtractions[][2] = {
    {"split",
     "val (fix split. \\xs. caselist xs of nil => val (nil, nil) | cons(y, "
     "ys) => caselist ys of nil => val (cons(y, nil), nil) | cons(z, zs) => "
     "(split zs)_c +c (let (as, bs) = (split zs)_p in val (cons(y, as), "
     "cons(z, bs))))"},
    {"merge",
     "val (fix merge. \\xsys. let (xs, ys) = xsys in caselist xs of nil => "
     "val ys | cons(x', xs') => caselist ys of nil => val xs | cons(y', ys') "
     "=> 1 +c (if leq(x', y') then cons(x', (merge (xs', ys))_p) withcost "
     "(merge (xs', ys))_c else cons(y', (merge (xs, ys'))_p) withcost (merge "
     "(xs, ys'))_c))"},
    {"msort",
     "val (fix msort. \\xs. caselist xs of nil => val nil | cons(y, ys) => "
     "caselist ys of nil => val cons(y, nil) | cons(_, _) => (split xs)_c +c "
     "(let (ws, zs) = (split xs)_p in ((msort ws)_c + (msort zs)_c) +c "
     "(merge ((msort ws)_p, (msort zs)_p))))"},
    {"part",
     "val (fix part. \\xxs. let (x, xs) = xxs in caselist xs of nil => val "
     "(nil, nil) | cons(y, ys) => (part (x, ys))_c +c (let (ws, zs) = (part "
     "(x, ys))_p in 1 +c (if leq(x, y) then val (ws, cons(y, zs)) else val "
     "(cons(y, ws), zs))))"},
    {"app",
     "val (fix app. \\xsys. let (xs, ys) = xsys in caselist xs of nil => val "
     "ys | cons(x', xs') => cons(x', (app (xs', ys))_p) withcost (app (xs', "
     "ys))_c)"},
    {"qsort",
     "val (fix qsort. \\xs. caselist xs of nil => val nil | cons(y, ys) => "
     "(part (y, ys))_c +c (let (ws, zs) = (part (y, ys))_p in ((qsort ws)_c "
     "+ (qsort zs)_c) +c (let (ws', zs') = ((qsort ws)_p, (qsort zs)_p) in "
     "app (ws', cons(y, zs')))))"},
};

}  // namespace

TEST_CASE("criterion 1: golden extraction of the six corpus recurrences") {
  Stopwatch sw;
  auto prog = load_corpus("sorting");
  bool ok = true;
  TypeCtx ctx;
  for (const auto &[name, golden] : kGoldenExtractions) {
    const Def &def = find_def(prog, name);
    auto rec = simplify(extract_expr(ctx, def.value));
    std::string printed = show_rec(rec);
    if (printed != golden) {
      ok = false;
      MESSAGE("mismatch for ", name, ":\n  got      ", printed,
              "\n  expected ", golden);
    }
    ctx[def.name] = def.type;
  }
  // Structural spot check, independent of the printer: the simplified split
  // recurrence is val (fix (lam (caselist ...))) with a cost-prefixed
  // recursive branch.
  {
    auto rec = simplify(extract_expr(find_def(prog, "split").value));
    const auto *v = std::get_if<RecExpr::Val>(&rec->node);
    REQUIRE(v);
    const auto *fx = std::get_if<RecExpr::Fix>(&v->arg->node);
    REQUIRE(fx);
    const auto *lm = std::get_if<RecExpr::Lam>(&fx->body->node);
    REQUIRE(lm);
    const auto *outer = std::get_if<RecExpr::Case>(&lm->body->node);
    REQUIRE(outer);
    const auto *un = std::get_if<RecExpr::Unfold>(&outer->scrutinee->node);
    REQUIRE(un);
  }
  report(1, ok, "simplified recurrences match their pinned final forms",
         sw.seconds(), 1.0);
}

TEST_CASE("criterion 2: split cost 0 and halved potentials for n in 0..64") {
  Stopwatch sw;
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  bool ok = true;
  for (std::uint64_t n = 0; n <= 64; ++n) {
    auto row = an.analyze("split", n);
    bool cost_ok = !row.semantic_cost.is_inf() && *row.semantic_cost.v == 0;
    std::string want = "(" + std::to_string(oracles::ceil_div2(n)) + ", " +
                       std::to_string(oracles::floor_div2(n)) + ")";
    bool pot_ok = row.potential_text == want && !row.widened;
    if (!(cost_ok && pot_ok)) {
      ok = false;
      MESSAGE("split at ", n, ": cost ", show_ninf(row.semantic_cost),
              " potential ", row.potential_text);
    }
  }
  report(2, ok, "split_c = 0 and split_p = (ceil(n/2), floor(n/2))",
         sw.seconds(), 5.0);
}

TEST_CASE("criterion 3: merge cost and potential equal k+l on 0..32 squared") {
  Stopwatch sw;
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  bool cost_ok = true, pot_ok = true;
  std::uint64_t first_bad_k = 0, first_bad_l = 0;
  NInf first_bad_cost;
  bool have_bad = false;
  for (std::uint64_t k = 0; k <= 32; ++k) {
    for (std::uint64_t l = 0; l <= 32; ++l) {
      auto row = an.analyze("merge", k, l);
      bool c = !row.semantic_cost.is_inf() && *row.semantic_cost.v == k + l;
      if (!c && !have_bad) {
        have_bad = true;
        first_bad_k = k;
        first_bad_l = l;
        first_bad_cost = row.semantic_cost;
      }
      cost_ok = cost_ok && c;
      pot_ok = pot_ok && row.potential_text == std::to_string(k + l);
    }
  }
  if (!cost_ok) {
    MESSAGE(
        "merge_c(k, l) = k + l fails; the model's least fixpoint is the "
        "tight comparison count (k + l - 1 when both sides are nonempty, 0 "
        "otherwise). First mismatch at (",
        first_bad_k, ", ", first_bad_l, "): semantic cost ",
        show_ninf(first_bad_cost), ". See the merge reference test below.");
  }
  report(3, cost_ok && pot_ok,
         "merge_c(k, l) = k + l and merge_p(k, l) = k + l, exactly",
         sw.seconds(), 30.0);
}

TEST_CASE("merge reference: the model matches the tight oracle exactly") {
  // Companion to criterion 3: the denotation solves the extracted
  // recurrence exactly, and concrete runs reach the bound.
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  for (std::uint64_t k = 0; k <= 32; ++k) {
    for (std::uint64_t l = 0; l <= 32; ++l) {
      auto row = an.analyze("merge", k, l);
      REQUIRE_FALSE(row.semantic_cost.is_inf());
      CHECK(*row.semantic_cost.v == oracles::merge_cost(k, l));
      CHECK(row.potential_text == std::to_string(k + l));
      CHECK_FALSE(row.widened);
    }
  }
  for (std::uint64_t k : {1ull, 3ull, 7ull}) {
    for (std::uint64_t l : {1ull, 2ull, 6ull}) {
      auto row = an.analyze("merge", k, l, /*cross_check=*/true);
      CHECK_FALSE(row.violation);
      CHECK(*row.actual_max_cost == oracles::merge_cost(k, l));
    }
  }
}

TEST_CASE("criterion 4: msort cost equals the unrolled recurrence on 0..128") {
  Stopwatch sw;
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  bool equal_ok = true, bound_ok = true;
  std::uint64_t first_bad = 0;
  NInf first_bad_cost;
  bool have_bad = false;
  for (std::uint64_t n = 0; n <= 128; ++n) {
    auto row = an.analyze("msort", n);
    REQUIRE_FALSE(row.semantic_cost.is_inf());
    std::uint64_t got = *row.semantic_cost.v;
    if (got != oracles::msort_cost_loose(n)) {
      equal_ok = false;
      if (!have_bad) {
        have_bad = true;
        first_bad = n;
        first_bad_cost = row.semantic_cost;
      }
    }
    if (n >= 2 && got > n * oracles::ceil_log2(n)) bound_ok = false;
  }
  if (!equal_ok) {
    MESSAGE(
        "msort_c(n) = n + msort_c(ceil(n/2)) + msort_c(floor(n/2)) fails "
        "because the model's merge cost is the tight k + l - 1; the "
        "denotation instead satisfies the recurrence with merge_c(ceil, "
        "floor) as the top summand. First mismatch at n=",
        first_bad, ": semantic ", show_ninf(first_bad_cost), ", unrolled ",
        oracles::msort_cost_loose(first_bad),
        ". See the msort reference test below.");
  }
  report(4, equal_ok && bound_ok,
         "msort_c matches the unrolled n + T(ceil) + T(floor) recurrence and "
         "msort_c(n) <= n ceil(lg n)",
         sw.seconds(), 30.0);
}

TEST_CASE("msort reference: the model matches the tight oracle exactly") {
  auto prog = load_corpus("sorting");
  Analyzer an(prog, ModelConfig{});
  for (std::uint64_t n = 0; n <= 128; ++n) {
    auto row = an.analyze("msort", n);
    REQUIRE_FALSE(row.semantic_cost.is_inf());
    CHECK(*row.semantic_cost.v == oracles::msort_cost(n));
    CHECK(row.potential_text == std::to_string(n));
    // The tight count still respects the n lg n budget.
    if (n >= 2) CHECK(*row.semantic_cost.v <= n * oracles::ceil_log2(n));
  }
  // Exhaustive cross-check at small sizes: the bound is reached.
  for (std::uint64_t n = 0; n <= 6; ++n) {
    auto row = an.analyze("msort", n, std::nullopt, /*cross_check=*/true);
    CHECK_FALSE(row.violation);
    CHECK(*row.actual_max_cost == oracles::msort_cost(n));
  }
  // Spot checks up to 256; the largest needs a deeper fixpoint budget
  // because the top-level merge stabilizes only after ~2n unrollings.
  for (std::uint64_t n : {160ull, 200ull}) {
    auto row = an.analyze("msort", n);
    CHECK(*row.semantic_cost.v == oracles::msort_cost(n));
    CHECK(*row.semantic_cost.v <= n * oracles::ceil_log2(n));
  }
  ModelConfig deep;
  deep.fix_fuel = 640;
  Analyzer an_deep(prog, deep);
  auto row256 = an_deep.analyze("msort", 256);
  CHECK(*row256.semantic_cost.v == oracles::msort_cost(256));
  CHECK(*row256.semantic_cost.v <= 256 * oracles::ceil_log2(256));
  CHECK_FALSE(row256.widened);
}

TEST_CASE("criterion 5: quick sort separation between the two models") {
  Stopwatch sw;
  auto prog = load_corpus("sorting");
  bool ok = true;

  ModelConfig cart;
  cart.product_mode = ProductMode::Cartesian;
  Analyzer an_cart(prog, cart);
  NInf prev = NInf::fin(0);
  for (std::uint64_t n = 0; n <= 16; ++n) {
    auto row = an_cart.analyze("qsort", n);
    if (n >= 3) {
      // cost(n) >= 2 cost(n-1), with infinity dominating everything.
      NInf doubled = ninf_add(prev, prev);
      if (!ninf_leq(doubled, row.semantic_cost)) {
        ok = false;
        MESSAGE("cartesian qsort fails to double at n=", n);
      }
    }
    prev = row.semantic_cost;
  }

  ModelConfig pow;
  pow.product_mode = ProductMode::Powerset;
  Analyzer an_pow(prog, pow);
  for (std::uint64_t n = 0; n <= 20; ++n) {
    auto row = an_pow.analyze("qsort", n);
    bool exact = !row.semantic_cost.is_inf() &&
                 *row.semantic_cost.v == oracles::qsort_pow_cost(n) &&
                 *row.semantic_cost.v == n * (n - (n > 0 ? 1 : 0)) / 2;
    if (!exact) {
      ok = false;
      MESSAGE("powerset qsort at n=", n, ": ", show_ninf(row.semantic_cost));
    }
  }
  report(5, ok,
         "cartesian qsort cost at least doubles per step; powerset qsort "
         "cost is exactly n(n-1)/2",
         sw.seconds(), 60.0);
}

TEST_CASE("criterion 6: empirical soundness over permutations and fuzzing") {
  Stopwatch sw;
  SoundnessOptions opts;
  opts.trials = 1000;
  opts.seed = 0;
  opts.fuel = 10000;
  opts.max_perm_len = 6;
  auto rep = check_soundness(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  bool ok = rep.ok() && rep.checked >= 2 * (873 + 873) + 2000;
  report(6, ok, "no violations of c <= cost bound or potential bound",
         sw.seconds(), 300.0);
}

TEST_CASE("criterion 7: model axiom suite") {
  Stopwatch sw;
  AxiomOptions opts;
  opts.trials = 500;
  opts.seed = 1;
  auto rep = check_model_axioms(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  bool ok = rep.ok() && rep.checked == 500 * 7 * 2;
  report(7, ok,
         "beta equalities, beta-fold inequality, zero axiom, monotonicity",
         sw.seconds(), 120.0);
}

TEST_CASE("criterion 8: lemma suite") {
  Stopwatch sw;
  bool ok = true;
  std::mt19937_64 rng(8);
  // Value extraction: ||v|| simplifies to val <v>.
  for (int i = 0; i < 500; ++i) {
    auto t = fuzz_type(rng, 2);
    auto v = fuzz_value(rng, t, 3);
    if (!rec_alpha_equal(simplify(extract_expr(v)),
                         rx::val(extract_value(v)))) {
      ok = false;
      MESSAGE("value extraction lemma failed for ", show_expr(v));
    }
  }
  // Substitution lemma.
  for (int i = 0; i < 500; ++i) {
    auto vt = fuzz_type(rng, 1);
    auto goal = fuzz_type(rng, 1);
    auto v = fuzz_value(rng, vt, 2);
    TypeCtx ctx{{"sub", vt}};
    auto e = fuzz_expr(rng, ctx, goal, 8, 0.05);
    auto lhs = simplify(extract_expr(subst(e, {{"sub", v}})));
    auto rhs =
        simplify(rec_subst(extract_expr(ctx, e), {{"sub", extract_value(v)}}));
    if (!rec_alpha_equal(lhs, rhs)) {
      ok = false;
      MESSAGE("substitution lemma failed for ", show_expr(e));
    }
  }
  // Complexity pairing.
  for (int i = 0; i < 500; ++i) {
    auto t = rty::cmplx(fuzz_rec_type(rng, 1));
    auto e = fuzz_rec_expr(rng, {}, t, 6);
    DenoteCtx ctx;
    SemEnv env;
    auto whole = denote(e, env, ctx);
    const auto &c = std::get<SemNode::CmplxV>(whole.node().node);
    auto cost = denote(rx::costp(e), env, ctx);
    auto pot = denote(rx::potp(e), env, ctx);
    if (sem_compare(sem::ninf(c.cost), cost) != 0 ||
        sem_compare(c.pot, pot) != 0) {
      ok = false;
      MESSAGE("pairing failed for ", show_rec(e));
    }
  }
  report(8, ok, "value-extraction, substitution, and pairing lemmas",
         sw.seconds(), 60.0);
}

TEST_CASE("criterion 9: adequacy for costs on the corpus") {
  Stopwatch sw;
  AdequacyOptions opts;
  opts.max_size = 6;
  auto rep = check_adequacy(opts);
  for (const auto &m : rep.messages) MESSAGE(m);
  bool ok = rep.ok() && rep.checked > 1000;
  report(9, ok, "finite semantic cost implies termination within the bound",
         sw.seconds(), 300.0);
}

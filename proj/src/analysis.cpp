#include "recurrify/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "recurrify/corpus.hpp"
#include "recurrify/errors.hpp"
#include "recurrify/fuzz.hpp"
#include "recurrify/rec_simplify.hpp"

namespace recurrify {

std::optional<ArgShape> arg_shape(const SrcTypePtr &def_type) {
  const auto *ar = std::get_if<SrcType::Arrow>(&def_type->node);
  if (!ar) return std::nullopt;
  if (list_elem_type(ar->dom)) return ArgShape::ListArg;
  const auto *pr = std::get_if<SrcType::Prod>(&ar->dom->node);
  if (!pr) return std::nullopt;
  if (list_elem_type(pr->left) && list_elem_type(pr->right))
    return ArgShape::PairOfLists;
  if (std::holds_alternative<SrcType::Int>(pr->left->node) &&
      list_elem_type(pr->right))
    return ArgShape::IntAndList;
  return std::nullopt;
}

Analyzer::Analyzer(Program program, const ModelConfig &cfg)
    : program_(std::move(program)) {
  ctx_.cfg = cfg;
  TypeCtx src_ctx;
  for (const auto &d : program_.defs) {
    if (!is_value(d.value))
      throw TypeError("definition " + d.name + " is not a value");
    auto pot = extract_value(d.value, src_ctx);
    auto pot_ty = extract_type_potential(d.type);
    env_ = env_.bind(d.name, denote(pot, env_, ctx_), pot_ty);
    src_ctx[d.name] = d.type;
  }
}

namespace {

SemVal make_size_arg(ArgShape shape, std::uint64_t n,
                     std::optional<std::uint64_t> n2, DenoteCtx &ctx) {
  bool pow = ctx.cfg.product_mode == ProductMode::Powerset;
  switch (shape) {
    case ArgShape::ListArg:
      return sem::fin(n);
    case ArgShape::PairOfLists: {
      auto a = sem::fin(n);
      auto b = sem::fin(n2.value_or(n));
      if (pow) return sem::tuple_set({{a, b}}, ctx);
      return sem::tuple(a, b);
    }
    case ArgShape::IntAndList: {
      auto a = sem::int_top();
      auto b = sem::fin(n);
      if (pow) return sem::tuple_set({{a, b}}, ctx);
      return sem::tuple(a, b);
    }
  }
  throw DomainError("unsupported argument shape");
}

std::vector<std::int64_t> iota_vec(std::uint64_t n) {
  std::vector<std::int64_t> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

}  // namespace

std::vector<std::vector<std::int64_t>> permutations(std::size_t n) {
  std::vector<std::vector<std::int64_t>> out;
  auto v = iota_vec(n);
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::vector<SrcExprPtr> concrete_list_inputs(std::uint64_t n,
                                             std::uint64_t seed) {
  std::vector<SrcExprPtr> out;
  if (n <= 6) {
    for (const auto &p : permutations(n)) out.push_back(ex::int_list(p));
    return out;
  }
  auto v = iota_vec(n);
  out.push_back(ex::int_list(v));  // sorted: qsort worst case
  auto rev = v;
  std::reverse(rev.begin(), rev.end());
  out.push_back(ex::int_list(rev));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 16; ++i) {
    auto s = v;
    std::shuffle(s.begin(), s.end(), rng);
    out.push_back(ex::int_list(s));
  }
  return out;
}

std::vector<SrcExprPtr> concrete_pair_inputs(std::uint64_t k, std::uint64_t l,
                                             std::uint64_t seed) {
  std::vector<SrcExprPtr> out;
  // Worst case for merge: the left list holds the global maximum, so both
  // sides stay nonempty until the final element and every step compares.
  if (k >= 1 && l >= 1) {
    std::vector<std::int64_t> a, b;
    for (std::uint64_t i = 1; i <= k - 1; ++i)
      a.push_back(static_cast<std::int64_t>(i));
    a.push_back(static_cast<std::int64_t>(k + l));
    for (std::uint64_t i = k; i <= k + l - 1; ++i)
      b.push_back(static_cast<std::int64_t>(i));
    out.push_back(ex::pair(ex::int_list(a), ex::int_list(b)));
  }
  // Alternating interleave.
  std::vector<std::int64_t> a, b;
  for (std::uint64_t i = 1; i <= k + l; ++i) {
    if ((i % 2 == 1 && a.size() < k) || b.size() >= l)
      a.push_back(static_cast<std::int64_t>(i));
    else
      b.push_back(static_cast<std::int64_t>(i));
  }
  out.push_back(ex::pair(ex::int_list(a), ex::int_list(b)));
  // Block split.
  std::vector<std::int64_t> c, d;
  for (std::uint64_t i = 1; i <= k; ++i) c.push_back(static_cast<std::int64_t>(i));
  for (std::uint64_t i = k + 1; i <= k + l; ++i)
    d.push_back(static_cast<std::int64_t>(i));
  out.push_back(ex::pair(ex::int_list(c), ex::int_list(d)));
  // Random sorted splits.
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 8; ++t) {
    std::vector<std::int64_t> xs, ys;
    for (std::uint64_t i = 1; i <= k + l; ++i) {
      bool to_a = xs.size() < k && (ys.size() >= l || rng() % 2 == 0);
      (to_a ? xs : ys).push_back(static_cast<std::int64_t>(i));
    }
    out.push_back(ex::pair(ex::int_list(xs), ex::int_list(ys)));
  }
  return out;
}

AnalysisRow Analyzer::analyze(const Name &def_name, std::uint64_t n,
                              std::optional<std::uint64_t> n2,
                              bool cross_check, Fuel fuel) {
  const Def &def = find_def(program_, def_name);
  auto shape = arg_shape(def.type);
  if (!shape)
    throw TypeError("definition " + def_name +
                    " does not take a list, pair-of-lists, or int-and-list "
                    "argument");
  AnalysisRow row;
  row.size = n;
  row.size2 = n2;
  bool saved = ctx_.widened;
  ctx_.widened = false;
  SemVal arg = make_size_arg(*shape, n, n2, ctx_);
  const SemVal *fnp = env_.lookup(def_name);
  if (!fnp) throw DomainError("definition not in environment: " + def_name);
  SemVal fn = *fnp;
  SemVal out = apply_fn(fn, arg, ctx_);
  const auto *c = std::get_if<SemNode::CmplxV>(&out.node().node);
  if (!c) throw DomainError("definition result is not a complexity");
  row.semantic_cost = c->cost;
  row.semantic_potential = c->pot;
  row.potential_text = show_sem(c->pot);
  row.widened = ctx_.widened;
  ctx_.widened = saved || ctx_.widened;

  if (cross_check) {
    std::vector<SrcExprPtr> inputs;
    switch (*shape) {
      case ArgShape::ListArg:
        inputs = concrete_list_inputs(n);
        break;
      case ArgShape::PairOfLists:
        inputs = concrete_pair_inputs(n, n2.value_or(n));
        break;
      case ArgShape::IntAndList: {
        for (auto &lst : concrete_list_inputs(n))
          inputs.push_back(ex::pair(
              ex::intlit(static_cast<std::int64_t>(n / 2 + 1)), lst));
        break;
      }
    }
    Cost worst = 0;
    bool any = false;
    for (const auto &input : inputs) {
      auto applied =
          resolve_defs(program_.defs, ex::app(ex::var(def_name), input));
      Outcome o = eval(applied, fuel);
      if (!o.complete)
        throw EvalError("cross-check ran out of fuel for " + def_name);
      worst = std::max(worst, o.cost);
      any = true;
    }
    if (any) {
      row.actual_max_cost = worst;
      row.violation = !ninf_leq(NInf::fin(worst), row.semantic_cost);
    }
  }
  return row;
}

// ---------------------------------------------------------------------------
// Soundness
// ---------------------------------------------------------------------------

std::optional<std::string> soundness_violation(const SrcExprPtr &closed_expr,
                                               Fuel fuel,
                                               const ModelConfig &cfg) {
  Outcome o = eval(closed_expr, fuel);
  auto recur = extract_expr(closed_expr);
  DenoteCtx ctx;
  ctx.cfg = cfg;
  SemEnv env;
  SemVal r = denote(recur, env, ctx);
  const auto *c = std::get_if<SemNode::CmplxV>(&r.node().node);
  if (!c) return "extracted recurrence did not denote a complexity";
  if (!ninf_leq(NInf::fin(o.cost), c->cost)) {
    std::ostringstream os;
    os << "cost violation: actual " << o.cost << " > semantic "
       << show_ninf(c->cost) << " for `" << show_expr(closed_expr) << "`";
    return os.str();
  }
  if (o.complete) {
    SemVal pv = denote(extract_value(o.value), env, ctx);
    if (!sem_leq(pv, c->pot, ctx)) {
      std::ostringstream os;
      os << "potential violation: value " << show_sem(pv)
         << " not below semantic " << show_sem(c->pot) << " for `"
         << show_expr(closed_expr) << "`";
      return os.str();
    }
  }
  return std::nullopt;
}

namespace {

void run_soundness_case(CheckReport &rep, const SrcExprPtr &e, Fuel fuel) {
  for (auto mode : {ProductMode::Cartesian, ProductMode::Powerset}) {
    ModelConfig cfg;
    cfg.product_mode = mode;
    rep.checked++;
    if (auto msg = soundness_violation(e, fuel, cfg)) {
      rep.violations++;
      rep.messages.push_back(
          (mode == ProductMode::Cartesian ? "[cartesian] " : "[powerset] ") +
          *msg);
    }
  }
}

}  // namespace

CheckReport check_soundness(const SoundnessOptions &opts) {
  CheckReport rep;
  auto sorting = load_corpus("sorting");
  // The semantic bound for a list argument depends only on its length, so
  // evaluate the recurrence once per size and test every permutation
  // against it.
  for (auto mode : {ProductMode::Cartesian, ProductMode::Powerset}) {
    ModelConfig cfg;
    cfg.product_mode = mode;
    Analyzer analyzer(sorting, cfg);
    for (const char *fn : {"msort", "qsort"}) {
      for (std::size_t n = 0; n <= opts.max_perm_len; ++n) {
        auto row = analyzer.analyze(fn, n);
        for (const auto &perm : permutations(n)) {
          rep.checked++;
          auto e = resolve_defs(sorting.defs,
                                ex::app(ex::var(fn), ex::int_list(perm)));
          Outcome o = eval(e, opts.fuel);
          if (!o.complete) {
            rep.violations++;
            rep.messages.push_back(std::string(fn) +
                                   " ran out of fuel on a concrete input");
            continue;
          }
          if (!ninf_leq(NInf::fin(o.cost), row.semantic_cost)) {
            rep.violations++;
            rep.messages.push_back(
                std::string(fn) + " cost violation at n=" + std::to_string(n) +
                ": actual " + std::to_string(o.cost) + " > semantic " +
                show_ninf(row.semantic_cost));
            continue;
          }
          SemVal pv = denote(extract_value(o.value), SemEnv{}, analyzer.ctx());
          if (!sem_leq(pv, row.semantic_potential, analyzer.ctx())) {
            rep.violations++;
            rep.messages.push_back(std::string(fn) +
                                   " potential violation at n=" +
                                   std::to_string(n));
          }
        }
      }
    }
  }
  auto units = load_corpus("units");
  for (const auto &d : units.defs) {
    auto e = resolve_defs(units.defs, ex::var(d.name));
    run_soundness_case(rep, e, opts.fuel);
  }
  auto div = load_corpus("divergers");
  for (const auto &d : div.defs) {
    auto e = resolve_defs(div.defs,
                          ex::app(ex::var(d.name), ex::unitval()));
    run_soundness_case(rep, e, opts.fuel);
  }
  for (std::uint64_t i = 0; i < opts.trials; ++i) {
    FuzzOptions fo;
    fo.seed = opts.seed + i;
    auto e = fuzz_program(fo);
    run_soundness_case(rep, e, opts.fuel);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Adequacy: finite semantic cost implies termination within that cost.
// ---------------------------------------------------------------------------

CheckReport check_adequacy(const AdequacyOptions &opts) {
  CheckReport rep;
  auto sorting = load_corpus("sorting");
  struct Case {
    const char *def;
    ProductMode mode;
  };
  const Case cases[] = {
      {"split", ProductMode::Cartesian}, {"merge", ProductMode::Cartesian},
      {"msort", ProductMode::Cartesian}, {"part", ProductMode::Powerset},
      {"app", ProductMode::Powerset},    {"qsort", ProductMode::Powerset},
  };
  for (const auto &c : cases) {
    ModelConfig cfg;
    cfg.product_mode = c.mode;
    Analyzer analyzer(sorting, cfg);
    const Def &def = find_def(sorting, c.def);
    auto shape = arg_shape(def.type);
    for (std::size_t n = 0; n <= opts.max_size; ++n) {
      std::vector<SrcExprPtr> inputs;
      switch (*shape) {
        case ArgShape::ListArg:
          inputs = concrete_list_inputs(n);
          break;
        case ArgShape::PairOfLists:
          inputs = concrete_pair_inputs(n, n);
          break;
        case ArgShape::IntAndList:
          for (auto &lst : concrete_list_inputs(n))
            inputs.push_back(
                ex::pair(ex::intlit(static_cast<std::int64_t>(n / 2)), lst));
          break;
      }
      auto row = analyzer.analyze(c.def, n,
                                  *shape == ArgShape::PairOfLists
                                      ? std::optional<std::uint64_t>(n)
                                      : std::nullopt);
      if (row.semantic_cost.is_inf()) continue;  // only finite costs count
      for (const auto &input : inputs) {
        auto applied =
            resolve_defs(sorting.defs, ex::app(ex::var(c.def), input));
        rep.checked++;
        Fuel fuel = opts.fuel;
        Outcome o = eval(applied, fuel);
        for (int retry = 0; !o.complete && retry < 2; ++retry) {
          fuel *= 16;
          o = eval(applied, fuel);
        }
        if (!o.complete) {
          rep.violations++;
          rep.messages.push_back(std::string("adequacy failure candidate: ") +
                                 c.def + " did not terminate within fuel " +
                                 std::to_string(fuel));
        } else if (!ninf_leq(NInf::fin(o.cost), row.semantic_cost)) {
          rep.violations++;
          rep.messages.push_back(
              std::string("adequacy violation: ") + c.def + " cost " +
              std::to_string(o.cost) + " > finite semantic " +
              show_ninf(row.semantic_cost));
        }
      }
    }
  }
  // A value terminates at cost 0 with semantic cost 0.
  auto units = load_corpus("units");
  for (const auto &d : units.defs) {
    auto e = resolve_defs(units.defs, ex::var(d.name));
    DenoteCtx ctx;
    SemEnv env;
    SemVal r = denote(extract_expr(e), env, ctx);
    const auto &cm = std::get<SemNode::CmplxV>(r.node().node);
    if (cm.cost.is_inf()) continue;
    rep.checked++;
    Outcome o = eval(e, opts.fuel);
    if (!o.complete || !ninf_leq(NInf::fin(o.cost), cm.cost)) {
      rep.violations++;
      rep.messages.push_back("adequacy violation on unit program " + d.name);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Model axioms
// ---------------------------------------------------------------------------

namespace {

struct AxiomChecker {
  std::mt19937_64 rng;
  CheckReport rep;

  void expect(bool ok, const std::string &what) {
    rep.checked++;
    if (!ok) {
      rep.violations++;
      rep.messages.push_back(what);
    }
  }

  void for_both_modes(const std::function<void(DenoteCtx &)> &f) {
    for (auto mode : {ProductMode::Cartesian, ProductMode::Powerset}) {
      DenoteCtx ctx;
      ctx.cfg.product_mode = mode;
      ctx.cfg.fix_fuel = 64;
      f(ctx);
    }
  }

  void beta_plus() {
    auto s0 = fuzz_rec_type(rng, 1);
    auto s1 = fuzz_rec_type(rng, 1);
    auto tau = fuzz_rec_type(rng, 1);
    int tag = static_cast<int>(rng() % 2);
    auto scrut_arg = fuzz_rec_expr(rng, {}, tag == 0 ? s0 : s1, 4);
    RecTypeCtx c0{{"x", s0}};
    RecTypeCtx c1{{"y", s1}};
    auto e0 = fuzz_rec_expr(rng, c0, tau, 5);
    auto e1 = fuzz_rec_expr(rng, c1, tau, 5);
    auto lhs = rec_subst(tag == 0 ? e0 : e1,
                         {{tag == 0 ? "x" : "y", scrut_arg}});
    auto rhs = rx::case_(rx::inj_at(tag, tag == 0 ? s1 : s0, scrut_arg), "x",
                         e0, "y", e1);
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_equal(denote(lhs, env, ctx), denote(rhs, env, ctx), ctx),
             "beta-plus not an equality: " + show_rec(rhs));
    });
  }

  void beta_times() {
    auto s0 = fuzz_rec_type(rng, 1);
    auto s1 = fuzz_rec_type(rng, 1);
    auto tau = fuzz_rec_type(rng, 1);
    auto a = fuzz_rec_expr(rng, {}, s0, 4);
    auto b = fuzz_rec_expr(rng, {}, s1, 4);
    RecTypeCtx c{{"x0", s0}, {"x1", s1}};
    auto body = fuzz_rec_expr(rng, c, tau, 5);
    auto lhs = rec_subst(body, {{"x0", a}, {"x1", b}});
    auto rhs = rx::letpair("x0", "x1", rx::pair(a, b), body);
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_equal(denote(lhs, env, ctx), denote(rhs, env, ctx), ctx),
             "beta-times not an equality: " + show_rec(rhs));
    });
  }

  void beta_to() {
    auto s = fuzz_rec_type(rng, 1);
    auto tau = fuzz_rec_type(rng, 1);
    auto arg = fuzz_rec_expr(rng, {}, s, 4);
    RecTypeCtx c{{"x", s}};
    auto body = fuzz_rec_expr(rng, c, tau, 5);
    auto lhs = rec_subst(body, {{"x", arg}});
    auto rhs = rx::app(rx::lam("x", s, body), arg);
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_equal(denote(lhs, env, ctx), denote(rhs, env, ctx), ctx),
             "beta-to not an equality: " + show_rec(rhs));
    });
  }

  void beta_fix() {
    RecTypePtr sigma;
    switch (rng() % 3) {
      case 0: sigma = rty::cost(); break;
      case 1: sigma = rty::cmplx(rty::unit()); break;
      default: sigma = rty::prod(rty::cost(), rty::cost()); break;
    }
    RecTypeCtx c{{"f", sigma}};
    auto body = fuzz_rec_expr(rng, c, sigma, 4);
    auto fixe = rx::fix("f", sigma, body);
    auto unrolled = rec_subst(body, {{"f", fixe}});
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(
          sem_equal(denote(unrolled, env, ctx), denote(fixe, env, ctx), ctx),
          "beta-fix not an equality: " + show_rec(fixe));
    });
  }

  void beta_fold() {
    auto elem = fuzz_rec_type(rng, 1);
    auto mu = rty::list(elem);
    const auto &r = std::get<RecType::Rec>(mu->node);
    auto unrolled_ty = rec_subst_type(r.body, mu, r.var);
    auto ev = fuzz_rec_expr(rng, {}, unrolled_ty, 5);
    auto rhs = rx::unfold(mu, rx::fold(mu, ev));
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_leq(denote(ev, env, ctx), denote(rhs, env, ctx), ctx),
             "beta-fold not below: " + show_rec(rhs));
    });
  }

  void zero_axiom() {
    auto e = fuzz_rec_expr(rng, {}, rty::cost(), 5);
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_leq(sem::fin(0), denote(e, env, ctx), ctx),
             "zero axiom failed: " + show_rec(e));
    });
  }

  // A monotone context wrapped around e <= e' instances.
  void monotonicity() {
    auto lhs = fuzz_rec_expr(rng, {}, rty::cost(), 4);
    auto rhs = rx::plus(lhs, fuzz_rec_expr(rng, {}, rty::cost(), 3));
    RecExprPtr cl = lhs, cr = rhs;
    switch (rng() % 4) {
      case 0: {
        auto extra = fuzz_rec_expr(rng, {}, rty::cost(), 3);
        cl = rx::plus(cl, extra);
        cr = rx::plus(cr, extra);
        break;
      }
      case 1: {
        auto v = fuzz_rec_expr(rng, {}, rty::unit(), 1);
        cl = rx::pair(cl, v);
        cr = rx::pair(cr, v);
        break;
      }
      case 2: {
        cl = rx::inj_at(0, rty::unit(), cl);
        cr = rx::inj_at(0, rty::unit(), cr);
        break;
      }
      default: {
        cl = rx::withcost(cl, rx::unitval());
        cr = rx::withcost(cr, rx::unitval());
        break;
      }
    }
    for_both_modes([&](DenoteCtx &ctx) {
      SemEnv env;
      expect(sem_leq(denote(cl, env, ctx), denote(cr, env, ctx), ctx),
             "monotonicity failed: " + show_rec(cr));
    });
  }
};

}  // namespace

CheckReport check_model_axioms(const AxiomOptions &opts) {
  AxiomChecker ck;
  ck.rng.seed(opts.seed);
  for (std::uint64_t i = 0; i < opts.trials; ++i) {
    ck.beta_plus();
    ck.beta_times();
    ck.beta_to();
    ck.beta_fix();
    ck.beta_fold();
    ck.zero_axiom();
    ck.monotonicity();
  }
  return ck.rep;
}

}  // namespace recurrify

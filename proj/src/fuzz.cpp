#include "recurrify/fuzz.hpp"

#include "recurrify/errors.hpp"

#include <vector>

namespace recurrify {

namespace {

std::uint64_t pick(std::mt19937_64 &rng, std::uint64_t n) {
  return rng() % n;
}

bool chance(std::mt19937_64 &rng, double p) {
  // Engine bits straight to [0, 1); distributions are not portable across
  // standard libraries and these streams are pinned in regression tests.
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u < p;
}

}  // namespace

SrcTypePtr fuzz_type(std::mt19937_64 &rng, int depth) {
  if (depth <= 0) {
    switch (pick(rng, 3)) {
      case 0: return ty::unit();
      case 1: return ty::integer();
      default: return ty::boolean();
    }
  }
  switch (pick(rng, 6)) {
    case 0: return ty::unit();
    case 1: return ty::integer();
    case 2: return ty::boolean();
    case 3: return ty::list(fuzz_type(rng, depth - 1));
    case 4:
      return ty::prod(fuzz_type(rng, depth - 1), fuzz_type(rng, depth - 1));
    default:
      return ty::sum(fuzz_type(rng, depth - 1), fuzz_type(rng, depth - 1));
  }
}

SrcExprPtr fuzz_value(std::mt19937_64 &rng, const SrcTypePtr &t, int depth,
                      std::int64_t max_int) {
  if (auto el = list_elem_type(t)) {
    std::size_t len = depth <= 0 ? 0 : pick(rng, 4);
    std::vector<SrcExprPtr> items;
    for (std::size_t i = 0; i < len; ++i)
      items.push_back(fuzz_value(rng, *el, depth - 1, max_int));
    return ex::list_lit(*el, items);
  }
  return std::visit(
      overloaded{
          [&](const SrcType::Unit &) { return ex::unitval(); },
          [&](const SrcType::Int &) {
            return ex::intlit(static_cast<std::int64_t>(pick(rng, max_int)));
          },
          [&](const SrcType::Sum &s) {
            int tag = depth <= 0 ? 0 : static_cast<int>(pick(rng, 2));
            auto mine = tag == 0 ? s.left : s.right;
            auto other = tag == 0 ? s.right : s.left;
            return ex::inj_at(tag, other,
                              fuzz_value(rng, mine, depth - 1, max_int));
          },
          [&](const SrcType::Prod &p) {
            return ex::pair(fuzz_value(rng, p.left, depth - 1, max_int),
                            fuzz_value(rng, p.right, depth - 1, max_int));
          },
          [&](const SrcType::Arrow &a) {
            // A constant function ignoring its argument.
            return ex::fun("f", "x", a.dom, a.cod,
                           fuzz_value(rng, a.cod, depth - 1, max_int));
          },
          [&](const SrcType::Rec &r) {
            // Non-list mu types: the one-constructor-deep value via the
            // leftmost bottoming strategy is awkward to generate; lists
            // cover the corpus, so fall back to nil-like shapes.
            (void)r;
            return ex::fold(t, fuzz_value(rng, subst_type(
                                              std::get<SrcType::Rec>(t->node).body,
                                              t, std::get<SrcType::Rec>(t->node).var),
                                          0, max_int));
          },
          [&](const SrcType::Var &) -> SrcExprPtr {
            throw TypeError("fuzz_value over an open type");
          },
      },
      t->node);
}

namespace {

std::vector<Name> vars_of_type(const TypeCtx &ctx, const SrcTypePtr &t) {
  std::vector<Name> out;
  for (const auto &[n, ty2] : ctx)
    if (type_equal(ty2, t)) out.push_back(n);
  return out;
}

// A recursive function over a list argument: structurally decreasing with
// probability 1 - diverge_prob, otherwise recursing on the whole argument.
SrcExprPtr fuzz_rec_fun(std::mt19937_64 &rng, const TypeCtx &ctx,
                        const SrcTypePtr &elem, const SrcTypePtr &ret,
                        int budget, double diverge_prob, std::int64_t max_int) {
  auto list_ty = ty::list(elem);
  TypeCtx inner = ctx;
  inner["f"] = ty::arrow(list_ty, ret);
  inner["xs"] = list_ty;
  TypeCtx cons_ctx = inner;
  cons_ctx["h"] = elem;
  cons_ctx["t"] = list_ty;
  auto base = fuzz_expr(rng, inner, ret, budget / 2, diverge_prob, max_int);
  SrcExprPtr rec_call;
  if (chance(rng, diverge_prob)) {
    rec_call = ex::app(ex::var("f"), ex::var("xs"));
  } else {
    rec_call = ex::app(ex::var("f"), ex::var("t"));
  }
  SrcExprPtr cons_branch = rec_call;
  if (chance(rng, 0.5)) cons_branch = ex::tick(cons_branch);
  auto body = ex::case_(ex::unfold(list_ty, ex::var("xs")), "_", base, "_z",
                        ex::letpair("h", "t", ex::var("_z"), cons_branch));
  return ex::fun("f", "xs", list_ty, ret, body);
}

}  // namespace

SrcExprPtr fuzz_expr(std::mt19937_64 &rng, const TypeCtx &ctx,
                     const SrcTypePtr &t, int budget, double diverge_prob,
                     std::int64_t max_int) {
  if (budget <= 0) return fuzz_value(rng, t, 1, max_int);
  // Sometimes just use a variable of the right type.
  auto candidates = vars_of_type(ctx, t);
  if (!candidates.empty() && chance(rng, 0.2))
    return ex::var(candidates[pick(rng, candidates.size())]);
  switch (pick(rng, 10)) {
    case 0:
      return fuzz_value(rng, t, 2, max_int);
    case 1:
      return ex::tick(fuzz_expr(rng, ctx, t, budget - 1, diverge_prob,
                                max_int));
    case 2: {  // if
      auto c = fuzz_expr(rng, ctx, ty::boolean(), budget / 3, diverge_prob,
                         max_int);
      auto a = fuzz_expr(rng, ctx, t, budget / 3, diverge_prob, max_int);
      auto b = fuzz_expr(rng, ctx, t, budget / 3, diverge_prob, max_int);
      return ex::case_(c, "_", a, "_", b);
    }
    case 3: {  // case over a fresh sum
      auto l = fuzz_type(rng, 1);
      auto r = fuzz_type(rng, 1);
      auto scr = fuzz_expr(rng, ctx, ty::sum(l, r), budget / 3, diverge_prob,
                           max_int);
      TypeCtx c0 = ctx;
      c0["cx"] = l;
      TypeCtx c1 = ctx;
      c1["cy"] = r;
      auto e0 = fuzz_expr(rng, c0, t, budget / 3, diverge_prob, max_int);
      auto e1 = fuzz_expr(rng, c1, t, budget / 3, diverge_prob, max_int);
      return ex::case_(scr, "cx", e0, "cy", e1);
    }
    case 4: {  // let-pair
      auto l = fuzz_type(rng, 1);
      auto r = fuzz_type(rng, 1);
      auto pr = fuzz_expr(rng, ctx, ty::prod(l, r), budget / 3, diverge_prob,
                          max_int);
      TypeCtx inner = ctx;
      inner["px"] = l;
      inner["py"] = r;
      auto body = fuzz_expr(rng, inner, t, budget / 2, diverge_prob, max_int);
      return ex::letpair("px", "py", pr, body);
    }
    case 5: {  // apply an inline non-recursive function
      auto dom = fuzz_type(rng, 1);
      TypeCtx inner = ctx;
      inner["g"] = ty::arrow(dom, t);
      inner["a"] = dom;
      auto body = fuzz_expr(rng, inner, t, budget / 2, diverge_prob, max_int);
      auto fn = ex::fun("g", "a", dom, t, body);
      auto arg = fuzz_expr(rng, ctx, dom, budget / 3, diverge_prob, max_int);
      return ex::app(fn, arg);
    }
    case 6: {  // apply a recursive function over a list
      auto elem = fuzz_type(rng, 1);
      auto fn = fuzz_rec_fun(rng, ctx, elem, t, budget / 2, diverge_prob,
                             max_int);
      auto arg = fuzz_expr(rng, ctx, ty::list(elem), budget / 3, diverge_prob,
                           max_int);
      return ex::app(fn, arg);
    }
    case 7: {  // leq when an int is wanted somewhere: compare then branch
      if (is_bool_type(t)) {
        auto a = fuzz_expr(rng, ctx, ty::integer(), budget / 3, diverge_prob,
                           max_int);
        auto b = fuzz_expr(rng, ctx, ty::integer(), budget / 3, diverge_prob,
                           max_int);
        return ex::leq(a, b);
      }
      return fuzz_value(rng, t, 2, max_int);
    }
    case 8: {  // caselist over a generated list
      auto elem = fuzz_type(rng, 1);
      auto lt = ty::list(elem);
      auto scr = fuzz_expr(rng, ctx, lt, budget / 3, diverge_prob, max_int);
      auto nil_branch =
          fuzz_expr(rng, ctx, t, budget / 3, diverge_prob, max_int);
      TypeCtx inner = ctx;
      inner["h"] = elem;
      inner["t"] = lt;
      auto cons_branch =
          fuzz_expr(rng, inner, t, budget / 3, diverge_prob, max_int);
      return ex::case_(ex::unfold(lt, scr), "_", nil_branch, "_z",
                       ex::letpair("h", "t", ex::var("_z"), cons_branch));
    }
    default:
      return fuzz_value(rng, t, 2, max_int);
  }
}

SrcExprPtr fuzz_program(const FuzzOptions &opts) {
  std::mt19937_64 rng(opts.seed);
  auto goal = fuzz_type(rng, 2);
  return fuzz_expr(rng, {}, goal, opts.size_budget, opts.diverge_prob,
                   opts.max_int);
}

// ---------------------------------------------------------------------------
// Recurrence-language generators
// ---------------------------------------------------------------------------

RecTypePtr fuzz_rec_type(std::mt19937_64 &rng, int depth) {
  if (depth <= 0) {
    switch (pick(rng, 3)) {
      case 0: return rty::unit();
      case 1: return rty::cost();
      default: return rty::boolean();
    }
  }
  switch (pick(rng, 6)) {
    case 0: return rty::unit();
    case 1: return rty::cost();
    case 2: return rty::boolean();
    case 3: return rty::list(fuzz_rec_type(rng, depth - 1));
    case 4:
      return rty::prod(fuzz_rec_type(rng, depth - 1),
                       fuzz_rec_type(rng, depth - 1));
    default:
      return rty::sum(fuzz_rec_type(rng, depth - 1),
                      fuzz_rec_type(rng, depth - 1));
  }
}

RecExprPtr fuzz_rec_expr(std::mt19937_64 &rng, const RecTypeCtx &ctx,
                         const RecTypePtr &t, int budget) {
  // Variables of the right type.
  if (budget > 0 && chance(rng, 0.25)) {
    std::vector<Name> vars;
    for (const auto &[n, ty2] : ctx)
      if (rec_type_equal(ty2, t)) vars.push_back(n);
    if (!vars.empty()) return rx::var(vars[pick(rng, vars.size())]);
  }
  if (auto el = rec_list_elem_type(t)) {
    std::size_t len = budget <= 0 ? 0 : pick(rng, 3);
    RecExprPtr acc = rx::nil(*el);
    for (std::size_t i = 0; i < len; ++i)
      acc = rx::cons(*el, fuzz_rec_expr(rng, ctx, *el, budget - 2), acc);
    return acc;
  }
  return std::visit(
      overloaded{
          [&](const RecType::CostC &) -> RecExprPtr {
            if (budget > 0 && chance(rng, 0.4))
              return rx::plus(fuzz_rec_expr(rng, ctx, t, budget / 2),
                              fuzz_rec_expr(rng, ctx, t, budget / 2));
            return chance(rng, 0.5) ? rx::zero() : rx::one();
          },
          [&](const RecType::Unit &) -> RecExprPtr { return rx::unitval(); },
          [&](const RecType::Int &) -> RecExprPtr {
            return rx::intlit(static_cast<std::int64_t>(pick(rng, 64)));
          },
          [&](const RecType::Sum &s) -> RecExprPtr {
            int tag = static_cast<int>(pick(rng, 2));
            auto mine = tag == 0 ? s.left : s.right;
            auto other = tag == 0 ? s.right : s.left;
            return rx::inj_at(tag, other,
                              fuzz_rec_expr(rng, ctx, mine, budget - 1));
          },
          [&](const RecType::Prod &p) -> RecExprPtr {
            return rx::pair(fuzz_rec_expr(rng, ctx, p.left, budget / 2),
                            fuzz_rec_expr(rng, ctx, p.right, budget / 2));
          },
          [&](const RecType::Arrow &a) -> RecExprPtr {
            RecTypeCtx inner = ctx;
            inner["rx"] = a.dom;
            return rx::lam("rx", a.dom,
                           fuzz_rec_expr(rng, inner, a.cod, budget - 1));
          },
          [&](const RecType::Cmplx &c) -> RecExprPtr {
            auto pot = fuzz_rec_expr(rng, ctx, c.inner, budget - 1);
            if (chance(rng, 0.3)) return rx::incr(rx::val(pot));
            if (chance(rng, 0.3))
              return rx::withcost(fuzz_rec_expr(rng, ctx, rty::cost(), 2), pot);
            return rx::val(pot);
          },
          [&](const RecType::Rec &) -> RecExprPtr {
            // Non-list mu types are not generated by fuzz_rec_type.
            return rx::nil(rty::unit());
          },
          [&](const RecType::Var &) -> RecExprPtr {
            throw TypeError("fuzz_rec_expr over an open type");
          },
      },
      t->node);
}

}  // namespace recurrify

#include "recurrify/rec_typecheck.hpp"

#include "recurrify/errors.hpp"

namespace recurrify {

namespace {

RecTypePtr synth(const RecTypeCtx &ctx, const RecExprPtr &e);
void check(const RecTypeCtx &ctx, const RecExprPtr &e, const RecTypePtr &want);

[[noreturn]] void bad(const RecExprPtr &at, const std::string &msg) {
  throw TypeError(msg + " in `" + show_rec(at) + "`");
}

RecTypePtr expect_cmplx(const RecTypeCtx &ctx, const RecExprPtr &e) {
  auto t = synth(ctx, e);
  const auto *c = std::get_if<RecType::Cmplx>(&t->node);
  if (!c) bad(e, "expected a complexity type, found " + show_rec_type(t));
  return c->inner;
}

RecTypePtr synth(const RecTypeCtx &ctx, const RecExprPtr &e) {
  return std::visit(
      overloaded{
          [&](const RecExpr::Var &v) -> RecTypePtr {
            auto it = ctx.find(v.name);
            if (it == ctx.end()) bad(e, "unbound variable " + v.name);
            return it->second;
          },
          [&](const RecExpr::Zero &) -> RecTypePtr { return rty::cost(); },
          [&](const RecExpr::One &) -> RecTypePtr { return rty::cost(); },
          [&](const RecExpr::Plus &p) -> RecTypePtr {
            check(ctx, p.lhs, rty::cost());
            check(ctx, p.rhs, rty::cost());
            return rty::cost();
          },
          [&](const RecExpr::UnitVal &) -> RecTypePtr { return rty::unit(); },
          [&](const RecExpr::IntLit &) -> RecTypePtr { return rty::integer(); },
          [&](const RecExpr::Inj &i) -> RecTypePtr {
            if (!i.other) bad(e, "sum type of injection not determined");
            auto a = synth(ctx, i.arg);
            return i.tag == 0 ? rty::sum(a, i.other) : rty::sum(i.other, a);
          },
          [&](const RecExpr::Case &c) -> RecTypePtr {
            auto st = synth(ctx, c.scrutinee);
            const auto *sum = std::get_if<RecType::Sum>(&st->node);
            if (!sum) bad(e, "case scrutinee is not a sum");
            RecTypeCtx c0 = ctx;
            c0[c.bind0] = sum->left;
            RecTypeCtx c1 = ctx;
            c1[c.bind1] = sum->right;
            try {
              auto t0 = synth(c0, c.branch0);
              check(c1, c.branch1, t0);
              return t0;
            } catch (const TypeError &) {
              auto t1 = synth(c1, c.branch1);
              check(c0, c.branch0, t1);
              return t1;
            }
          },
          [&](const RecExpr::Pair &p) -> RecTypePtr {
            return rty::prod(synth(ctx, p.fst), synth(ctx, p.snd));
          },
          [&](const RecExpr::LetPair &l) -> RecTypePtr {
            auto pt = synth(ctx, l.pair);
            const auto *pr = std::get_if<RecType::Prod>(&pt->node);
            if (!pr) bad(e, "let-pair scrutinee is not a product");
            RecTypeCtx inner = ctx;
            inner[l.x0] = pr->left;
            inner[l.x1] = pr->right;
            return synth(inner, l.body);
          },
          [&](const RecExpr::Lam &l) -> RecTypePtr {
            if (!l.param_type) bad(e, "lambda parameter type missing");
            RecTypeCtx inner = ctx;
            inner[l.param] = l.param_type;
            return rty::arrow(l.param_type, synth(inner, l.body));
          },
          [&](const RecExpr::App &a) -> RecTypePtr {
            auto ft = synth(ctx, a.fn);
            const auto *ar = std::get_if<RecType::Arrow>(&ft->node);
            if (!ar) bad(e, "applied expression is not a function");
            check(ctx, a.arg, ar->dom);
            return ar->cod;
          },
          [&](const RecExpr::Fix &f) -> RecTypePtr {
            if (!f.type) bad(e, "fix annotation missing");
            RecTypeCtx inner = ctx;
            inner[f.name] = f.type;
            check(inner, f.body, f.type);
            return f.type;
          },
          [&](const RecExpr::Fold &f) -> RecTypePtr {
            const auto *r = std::get_if<RecType::Rec>(&f.rec_type->node);
            if (!r) bad(e, "fold annotation is not a mu type");
            check(ctx, f.arg, rec_subst_type(r->body, f.rec_type, r->var));
            return f.rec_type;
          },
          [&](const RecExpr::Unfold &u) -> RecTypePtr {
            const auto *r = std::get_if<RecType::Rec>(&u.rec_type->node);
            if (!r) bad(e, "unfold annotation is not a mu type");
            check(ctx, u.arg, u.rec_type);
            return rec_subst_type(r->body, u.rec_type, r->var);
          },
          [&](const RecExpr::Val &v) -> RecTypePtr {
            return rty::cmplx(synth(ctx, v.arg));
          },
          [&](const RecExpr::Bind &b) -> RecTypePtr {
            if (b.names.size() != b.sources.size())
              bad(e, "bind arity mismatch");
            RecTypeCtx inner = ctx;
            for (std::size_t i = 0; i < b.names.size(); ++i)
              inner[b.names[i]] = expect_cmplx(ctx, b.sources[i]);
            auto bt = synth(inner, b.body);
            if (!std::holds_alternative<RecType::Cmplx>(bt->node))
              bad(e, "bind body must have a complexity type");
            return bt;
          },
          [&](const RecExpr::Incr &i) -> RecTypePtr {
            return rty::cmplx(expect_cmplx(ctx, i.arg));
          },
          [&](const RecExpr::CostProj &c) -> RecTypePtr {
            expect_cmplx(ctx, c.arg);
            return rty::cost();
          },
          [&](const RecExpr::PotProj &p) -> RecTypePtr {
            return expect_cmplx(ctx, p.arg);
          },
          [&](const RecExpr::WithCost &w) -> RecTypePtr {
            check(ctx, w.cost, rty::cost());
            return rty::cmplx(synth(ctx, w.pot));
          },
          [&](const RecExpr::PlusC &p) -> RecTypePtr {
            check(ctx, p.cost, rty::cost());
            return rty::cmplx(expect_cmplx(ctx, p.cmplx));
          },
          [&](const RecExpr::Leq &l) -> RecTypePtr {
            check(ctx, l.lhs, rty::integer());
            check(ctx, l.rhs, rty::integer());
            return rty::boolean();
          },
      },
      e->node);
}

void check(const RecTypeCtx &ctx, const RecExprPtr &e, const RecTypePtr &want) {
  if (const auto *i = std::get_if<RecExpr::Inj>(&e->node)) {
    const auto *sum = std::get_if<RecType::Sum>(&want->node);
    if (!sum) bad(e, "injection checked against non-sum");
    auto other = i->tag == 0 ? sum->right : sum->left;
    if (i->other && !rec_type_equal(i->other, other))
      bad(e, "injection annotation disagrees with expected type");
    check(ctx, i->arg, i->tag == 0 ? sum->left : sum->right);
    return;
  }
  if (const auto *p = std::get_if<RecExpr::Pair>(&e->node)) {
    const auto *pr = std::get_if<RecType::Prod>(&want->node);
    if (!pr) bad(e, "pair checked against non-product");
    check(ctx, p->fst, pr->left);
    check(ctx, p->snd, pr->right);
    return;
  }
  if (const auto *c = std::get_if<RecExpr::Case>(&e->node)) {
    auto st = synth(ctx, c->scrutinee);
    const auto *sum = std::get_if<RecType::Sum>(&st->node);
    if (!sum) bad(e, "case scrutinee is not a sum");
    RecTypeCtx c0 = ctx;
    c0[c->bind0] = sum->left;
    check(c0, c->branch0, want);
    RecTypeCtx c1 = ctx;
    c1[c->bind1] = sum->right;
    check(c1, c->branch1, want);
    return;
  }
  if (const auto *l = std::get_if<RecExpr::LetPair>(&e->node)) {
    auto pt = synth(ctx, l->pair);
    const auto *pr = std::get_if<RecType::Prod>(&pt->node);
    if (!pr) bad(e, "let-pair scrutinee is not a product");
    RecTypeCtx inner = ctx;
    inner[l->x0] = pr->left;
    inner[l->x1] = pr->right;
    check(inner, l->body, want);
    return;
  }
  if (const auto *v = std::get_if<RecExpr::Val>(&e->node)) {
    const auto *cm = std::get_if<RecType::Cmplx>(&want->node);
    if (!cm) bad(e, "val checked against non-complexity");
    check(ctx, v->arg, cm->inner);
    return;
  }
  if (const auto *f = std::get_if<RecExpr::Fold>(&e->node)) {
    if (!rec_type_equal(f->rec_type, want))
      bad(e, "fold expected " + show_rec_type(want));
    const auto *r = std::get_if<RecType::Rec>(&f->rec_type->node);
    if (!r) bad(e, "fold annotation is not a mu type");
    check(ctx, f->arg, rec_subst_type(r->body, f->rec_type, r->var));
    return;
  }
  auto got = synth(ctx, e);
  if (!rec_type_equal(got, want))
    bad(e, "expected " + show_rec_type(want) + " but found " +
               show_rec_type(got));
}

}  // namespace

RecTypePtr typecheck_rec(const RecTypeCtx &ctx, const RecExprPtr &e) {
  return synth(ctx, e);
}

void typecheck_rec_against(const RecTypeCtx &ctx, const RecExprPtr &e,
                           const RecTypePtr &expected) {
  check(ctx, e, expected);
}

}  // namespace recurrify

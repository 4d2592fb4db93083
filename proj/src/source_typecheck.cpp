#include "recurrify/source_typecheck.hpp"

#include "recurrify/errors.hpp"

namespace recurrify {

namespace {

SrcTypePtr synth(const TypeCtx &ctx, const SrcExprPtr &e);
void check(const TypeCtx &ctx, const SrcExprPtr &e, const SrcTypePtr &want);

[[noreturn]] void mismatch(const char *rule, const SrcExprPtr &at,
                           const std::string &msg) {
  throw TypeError(std::string(rule) + ": " + msg + " in `" + show_expr(at) +
                  "`");
}

SrcTypePtr synth(const TypeCtx &ctx, const SrcExprPtr &e) {
  return std::visit(
      overloaded{
          [&](const SrcExpr::Var &v) -> SrcTypePtr {
            auto it = ctx.find(v.name);
            if (it == ctx.end()) mismatch("var", e, "unbound variable " + v.name);
            return it->second;
          },
          [&](const SrcExpr::UnitVal &) -> SrcTypePtr { return ty::unit(); },
          [&](const SrcExpr::IntLit &) -> SrcTypePtr { return ty::integer(); },
          [&](const SrcExpr::Inj &i) -> SrcTypePtr {
            if (!i.other)
              mismatch("inj", e, "sum type not determined by context");
            auto a = synth(ctx, i.arg);
            return i.tag == 0 ? ty::sum(a, i.other) : ty::sum(i.other, a);
          },
          [&](const SrcExpr::Case &c) -> SrcTypePtr {
            auto st = synth(ctx, c.scrutinee);
            const auto *sum = std::get_if<SrcType::Sum>(&st->node);
            if (!sum) mismatch("case", e, "scrutinee is not a sum");
            TypeCtx c0 = ctx;
            c0[c.bind0] = sum->left;
            TypeCtx c1 = ctx;
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
          [&](const SrcExpr::Pair &p) -> SrcTypePtr {
            return ty::prod(synth(ctx, p.fst), synth(ctx, p.snd));
          },
          [&](const SrcExpr::LetPair &l) -> SrcTypePtr {
            auto pt = synth(ctx, l.pair);
            const auto *pr = std::get_if<SrcType::Prod>(&pt->node);
            if (!pr) mismatch("let-pair", e, "bound expression is not a pair");
            TypeCtx inner = ctx;
            inner[l.x0] = pr->left;
            inner[l.x1] = pr->right;
            return synth(inner, l.body);
          },
          [&](const SrcExpr::Fun &f) -> SrcTypePtr {
            if (!type_closed(f.param_type) || !type_closed(f.ret_type))
              mismatch("fun", e, "free type variable in annotation");
            TypeCtx inner = ctx;
            inner[f.self] = ty::arrow(f.param_type, f.ret_type);
            inner[f.param] = f.param_type;
            check(inner, f.body, f.ret_type);
            return ty::arrow(f.param_type, f.ret_type);
          },
          [&](const SrcExpr::App &a) -> SrcTypePtr {
            auto ft = synth(ctx, a.fn);
            const auto *ar = std::get_if<SrcType::Arrow>(&ft->node);
            if (!ar) mismatch("app", e, "applied expression is not a function");
            check(ctx, a.arg, ar->dom);
            return ar->cod;
          },
          [&](const SrcExpr::Fold &f) -> SrcTypePtr {
            const auto *r = std::get_if<SrcType::Rec>(&f.rec_type->node);
            if (!r) mismatch("fold", e, "annotation is not a mu type");
            check(ctx, f.arg, subst_type(r->body, f.rec_type, r->var));
            return f.rec_type;
          },
          [&](const SrcExpr::Unfold &u) -> SrcTypePtr {
            const auto *r = std::get_if<SrcType::Rec>(&u.rec_type->node);
            if (!r) mismatch("unfold", e, "annotation is not a mu type");
            check(ctx, u.arg, u.rec_type);
            return subst_type(r->body, u.rec_type, r->var);
          },
          [&](const SrcExpr::Tick &t) -> SrcTypePtr { return synth(ctx, t.arg); },
          [&](const SrcExpr::Leq &l) -> SrcTypePtr {
            check(ctx, l.lhs, ty::integer());
            check(ctx, l.rhs, ty::integer());
            return ty::boolean();
          },
      },
      e->node);
}

void check(const TypeCtx &ctx, const SrcExprPtr &e, const SrcTypePtr &want) {
  if (const auto *i = std::get_if<SrcExpr::Inj>(&e->node)) {
    const auto *sum = std::get_if<SrcType::Sum>(&want->node);
    if (!sum) mismatch("inj", e, "checked against non-sum " + show_type(want));
    auto other = i->tag == 0 ? sum->right : sum->left;
    if (i->other && !type_equal(i->other, other))
      mismatch("inj", e, "annotation disagrees with expected type");
    check(ctx, i->arg, i->tag == 0 ? sum->left : sum->right);
    return;
  }
  if (const auto *p = std::get_if<SrcExpr::Pair>(&e->node)) {
    const auto *pr = std::get_if<SrcType::Prod>(&want->node);
    if (!pr) mismatch("pair", e, "checked against non-product");
    check(ctx, p->fst, pr->left);
    check(ctx, p->snd, pr->right);
    return;
  }
  if (const auto *c = std::get_if<SrcExpr::Case>(&e->node)) {
    auto st = synth(ctx, c->scrutinee);
    const auto *sum = std::get_if<SrcType::Sum>(&st->node);
    if (!sum) mismatch("case", e, "scrutinee is not a sum");
    TypeCtx c0 = ctx;
    c0[c->bind0] = sum->left;
    check(c0, c->branch0, want);
    TypeCtx c1 = ctx;
    c1[c->bind1] = sum->right;
    check(c1, c->branch1, want);
    return;
  }
  if (const auto *l = std::get_if<SrcExpr::LetPair>(&e->node)) {
    auto pt = synth(ctx, l->pair);
    const auto *pr = std::get_if<SrcType::Prod>(&pt->node);
    if (!pr) mismatch("let-pair", e, "bound expression is not a pair");
    TypeCtx inner = ctx;
    inner[l->x0] = pr->left;
    inner[l->x1] = pr->right;
    check(inner, l->body, want);
    return;
  }
  if (const auto *t = std::get_if<SrcExpr::Tick>(&e->node)) {
    check(ctx, t->arg, want);
    return;
  }
  if (const auto *f = std::get_if<SrcExpr::Fold>(&e->node)) {
    if (!type_equal(f->rec_type, want))
      mismatch("fold", e, "expected " + show_type(want));
    const auto *r = std::get_if<SrcType::Rec>(&f->rec_type->node);
    if (!r) mismatch("fold", e, "annotation is not a mu type");
    check(ctx, f->arg, subst_type(r->body, f->rec_type, r->var));
    return;
  }
  auto got = synth(ctx, e);
  if (!type_equal(got, want))
    mismatch("check", e,
             "expected " + show_type(want) + " but found " + show_type(got));
}

}  // namespace

SrcTypePtr typecheck(const TypeCtx &ctx, const SrcExprPtr &e) {
  return synth(ctx, e);
}

void typecheck_against(const TypeCtx &ctx, const SrcExprPtr &e,
                       const SrcTypePtr &expected) {
  check(ctx, e, expected);
}

}  // namespace recurrify

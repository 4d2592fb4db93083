#include "recurrify/extract.hpp"

#include "recurrify/errors.hpp"

namespace recurrify {

RecTypePtr extract_type_potential(const SrcTypePtr &t) {
  return std::visit(
      overloaded{
          [&](const SrcType::Var &v) { return rty::var(v.name); },
          [&](const SrcType::Unit &) { return rty::unit(); },
          [&](const SrcType::Int &) { return rty::integer(); },
          [&](const SrcType::Sum &s) {
            return rty::sum(extract_type_potential(s.left),
                            extract_type_potential(s.right));
          },
          [&](const SrcType::Prod &p) {
            return rty::prod(extract_type_potential(p.left),
                             extract_type_potential(p.right));
          },
          [&](const SrcType::Arrow &a) {
            return rty::arrow(extract_type_potential(a.dom),
                              rty::cmplx(extract_type_potential(a.cod)));
          },
          [&](const SrcType::Rec &r) {
            return rty::rec(r.var, extract_type_potential(r.body));
          },
      },
      t->node);
}

RecTypePtr extract_type(const SrcTypePtr &t) {
  return rty::cmplx(extract_type_potential(t));
}

namespace {

struct Extractor {
  std::uint64_t counter = 0;

  Name fresh(const std::set<Name> &avoid) {
    for (;;) {
      Name n = "p" + std::to_string(counter++);
      if (!avoid.count(n)) return n;
    }
  }

  RecExprPtr expr(const TypeCtx &ctx, const SrcExprPtr &e) {
    return std::visit(
        overloaded{
            [&](const SrcExpr::Var &v) { return rx::val(rx::var(v.name)); },
            [&](const SrcExpr::UnitVal &) { return rx::val(rx::unitval()); },
            [&](const SrcExpr::IntLit &i) {
              return rx::val(rx::intlit(i.value));
            },
            [&](const SrcExpr::Inj &i) {
              auto src = expr(ctx, i.arg);
              Name p = fresh(free_vars(i.arg));
              RecTypePtr other =
                  i.other ? extract_type_potential(i.other) : nullptr;
              return rx::bind({p}, {src},
                              rx::val(rx::inj_at(i.tag, other, rx::var(p))));
            },
            [&](const SrcExpr::Case &c) {
              auto scr = expr(ctx, c.scrutinee);
              auto scr_ty = typecheck(ctx, c.scrutinee);
              const auto *sum = std::get_if<SrcType::Sum>(&scr_ty->node);
              if (!sum) throw TypeError("case scrutinee is not a sum");
              TypeCtx c0 = ctx;
              c0[c.bind0] = sum->left;
              TypeCtx c1 = ctx;
              c1[c.bind1] = sum->right;
              auto b0 = expr(c0, c.branch0);
              auto b1 = expr(c1, c.branch1);
              auto avoid = free_vars(c.branch0);
              auto fv1 = free_vars(c.branch1);
              avoid.insert(fv1.begin(), fv1.end());
              avoid.insert(c.bind0);
              avoid.insert(c.bind1);
              Name p = fresh(avoid);
              return rx::bind(
                  {p}, {scr},
                  rx::case_(rx::var(p), c.bind0, b0, c.bind1, b1));
            },
            [&](const SrcExpr::Pair &pr) {
              auto e0 = expr(ctx, pr.fst);
              auto e1 = expr(ctx, pr.snd);
              std::set<Name> avoid;
              Name p0 = fresh(avoid);
              avoid.insert(p0);
              Name p1 = fresh(avoid);
              return rx::bind({p0, p1}, {e0, e1},
                              rx::val(rx::pair(rx::var(p0), rx::var(p1))));
            },
            [&](const SrcExpr::LetPair &l) {
              auto src = expr(ctx, l.pair);
              auto pr_ty = typecheck(ctx, l.pair);
              const auto *pr = std::get_if<SrcType::Prod>(&pr_ty->node);
              if (!pr) throw TypeError("let-pair scrutinee is not a product");
              TypeCtx inner = ctx;
              inner[l.x0] = pr->left;
              inner[l.x1] = pr->right;
              auto body = expr(inner, l.body);
              auto avoid = free_vars(l.body);
              avoid.insert(l.x0);
              avoid.insert(l.x1);
              Name p = fresh(avoid);
              return rx::bind(
                  {p}, {src},
                  rx::letpair(l.x0, l.x1, rx::var(p), body));
            },
            [&](const SrcExpr::Fun &f) {
              TypeCtx inner = ctx;
              inner[f.self] = ty::arrow(f.param_type, f.ret_type);
              inner[f.param] = f.param_type;
              auto body = expr(inner, f.body);
              auto fix_ty = extract_type_potential(
                  ty::arrow(f.param_type, f.ret_type));
              auto lam = rx::lam(f.param, extract_type_potential(f.param_type),
                                 body);
              return rx::val(rx::fix(f.self, fix_ty, lam));
            },
            [&](const SrcExpr::App &a) {
              auto e0 = expr(ctx, a.fn);
              auto e1 = expr(ctx, a.arg);
              std::set<Name> avoid;
              Name p0 = fresh(avoid);
              avoid.insert(p0);
              Name p1 = fresh(avoid);
              return rx::bind({p0, p1}, {e0, e1},
                              rx::app(rx::var(p0), rx::var(p1)));
            },
            [&](const SrcExpr::Fold &f) {
              auto src = expr(ctx, f.arg);
              Name p = fresh({});
              return rx::bind(
                  {p}, {src},
                  rx::val(rx::fold(extract_type_potential(f.rec_type),
                                   rx::var(p))));
            },
            [&](const SrcExpr::Unfold &u) {
              auto src = expr(ctx, u.arg);
              Name p = fresh({});
              return rx::bind(
                  {p}, {src},
                  rx::val(rx::unfold(extract_type_potential(u.rec_type),
                                     rx::var(p))));
            },
            [&](const SrcExpr::Tick &t) { return rx::incr(expr(ctx, t.arg)); },
            [&](const SrcExpr::Leq &l) {
              auto e0 = expr(ctx, l.lhs);
              auto e1 = expr(ctx, l.rhs);
              std::set<Name> avoid;
              Name p0 = fresh(avoid);
              avoid.insert(p0);
              Name p1 = fresh(avoid);
              return rx::bind({p0, p1}, {e0, e1},
                              rx::val(rx::leq(rx::var(p0), rx::var(p1))));
            },
        },
        e->node);
  }
};

RecExprPtr value_potential(const TypeCtx &ctx, const SrcExprPtr &v) {
  return std::visit(
      overloaded{
          [&](const SrcExpr::UnitVal &) -> RecExprPtr { return rx::unitval(); },
          [&](const SrcExpr::IntLit &i) -> RecExprPtr {
            return rx::intlit(i.value);
          },
          [&](const SrcExpr::Inj &i) -> RecExprPtr {
            RecTypePtr other =
                i.other ? extract_type_potential(i.other) : nullptr;
            return rx::inj_at(i.tag, other, value_potential(ctx, i.arg));
          },
          [&](const SrcExpr::Pair &p) -> RecExprPtr {
            return rx::pair(value_potential(ctx, p.fst),
                            value_potential(ctx, p.snd));
          },
          [&](const SrcExpr::Fun &f) -> RecExprPtr {
            TypeCtx inner = ctx;
            inner[f.self] = ty::arrow(f.param_type, f.ret_type);
            inner[f.param] = f.param_type;
            Extractor ex;
            auto body = ex.expr(inner, f.body);
            return rx::fix(
                f.self,
                extract_type_potential(ty::arrow(f.param_type, f.ret_type)),
                rx::lam(f.param, extract_type_potential(f.param_type), body));
          },
          [&](const SrcExpr::Fold &f) -> RecExprPtr {
            return rx::fold(extract_type_potential(f.rec_type),
                            value_potential(ctx, f.arg));
          },
          [&](const auto &) -> RecExprPtr {
            throw TypeError("potential translation applied to a non-value: " +
                            show_expr(v));
          },
      },
      v->node);
}

}  // namespace

RecExprPtr extract_expr(const TypeCtx &ctx, const SrcExprPtr &e) {
  Extractor ex;
  return ex.expr(ctx, e);
}

RecExprPtr extract_expr(const SrcExprPtr &e) { return extract_expr({}, e); }

RecExprPtr extract_value(const SrcExprPtr &v, const TypeCtx &ctx) {
  if (!is_value(v)) throw TypeError("extract_value: not a value");
  return value_potential(ctx, v);
}

}  // namespace recurrify

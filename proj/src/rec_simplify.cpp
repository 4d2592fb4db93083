#include "recurrify/rec_simplify.hpp"

namespace recurrify {

const char *size_rule_name(SizeRule r) {
  switch (r) {
    case SizeRule::BindVal: return "bind-val";
    case SizeRule::ValCost: return "val-cost";
    case SizeRule::ValPot: return "val-pot";
    case SizeRule::BindCost: return "bind-cost";
    case SizeRule::BindPot: return "bind-pot";
    case SizeRule::IncrCost: return "incr-cost";
    case SizeRule::IncrPot: return "incr-pot";
    case SizeRule::IdL: return "idl";
    case SizeRule::IdR: return "idr";
    case SizeRule::Assoc: return "assoc";
  }
  return "?";
}

namespace {

thread_local std::vector<SizeRule> *g_fired = nullptr;

void fire(SizeRule r) {
  if (g_fired) g_fired->push_back(r);
}

bool is_zero(const RecExprPtr &e) {
  return std::holds_alternative<RecExpr::Zero>(e->node);
}

}  // namespace

RecExprPtr mk_sum(const RecExprPtr &a, const RecExprPtr &b) {
  if (is_zero(a)) {
    fire(SizeRule::IdL);
    return b;
  }
  if (is_zero(b)) {
    fire(SizeRule::IdR);
    return a;
  }
  return rx::plus(a, b);
}

RecExprPtr cost_of(const RecExprPtr &e) {
  if (std::holds_alternative<RecExpr::Val>(e->node)) {
    fire(SizeRule::ValCost);
    return rx::zero();
  }
  if (const auto *w = std::get_if<RecExpr::WithCost>(&e->node)) return w->cost;
  if (const auto *p = std::get_if<RecExpr::PlusC>(&e->node))
    return mk_sum(p->cost, cost_of(p->cmplx));
  return rx::costp(e);
}

RecExprPtr pot_of(const RecExprPtr &e) {
  if (const auto *v = std::get_if<RecExpr::Val>(&e->node)) {
    fire(SizeRule::ValPot);
    return v->arg;
  }
  if (const auto *w = std::get_if<RecExpr::WithCost>(&e->node)) return w->pot;
  if (const auto *p = std::get_if<RecExpr::PlusC>(&e->node))
    return pot_of(p->cmplx);
  return rx::potp(e);
}

RecExprPtr mk_plusc(const RecExprPtr &cost, const RecExprPtr &cmplx) {
  if (is_zero(cost)) {
    fire(SizeRule::IdL);
    return cmplx;
  }
  if (const auto *v = std::get_if<RecExpr::Val>(&cmplx->node))
    return rx::withcost(cost, v->arg);
  if (const auto *w = std::get_if<RecExpr::WithCost>(&cmplx->node)) {
    fire(SizeRule::Assoc);
    return rx::withcost(mk_sum(cost, w->cost), w->pot);
  }
  if (const auto *p = std::get_if<RecExpr::PlusC>(&cmplx->node)) {
    fire(SizeRule::Assoc);
    return rx::plusc(mk_sum(cost, p->cost), p->cmplx);
  }
  return rx::plusc(cost, cmplx);
}

namespace {

RecExprPtr simplify_in(const RecExprPtr &e);

}  // namespace

RecExprPtr simplify(const RecExprPtr &e) { return simplify_in(e); }

RecExprPtr simplify(const RecExprPtr &e, std::vector<SizeRule> *fired) {
  g_fired = fired;
  auto out = simplify_in(e);
  g_fired = nullptr;
  return out;
}

namespace {

RecExprPtr simplify_in(const RecExprPtr &e) {
  return std::visit(
      overloaded{
          [&](const RecExpr::Plus &p) {
            return mk_sum(simplify_in(p.lhs), simplify_in(p.rhs));
          },
          [&](const RecExpr::Inj &i) {
            return rx::inj_at(i.tag, i.other, simplify_in(i.arg));
          },
          [&](const RecExpr::Case &c) {
            return rx::case_(simplify_in(c.scrutinee), c.bind0,
                             simplify_in(c.branch0), c.bind1, simplify_in(c.branch1));
          },
          [&](const RecExpr::Pair &p) {
            return rx::pair(simplify_in(p.fst), simplify_in(p.snd));
          },
          [&](const RecExpr::LetPair &l) {
            return rx::letpair(l.x0, l.x1, simplify_in(l.pair), simplify_in(l.body));
          },
          [&](const RecExpr::Lam &l) {
            return rx::lam(l.param, l.param_type, simplify_in(l.body));
          },
          [&](const RecExpr::App &a) {
            return rx::app(simplify_in(a.fn), simplify_in(a.arg));
          },
          [&](const RecExpr::Fix &f) {
            return rx::fix(f.name, f.type, simplify_in(f.body));
          },
          [&](const RecExpr::Fold &f) {
            return rx::fold(f.rec_type, simplify_in(f.arg));
          },
          [&](const RecExpr::Unfold &u) {
            return rx::unfold(u.rec_type, simplify_in(u.arg));
          },
          [&](const RecExpr::Val &v) { return rx::val(simplify_in(v.arg)); },
          [&](const RecExpr::Bind &b) {
            // bind p <- E; body  =  E_c +c body[E_p / p]   (n-ary)
            RecExprPtr total_cost = rx::zero();
            std::map<Name, RecExprPtr> pots;
            bool all_val = true;
            for (std::size_t i = 0; i < b.names.size(); ++i) {
              auto src = simplify_in(b.sources[i]);
              all_val =
                  all_val && std::holds_alternative<RecExpr::Val>(src->node);
              total_cost = mk_sum(total_cost, cost_of(src));
              pots[b.names[i]] = pot_of(src);
            }
            fire(all_val ? SizeRule::BindVal : SizeRule::BindCost);
            if (!all_val) fire(SizeRule::BindPot);
            auto body = rec_subst(simplify_in(b.body), pots);
            return mk_plusc(total_cost, body);
          },
          [&](const RecExpr::Incr &i) {
            fire(SizeRule::IncrCost);
            fire(SizeRule::IncrPot);
            return mk_plusc(rx::one(), simplify_in(i.arg));
          },
          [&](const RecExpr::CostProj &c) { return cost_of(simplify_in(c.arg)); },
          [&](const RecExpr::PotProj &p) { return pot_of(simplify_in(p.arg)); },
          [&](const RecExpr::WithCost &w) {
            auto c = simplify_in(w.cost);
            auto pot = simplify_in(w.pot);
            if (is_zero(c)) return rx::val(pot);
            return rx::withcost(c, pot);
          },
          [&](const RecExpr::PlusC &p) {
            return mk_plusc(simplify_in(p.cost), simplify_in(p.cmplx));
          },
          [&](const RecExpr::Leq &l) {
            return rx::leq(simplify_in(l.lhs), simplify_in(l.rhs));
          },
          [&](const auto &) { return e; },
      },
      e->node);
}

}  // namespace

}  // namespace recurrify

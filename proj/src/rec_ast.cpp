#include "recurrify/rec_ast.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace recurrify {

namespace rty {

namespace {
RecTypePtr mk(RecType::Node n) {
  return std::make_shared<RecType>(RecType{std::move(n)});
}
}  // namespace

RecTypePtr var(Name n) { return mk(RecType::Var{std::move(n)}); }
RecTypePtr cost() { return mk(RecType::CostC{}); }
RecTypePtr unit() { return mk(RecType::Unit{}); }
RecTypePtr integer() { return mk(RecType::Int{}); }
RecTypePtr sum(RecTypePtr l, RecTypePtr r) {
  return mk(RecType::Sum{std::move(l), std::move(r)});
}
RecTypePtr prod(RecTypePtr l, RecTypePtr r) {
  return mk(RecType::Prod{std::move(l), std::move(r)});
}
RecTypePtr arrow(RecTypePtr d, RecTypePtr c) {
  return mk(RecType::Arrow{std::move(d), std::move(c)});
}
RecTypePtr rec(Name v, RecTypePtr b) {
  return mk(RecType::Rec{std::move(v), std::move(b)});
}
RecTypePtr cmplx(RecTypePtr inner) {
  return mk(RecType::Cmplx{std::move(inner)});
}
RecTypePtr boolean() { return sum(unit(), unit()); }
RecTypePtr list(RecTypePtr el) {
  return rec("a", sum(unit(), prod(std::move(el), var("a"))));
}

}  // namespace rty

namespace {

Name freshen(const Name &base, const std::set<Name> &avoid) {
  Name n = base;
  while (avoid.count(n)) n += "'";
  return n;
}

bool rty_equal_in(const RecTypePtr &a, const RecTypePtr &b,
                  std::vector<std::pair<Name, Name>> &bound) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const RecType::Var &v) {
            const auto &o = std::get<RecType::Var>(b->node);
            for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
              if (it->first == v.name || it->second == o.name)
                return it->first == v.name && it->second == o.name;
            }
            return v.name == o.name;
          },
          [&](const RecType::CostC &) { return true; },
          [&](const RecType::Unit &) { return true; },
          [&](const RecType::Int &) { return true; },
          [&](const RecType::Sum &s) {
            const auto &o = std::get<RecType::Sum>(b->node);
            return rty_equal_in(s.left, o.left, bound) &&
                   rty_equal_in(s.right, o.right, bound);
          },
          [&](const RecType::Prod &p) {
            const auto &o = std::get<RecType::Prod>(b->node);
            return rty_equal_in(p.left, o.left, bound) &&
                   rty_equal_in(p.right, o.right, bound);
          },
          [&](const RecType::Arrow &ar) {
            const auto &o = std::get<RecType::Arrow>(b->node);
            return rty_equal_in(ar.dom, o.dom, bound) &&
                   rty_equal_in(ar.cod, o.cod, bound);
          },
          [&](const RecType::Rec &r) {
            const auto &o = std::get<RecType::Rec>(b->node);
            bound.emplace_back(r.var, o.var);
            bool ok = rty_equal_in(r.body, o.body, bound);
            bound.pop_back();
            return ok;
          },
          [&](const RecType::Cmplx &c) {
            const auto &o = std::get<RecType::Cmplx>(b->node);
            return rty_equal_in(c.inner, o.inner, bound);
          },
      },
      a->node);
}

void rty_fv(const RecTypePtr &t, std::set<Name> &bound, std::set<Name> &out) {
  std::visit(overloaded{
                 [&](const RecType::Var &v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const RecType::Sum &s) {
                   rty_fv(s.left, bound, out);
                   rty_fv(s.right, bound, out);
                 },
                 [&](const RecType::Prod &p) {
                   rty_fv(p.left, bound, out);
                   rty_fv(p.right, bound, out);
                 },
                 [&](const RecType::Arrow &a) {
                   rty_fv(a.dom, bound, out);
                   rty_fv(a.cod, bound, out);
                 },
                 [&](const RecType::Rec &r) {
                   bool fresh = bound.insert(r.var).second;
                   rty_fv(r.body, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
                 [&](const RecType::Cmplx &c) { rty_fv(c.inner, bound, out); },
                 [&](const auto &) {},
             },
             t->node);
}

}  // namespace

bool rec_type_equal(const RecTypePtr &a, const RecTypePtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return rty_equal_in(a, b, bound);
}

std::set<Name> rec_free_type_vars(const RecTypePtr &t) {
  std::set<Name> bound, out;
  rty_fv(t, bound, out);
  return out;
}

bool rec_type_closed(const RecTypePtr &t) {
  return rec_free_type_vars(t).empty();
}

RecTypePtr rec_subst_type(const RecTypePtr &body, const RecTypePtr &target,
                          const Name &var) {
  return std::visit(
      overloaded{
          [&](const RecType::Var &v) -> RecTypePtr {
            return v.name == var ? target : body;
          },
          [&](const RecType::Sum &s) -> RecTypePtr {
            return rty::sum(rec_subst_type(s.left, target, var),
                            rec_subst_type(s.right, target, var));
          },
          [&](const RecType::Prod &p) -> RecTypePtr {
            return rty::prod(rec_subst_type(p.left, target, var),
                             rec_subst_type(p.right, target, var));
          },
          [&](const RecType::Arrow &a) -> RecTypePtr {
            return rty::arrow(rec_subst_type(a.dom, target, var),
                              rec_subst_type(a.cod, target, var));
          },
          [&](const RecType::Rec &r) -> RecTypePtr {
            if (r.var == var) return body;
            auto target_fv = rec_free_type_vars(target);
            if (target_fv.count(r.var)) {
              auto avoid = target_fv;
              auto body_fv = rec_free_type_vars(r.body);
              avoid.insert(body_fv.begin(), body_fv.end());
              avoid.insert(var);
              Name nv = freshen(r.var, avoid);
              auto renamed = rec_subst_type(r.body, rty::var(nv), r.var);
              return rty::rec(nv, rec_subst_type(renamed, target, var));
            }
            return rty::rec(r.var, rec_subst_type(r.body, target, var));
          },
          [&](const RecType::Cmplx &c) -> RecTypePtr {
            return rty::cmplx(rec_subst_type(c.inner, target, var));
          },
          [&](const auto &) -> RecTypePtr { return body; },
      },
      body->node);
}

bool is_potential_type(const RecTypePtr &t) {
  return std::visit(
      overloaded{
          [&](const RecType::Cmplx &) { return false; },
          [&](const RecType::Sum &s) {
            return is_potential_type(s.left) && is_potential_type(s.right);
          },
          [&](const RecType::Prod &p) {
            return is_potential_type(p.left) && is_potential_type(p.right);
          },
          [&](const RecType::Arrow &a) {
            // Arrows return complexities; the codomain may be C(tau) as long
            // as tau is itself a potential type.
            if (!is_potential_type(a.dom)) return false;
            if (const auto *c = std::get_if<RecType::Cmplx>(&a.cod->node))
              return is_potential_type(c->inner);
            return is_potential_type(a.cod);
          },
          [&](const RecType::Rec &r) { return is_potential_type(r.body); },
          [&](const auto &) { return true; },
      },
      t->node);
}

std::optional<RecTypePtr> rec_list_elem_type(const RecTypePtr &t) {
  const auto *r = std::get_if<RecType::Rec>(&t->node);
  if (!r) return std::nullopt;
  const auto *s = std::get_if<RecType::Sum>(&r->body->node);
  if (!s || !std::holds_alternative<RecType::Unit>(s->left->node))
    return std::nullopt;
  const auto *p = std::get_if<RecType::Prod>(&s->right->node);
  if (!p) return std::nullopt;
  const auto *v = std::get_if<RecType::Var>(&p->right->node);
  if (!v || v->name != r->var) return std::nullopt;
  if (rec_free_type_vars(p->left).count(r->var)) return std::nullopt;
  return p->left;
}

bool rec_is_bool_type(const RecTypePtr &t) {
  const auto *s = std::get_if<RecType::Sum>(&t->node);
  return s && std::holds_alternative<RecType::Unit>(s->left->node) &&
         std::holds_alternative<RecType::Unit>(s->right->node);
}

namespace {

enum RTyLevel { kRTyArrow = 0, kRTySum, kRTyProd, kRTyPrefix, kRTyAtom };

void show_rty_in(const RecTypePtr &t, int min_level, std::ostream &os) {
  auto paren = [&](int lvl, auto fn) {
    if (lvl < min_level) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  if (rec_is_bool_type(t)) {
    os << "bool";
    return;
  }
  if (auto el = rec_list_elem_type(t)) {
    paren(kRTyPrefix, [&] {
      os << "list ";
      show_rty_in(*el, kRTyAtom, os);
    });
    return;
  }
  std::visit(overloaded{
                 [&](const RecType::Var &v) { os << v.name; },
                 [&](const RecType::CostC &) { os << "C"; },
                 [&](const RecType::Unit &) { os << "unit"; },
                 [&](const RecType::Int &) { os << "int"; },
                 [&](const RecType::Sum &s) {
                   paren(kRTySum, [&] {
                     show_rty_in(s.left, kRTyProd, os);
                     os << " + ";
                     show_rty_in(s.right, kRTySum, os);
                   });
                 },
                 [&](const RecType::Prod &p) {
                   paren(kRTyProd, [&] {
                     show_rty_in(p.left, kRTyPrefix, os);
                     os << " * ";
                     show_rty_in(p.right, kRTyProd, os);
                   });
                 },
                 [&](const RecType::Arrow &a) {
                   paren(kRTyArrow, [&] {
                     show_rty_in(a.dom, kRTySum, os);
                     os << " -> ";
                     show_rty_in(a.cod, kRTyArrow, os);
                   });
                 },
                 [&](const RecType::Rec &r) {
                   paren(kRTyArrow, [&] {
                     os << "mu " << r.var << " . ";
                     show_rty_in(r.body, kRTyArrow, os);
                   });
                 },
                 [&](const RecType::Cmplx &c) {
                   os << "C(";
                   show_rty_in(c.inner, kRTyArrow, os);
                   os << ")";
                 },
             },
             t->node);
}

}  // namespace

std::string show_rec_type(const RecTypePtr &t) {
  std::ostringstream os;
  show_rty_in(t, kRTyArrow, os);
  return os.str();
}

// ---------------------------------------------------------------------------

namespace rx {

namespace {
RecExprPtr mk(RecExpr::Node n) {
  return std::make_shared<RecExpr>(RecExpr{std::move(n)});
}
}  // namespace

RecExprPtr var(Name n) { return mk(RecExpr::Var{std::move(n)}); }
RecExprPtr zero() { return mk(RecExpr::Zero{}); }
RecExprPtr one() { return mk(RecExpr::One{}); }
RecExprPtr plus(RecExprPtr a, RecExprPtr b) {
  return mk(RecExpr::Plus{std::move(a), std::move(b)});
}
RecExprPtr unitval() { return mk(RecExpr::UnitVal{}); }
RecExprPtr intlit(std::int64_t v) { return mk(RecExpr::IntLit{v}); }
RecExprPtr inj(int tag, RecExprPtr e) {
  return mk(RecExpr::Inj{tag, nullptr, std::move(e)});
}
RecExprPtr inj_at(int tag, RecTypePtr other, RecExprPtr e) {
  return mk(RecExpr::Inj{tag, std::move(other), std::move(e)});
}
RecExprPtr case_(RecExprPtr s, Name b0, RecExprPtr e0, Name b1, RecExprPtr e1) {
  return mk(RecExpr::Case{std::move(s), std::move(b0), std::move(e0),
                          std::move(b1), std::move(e1)});
}
RecExprPtr pair(RecExprPtr a, RecExprPtr b) {
  return mk(RecExpr::Pair{std::move(a), std::move(b)});
}
RecExprPtr letpair(Name x0, Name x1, RecExprPtr p, RecExprPtr body) {
  return mk(RecExpr::LetPair{std::move(x0), std::move(x1), std::move(p),
                             std::move(body)});
}
RecExprPtr lam(Name param, RecTypePtr pt, RecExprPtr body) {
  return mk(RecExpr::Lam{std::move(param), std::move(pt), std::move(body)});
}
RecExprPtr app(RecExprPtr f, RecExprPtr a) {
  return mk(RecExpr::App{std::move(f), std::move(a)});
}
RecExprPtr fix(Name n, RecTypePtr t, RecExprPtr body) {
  return mk(RecExpr::Fix{std::move(n), std::move(t), std::move(body)});
}
RecExprPtr fold(RecTypePtr t, RecExprPtr e) {
  return mk(RecExpr::Fold{std::move(t), std::move(e)});
}
RecExprPtr unfold(RecTypePtr t, RecExprPtr e) {
  return mk(RecExpr::Unfold{std::move(t), std::move(e)});
}
RecExprPtr val(RecExprPtr e) { return mk(RecExpr::Val{std::move(e)}); }
RecExprPtr bind(std::vector<Name> names, std::vector<RecExprPtr> sources,
                RecExprPtr body) {
  assert(names.size() == sources.size() && !names.empty());
  return mk(RecExpr::Bind{std::move(names), std::move(sources),
                          std::move(body)});
}
RecExprPtr incr(RecExprPtr e) { return mk(RecExpr::Incr{std::move(e)}); }
RecExprPtr costp(RecExprPtr e) { return mk(RecExpr::CostProj{std::move(e)}); }
RecExprPtr potp(RecExprPtr e) { return mk(RecExpr::PotProj{std::move(e)}); }
RecExprPtr withcost(RecExprPtr cost, RecExprPtr pot) {
  return mk(RecExpr::WithCost{std::move(cost), std::move(pot)});
}
RecExprPtr plusc(RecExprPtr cost, RecExprPtr cmplx) {
  return mk(RecExpr::PlusC{std::move(cost), std::move(cmplx)});
}
RecExprPtr leq(RecExprPtr a, RecExprPtr b) {
  return mk(RecExpr::Leq{std::move(a), std::move(b)});
}
RecExprPtr nil(RecTypePtr elem) {
  auto lt = rty::list(elem);
  return fold(lt, inj_at(0, rty::prod(elem, lt), unitval()));
}
RecExprPtr cons(RecTypePtr elem, RecExprPtr hd, RecExprPtr tl) {
  auto lt = rty::list(elem);
  return fold(lt, inj_at(1, rty::unit(), pair(std::move(hd), std::move(tl))));
}

}  // namespace rx

namespace {

void rfv(const RecExprPtr &e, std::set<Name> &bound, std::set<Name> &out) {
  auto with = [&](const std::vector<Name> &names, const RecExprPtr &sub) {
    std::vector<Name> added;
    for (const auto &n : names)
      if (bound.insert(n).second) added.push_back(n);
    rfv(sub, bound, out);
    for (const auto &n : added) bound.erase(n);
  };
  std::visit(
      overloaded{
          [&](const RecExpr::Var &v) {
            if (!bound.count(v.name)) out.insert(v.name);
          },
          [&](const RecExpr::Plus &p) {
            rfv(p.lhs, bound, out);
            rfv(p.rhs, bound, out);
          },
          [&](const RecExpr::Inj &i) { rfv(i.arg, bound, out); },
          [&](const RecExpr::Case &c) {
            rfv(c.scrutinee, bound, out);
            with({c.bind0}, c.branch0);
            with({c.bind1}, c.branch1);
          },
          [&](const RecExpr::Pair &p) {
            rfv(p.fst, bound, out);
            rfv(p.snd, bound, out);
          },
          [&](const RecExpr::LetPair &l) {
            rfv(l.pair, bound, out);
            with({l.x0, l.x1}, l.body);
          },
          [&](const RecExpr::Lam &l) { with({l.param}, l.body); },
          [&](const RecExpr::App &a) {
            rfv(a.fn, bound, out);
            rfv(a.arg, bound, out);
          },
          [&](const RecExpr::Fix &f) { with({f.name}, f.body); },
          [&](const RecExpr::Fold &f) { rfv(f.arg, bound, out); },
          [&](const RecExpr::Unfold &u) { rfv(u.arg, bound, out); },
          [&](const RecExpr::Val &v) { rfv(v.arg, bound, out); },
          [&](const RecExpr::Bind &b) {
            for (const auto &s : b.sources) rfv(s, bound, out);
            with(b.names, b.body);
          },
          [&](const RecExpr::Incr &i) { rfv(i.arg, bound, out); },
          [&](const RecExpr::CostProj &c) { rfv(c.arg, bound, out); },
          [&](const RecExpr::PotProj &p) { rfv(p.arg, bound, out); },
          [&](const RecExpr::WithCost &w) {
            rfv(w.cost, bound, out);
            rfv(w.pot, bound, out);
          },
          [&](const RecExpr::PlusC &p) {
            rfv(p.cost, bound, out);
            rfv(p.cmplx, bound, out);
          },
          [&](const RecExpr::Leq &l) {
            rfv(l.lhs, bound, out);
            rfv(l.rhs, bound, out);
          },
          [&](const auto &) {},
      },
      e->node);
}

using RSubst = std::map<Name, RecExprPtr>;

RecExprPtr rsubst(const RecExprPtr &e, const RSubst &s);

struct RBound {
  std::vector<Name> names;
  RecExprPtr body;
};

RBound rsubst_under(const RSubst &s, std::vector<Name> binders,
                    const RecExprPtr &body) {
  RSubst inner = s;
  for (const auto &b : binders) inner.erase(b);
  std::set<Name> payload_fv;
  for (const auto &[k, v] : inner) {
    auto fv = rec_free_vars(v);
    payload_fv.insert(fv.begin(), fv.end());
  }
  std::vector<Name> final_names = binders;
  RecExprPtr cur = body;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    if (payload_fv.count(binders[i])) {
      std::set<Name> avoid = payload_fv;
      auto bfv = rec_free_vars(cur);
      avoid.insert(bfv.begin(), bfv.end());
      for (const auto &n : final_names) avoid.insert(n);
      Name nn = freshen(binders[i], avoid);
      cur = rsubst(cur, {{binders[i], rx::var(nn)}});
      final_names[i] = nn;
    }
  }
  if (inner.empty()) return {final_names, cur};
  return {final_names, rsubst(cur, inner)};
}

RecExprPtr rsubst(const RecExprPtr &e, const RSubst &s) {
  if (s.empty()) return e;
  return std::visit(
      overloaded{
          [&](const RecExpr::Var &v) -> RecExprPtr {
            auto it = s.find(v.name);
            return it == s.end() ? e : it->second;
          },
          [&](const RecExpr::Plus &p) -> RecExprPtr {
            return rx::plus(rsubst(p.lhs, s), rsubst(p.rhs, s));
          },
          [&](const RecExpr::Inj &i) -> RecExprPtr {
            return rx::inj_at(i.tag, i.other, rsubst(i.arg, s));
          },
          [&](const RecExpr::Case &c) -> RecExprPtr {
            auto scr = rsubst(c.scrutinee, s);
            auto b0 = rsubst_under(s, {c.bind0}, c.branch0);
            auto b1 = rsubst_under(s, {c.bind1}, c.branch1);
            return rx::case_(scr, b0.names[0], b0.body, b1.names[0], b1.body);
          },
          [&](const RecExpr::Pair &p) -> RecExprPtr {
            return rx::pair(rsubst(p.fst, s), rsubst(p.snd, s));
          },
          [&](const RecExpr::LetPair &l) -> RecExprPtr {
            auto pr = rsubst(l.pair, s);
            auto bs = rsubst_under(s, {l.x0, l.x1}, l.body);
            return rx::letpair(bs.names[0], bs.names[1], pr, bs.body);
          },
          [&](const RecExpr::Lam &l) -> RecExprPtr {
            auto bs = rsubst_under(s, {l.param}, l.body);
            return rx::lam(bs.names[0], l.param_type, bs.body);
          },
          [&](const RecExpr::App &a) -> RecExprPtr {
            return rx::app(rsubst(a.fn, s), rsubst(a.arg, s));
          },
          [&](const RecExpr::Fix &f) -> RecExprPtr {
            auto bs = rsubst_under(s, {f.name}, f.body);
            return rx::fix(bs.names[0], f.type, bs.body);
          },
          [&](const RecExpr::Fold &f) -> RecExprPtr {
            return rx::fold(f.rec_type, rsubst(f.arg, s));
          },
          [&](const RecExpr::Unfold &u) -> RecExprPtr {
            return rx::unfold(u.rec_type, rsubst(u.arg, s));
          },
          [&](const RecExpr::Val &v) -> RecExprPtr {
            return rx::val(rsubst(v.arg, s));
          },
          [&](const RecExpr::Bind &b) -> RecExprPtr {
            std::vector<RecExprPtr> srcs;
            srcs.reserve(b.sources.size());
            for (const auto &src : b.sources) srcs.push_back(rsubst(src, s));
            auto bs = rsubst_under(s, b.names, b.body);
            return rx::bind(bs.names, std::move(srcs), bs.body);
          },
          [&](const RecExpr::Incr &i) -> RecExprPtr {
            return rx::incr(rsubst(i.arg, s));
          },
          [&](const RecExpr::CostProj &c) -> RecExprPtr {
            return rx::costp(rsubst(c.arg, s));
          },
          [&](const RecExpr::PotProj &p) -> RecExprPtr {
            return rx::potp(rsubst(p.arg, s));
          },
          [&](const RecExpr::WithCost &w) -> RecExprPtr {
            return rx::withcost(rsubst(w.cost, s), rsubst(w.pot, s));
          },
          [&](const RecExpr::PlusC &p) -> RecExprPtr {
            return rx::plusc(rsubst(p.cost, s), rsubst(p.cmplx, s));
          },
          [&](const RecExpr::Leq &l) -> RecExprPtr {
            return rx::leq(rsubst(l.lhs, s), rsubst(l.rhs, s));
          },
          [&](const auto &) -> RecExprPtr { return e; },
      },
      e->node);
}

bool req_in(const RecExprPtr &a, const RecExprPtr &b, bool alpha,
            std::vector<std::pair<Name, Name>> &bound) {
  if (a->node.index() != b->node.index()) return false;
  auto names_match = [&](const Name &na, const Name &nb) {
    if (!alpha) return na == nb;
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      if (it->first == na || it->second == nb)
        return it->first == na && it->second == nb;
    }
    return na == nb;
  };
  auto under = [&](const std::vector<Name> &nas, const std::vector<Name> &nbs,
                   const RecExprPtr &ba, const RecExprPtr &bb) {
    if (nas.size() != nbs.size()) return false;
    for (std::size_t i = 0; i < nas.size(); ++i)
      bound.emplace_back(nas[i], nbs[i]);
    bool ok = req_in(ba, bb, alpha, bound);
    for (std::size_t i = 0; i < nas.size(); ++i) bound.pop_back();
    return ok;
  };
  return std::visit(
      overloaded{
          [&](const RecExpr::Var &v) {
            return names_match(v.name, std::get<RecExpr::Var>(b->node).name);
          },
          [&](const RecExpr::Zero &) { return true; },
          [&](const RecExpr::One &) { return true; },
          [&](const RecExpr::UnitVal &) { return true; },
          [&](const RecExpr::IntLit &i) {
            return i.value == std::get<RecExpr::IntLit>(b->node).value;
          },
          [&](const RecExpr::Plus &p) {
            const auto &o = std::get<RecExpr::Plus>(b->node);
            return req_in(p.lhs, o.lhs, alpha, bound) &&
                   req_in(p.rhs, o.rhs, alpha, bound);
          },
          [&](const RecExpr::Inj &i) {
            const auto &o = std::get<RecExpr::Inj>(b->node);
            if (i.tag != o.tag) return false;
            if ((i.other == nullptr) != (o.other == nullptr)) return false;
            if (i.other && !rec_type_equal(i.other, o.other)) return false;
            return req_in(i.arg, o.arg, alpha, bound);
          },
          [&](const RecExpr::Case &c) {
            const auto &o = std::get<RecExpr::Case>(b->node);
            return req_in(c.scrutinee, o.scrutinee, alpha, bound) &&
                   under({c.bind0}, {o.bind0}, c.branch0, o.branch0) &&
                   under({c.bind1}, {o.bind1}, c.branch1, o.branch1);
          },
          [&](const RecExpr::Pair &p) {
            const auto &o = std::get<RecExpr::Pair>(b->node);
            return req_in(p.fst, o.fst, alpha, bound) &&
                   req_in(p.snd, o.snd, alpha, bound);
          },
          [&](const RecExpr::LetPair &l) {
            const auto &o = std::get<RecExpr::LetPair>(b->node);
            return req_in(l.pair, o.pair, alpha, bound) &&
                   under({l.x0, l.x1}, {o.x0, o.x1}, l.body, o.body);
          },
          [&](const RecExpr::Lam &l) {
            const auto &o = std::get<RecExpr::Lam>(b->node);
            if ((l.param_type == nullptr) != (o.param_type == nullptr))
              return false;
            if (l.param_type && !rec_type_equal(l.param_type, o.param_type))
              return false;
            return under({l.param}, {o.param}, l.body, o.body);
          },
          [&](const RecExpr::App &a2) {
            const auto &o = std::get<RecExpr::App>(b->node);
            return req_in(a2.fn, o.fn, alpha, bound) &&
                   req_in(a2.arg, o.arg, alpha, bound);
          },
          [&](const RecExpr::Fix &f) {
            const auto &o = std::get<RecExpr::Fix>(b->node);
            if ((f.type == nullptr) != (o.type == nullptr)) return false;
            if (f.type && !rec_type_equal(f.type, o.type)) return false;
            return under({f.name}, {o.name}, f.body, o.body);
          },
          [&](const RecExpr::Fold &f) {
            const auto &o = std::get<RecExpr::Fold>(b->node);
            return rec_type_equal(f.rec_type, o.rec_type) &&
                   req_in(f.arg, o.arg, alpha, bound);
          },
          [&](const RecExpr::Unfold &u) {
            const auto &o = std::get<RecExpr::Unfold>(b->node);
            return rec_type_equal(u.rec_type, o.rec_type) &&
                   req_in(u.arg, o.arg, alpha, bound);
          },
          [&](const RecExpr::Val &v) {
            return req_in(v.arg, std::get<RecExpr::Val>(b->node).arg, alpha,
                          bound);
          },
          [&](const RecExpr::Bind &bd) {
            const auto &o = std::get<RecExpr::Bind>(b->node);
            if (bd.sources.size() != o.sources.size()) return false;
            for (std::size_t i = 0; i < bd.sources.size(); ++i)
              if (!req_in(bd.sources[i], o.sources[i], alpha, bound))
                return false;
            return under(bd.names, o.names, bd.body, o.body);
          },
          [&](const RecExpr::Incr &i) {
            return req_in(i.arg, std::get<RecExpr::Incr>(b->node).arg, alpha,
                          bound);
          },
          [&](const RecExpr::CostProj &c) {
            return req_in(c.arg, std::get<RecExpr::CostProj>(b->node).arg,
                          alpha, bound);
          },
          [&](const RecExpr::PotProj &p) {
            return req_in(p.arg, std::get<RecExpr::PotProj>(b->node).arg,
                          alpha, bound);
          },
          [&](const RecExpr::WithCost &w) {
            const auto &o = std::get<RecExpr::WithCost>(b->node);
            return req_in(w.cost, o.cost, alpha, bound) &&
                   req_in(w.pot, o.pot, alpha, bound);
          },
          [&](const RecExpr::PlusC &p) {
            const auto &o = std::get<RecExpr::PlusC>(b->node);
            return req_in(p.cost, o.cost, alpha, bound) &&
                   req_in(p.cmplx, o.cmplx, alpha, bound);
          },
          [&](const RecExpr::Leq &l) {
            const auto &o = std::get<RecExpr::Leq>(b->node);
            return req_in(l.lhs, o.lhs, alpha, bound) &&
                   req_in(l.rhs, o.rhs, alpha, bound);
          },
      },
      a->node);
}

}  // namespace

std::set<Name> rec_free_vars(const RecExprPtr &e) {
  std::set<Name> bound, out;
  rfv(e, bound, out);
  return out;
}

RecExprPtr rec_subst(const RecExprPtr &e,
                     const std::map<Name, RecExprPtr> &replacements) {
  return rsubst(e, replacements);
}

bool rec_expr_equal(const RecExprPtr &a, const RecExprPtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return req_in(a, b, false, bound);
}

bool rec_alpha_equal(const RecExprPtr &a, const RecExprPtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return req_in(a, b, true, bound);
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

// Levels: low (binders, case forms, withcost, plusc, bind), sum (+),
// app, atom. Projections print as parenthesized postfix and count as atoms.
enum RLevel { kRLow = 0, kRSum, kRApp, kRAtom };

struct RConsView {
  RecExprPtr head, tail;
};

bool is_nil(const RecExprPtr &e) {
  const auto *f = std::get_if<RecExpr::Fold>(&e->node);
  if (!f || !rec_list_elem_type(f->rec_type)) return false;
  const auto *i = std::get_if<RecExpr::Inj>(&f->arg->node);
  return i && i->tag == 0 &&
         std::holds_alternative<RecExpr::UnitVal>(i->arg->node);
}

std::optional<RConsView> as_cons(const RecExprPtr &e) {
  const auto *f = std::get_if<RecExpr::Fold>(&e->node);
  if (!f || !rec_list_elem_type(f->rec_type)) return std::nullopt;
  const auto *i = std::get_if<RecExpr::Inj>(&f->arg->node);
  if (!i || i->tag != 1) return std::nullopt;
  const auto *p = std::get_if<RecExpr::Pair>(&i->arg->node);
  if (!p) return std::nullopt;
  return RConsView{p->fst, p->snd};
}

struct RCaselistView {
  RecExprPtr scrutinee, nil_branch;
  Name hd, tl;
  RecExprPtr cons_branch;
};

std::optional<RCaselistView> as_caselist(const RecExprPtr &e) {
  const auto *c = std::get_if<RecExpr::Case>(&e->node);
  if (!c) return std::nullopt;
  const auto *u = std::get_if<RecExpr::Unfold>(&c->scrutinee->node);
  if (!u || !rec_list_elem_type(u->rec_type)) return std::nullopt;
  const auto *l = std::get_if<RecExpr::LetPair>(&c->branch1->node);
  if (!l) return std::nullopt;
  const auto *v = std::get_if<RecExpr::Var>(&l->pair->node);
  if (!v || v->name != c->bind1) return std::nullopt;
  if (rec_free_vars(c->branch0).count(c->bind0)) return std::nullopt;
  if (rec_free_vars(l->body).count(c->bind1)) return std::nullopt;
  return RCaselistView{u->arg, c->branch0, l->x0, l->x1, l->body};
}

void show_r(const RecExprPtr &e, int min_level, std::ostream &os);

void show_atom(const RecExprPtr &e, std::ostream &os) {
  show_r(e, kRAtom, os);
}

void show_r(const RecExprPtr &e, int min_level, std::ostream &os) {
  auto paren = [&](int lvl, auto fn) {
    if (lvl < min_level) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  if (is_nil(e)) {
    os << "nil";
    return;
  }
  if (auto cv = as_cons(e)) {
    os << "cons(";
    show_r(cv->head, kRLow, os);
    os << ", ";
    show_r(cv->tail, kRLow, os);
    os << ")";
    return;
  }
  if (auto cl = as_caselist(e)) {
    paren(kRLow, [&] {
      os << "caselist ";
      show_r(cl->scrutinee, kRApp, os);
      os << " of nil => ";
      show_r(cl->nil_branch, kRLow, os);
      os << " | cons(" << cl->hd << ", " << cl->tl << ") => ";
      show_r(cl->cons_branch, kRLow, os);
    });
    return;
  }
  std::visit(
      overloaded{
          [&](const RecExpr::Var &v) { os << v.name; },
          [&](const RecExpr::Zero &) { os << "0"; },
          [&](const RecExpr::One &) { os << "1"; },
          [&](const RecExpr::Plus &p) {
            paren(kRSum, [&] {
              show_r(p.lhs, kRSum, os);
              os << " + ";
              show_r(p.rhs, kRApp, os);
            });
          },
          [&](const RecExpr::UnitVal &) { os << "()"; },
          [&](const RecExpr::IntLit &i) { os << i.value; },
          [&](const RecExpr::Inj &i) {
            paren(kRApp, [&] {
              os << (i.tag == 0 ? "in0 " : "in1 ");
              show_atom(i.arg, os);
            });
          },
          [&](const RecExpr::Case &c) {
            paren(kRLow, [&] {
              if (c.bind0 == "_" && c.bind1 == "_") {
                os << "if ";
                show_r(c.scrutinee, kRApp, os);
                os << " then ";
                show_r(c.branch0, kRLow, os);
                os << " else ";
                show_r(c.branch1, kRLow, os);
              } else {
                os << "case ";
                show_r(c.scrutinee, kRApp, os);
                os << " of in0 " << c.bind0 << " => ";
                show_r(c.branch0, kRLow, os);
                os << " | in1 " << c.bind1 << " => ";
                show_r(c.branch1, kRLow, os);
              }
            });
          },
          [&](const RecExpr::Pair &p) {
            os << "(";
            show_r(p.fst, kRLow, os);
            os << ", ";
            show_r(p.snd, kRLow, os);
            os << ")";
          },
          [&](const RecExpr::LetPair &l) {
            paren(kRLow, [&] {
              os << "let (" << l.x0 << ", " << l.x1 << ") = ";
              show_r(l.pair, kRApp, os);
              os << " in ";
              show_r(l.body, kRLow, os);
            });
          },
          [&](const RecExpr::Lam &l) {
            paren(kRLow, [&] {
              os << "\\" << l.param << ". ";
              show_r(l.body, kRLow, os);
            });
          },
          [&](const RecExpr::App &a) {
            paren(kRApp, [&] {
              show_r(a.fn, kRApp, os);
              os << " ";
              show_atom(a.arg, os);
            });
          },
          [&](const RecExpr::Fix &f) {
            paren(kRLow, [&] {
              os << "fix " << f.name << ". ";
              show_r(f.body, kRLow, os);
            });
          },
          [&](const RecExpr::Fold &f) {
            paren(kRApp, [&] {
              os << "fold ";
              show_atom(f.arg, os);
            });
          },
          [&](const RecExpr::Unfold &u) {
            paren(kRApp, [&] {
              os << "unfold ";
              show_atom(u.arg, os);
            });
          },
          [&](const RecExpr::Val &v) {
            paren(kRApp, [&] {
              os << "val ";
              show_atom(v.arg, os);
            });
          },
          [&](const RecExpr::Bind &b) {
            paren(kRLow, [&] {
              if (b.names.size() == 1) {
                os << b.names[0] << " <- ";
                show_r(b.sources[0], kRApp, os);
              } else {
                os << "(";
                for (std::size_t i = 0; i < b.names.size(); ++i) {
                  if (i) os << ", ";
                  os << b.names[i];
                }
                os << ") <- (";
                for (std::size_t i = 0; i < b.sources.size(); ++i) {
                  if (i) os << ", ";
                  show_r(b.sources[i], kRLow, os);
                }
                os << ")";
              }
              os << "; ";
              show_r(b.body, kRLow, os);
            });
          },
          [&](const RecExpr::Incr &i) {
            paren(kRApp, [&] {
              os << "incr ";
              show_atom(i.arg, os);
            });
          },
          [&](const RecExpr::CostProj &c) {
            if (const auto *v = std::get_if<RecExpr::Var>(&c.arg->node)) {
              os << v->name << "_c";
            } else {
              os << "(";
              show_r(c.arg, kRLow, os);
              os << ")_c";
            }
          },
          [&](const RecExpr::PotProj &p) {
            if (const auto *v = std::get_if<RecExpr::Var>(&p.arg->node)) {
              os << v->name << "_p";
            } else {
              os << "(";
              show_r(p.arg, kRLow, os);
              os << ")_p";
            }
          },
          [&](const RecExpr::WithCost &w) {
            paren(kRLow, [&] {
              show_r(w.pot, kRApp, os);
              os << " withcost ";
              show_r(w.cost, kRApp, os);
            });
          },
          [&](const RecExpr::PlusC &p) {
            paren(kRLow, [&] {
              show_r(p.cost, kRApp, os);
              os << " +c ";
              show_atom(p.cmplx, os);
            });
          },
          [&](const RecExpr::Leq &l) {
            os << "leq(";
            show_r(l.lhs, kRLow, os);
            os << ", ";
            show_r(l.rhs, kRLow, os);
            os << ")";
          },
      },
      e->node);
}

}  // namespace

std::string show_rec(const RecExprPtr &e) {
  std::ostringstream os;
  show_r(e, kRLow, os);
  return os.str();
}

}  // namespace recurrify

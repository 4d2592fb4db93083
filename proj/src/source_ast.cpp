#include "recurrify/source_ast.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace recurrify {

namespace ty {

SrcTypePtr var(Name n) { return std::make_shared<SrcType>(SrcType{SrcType::Var{std::move(n)}}); }
SrcTypePtr unit() { return std::make_shared<SrcType>(SrcType{SrcType::Unit{}}); }
SrcTypePtr integer() { return std::make_shared<SrcType>(SrcType{SrcType::Int{}}); }
SrcTypePtr sum(SrcTypePtr l, SrcTypePtr r) {
  return std::make_shared<SrcType>(SrcType{SrcType::Sum{std::move(l), std::move(r)}});
}
SrcTypePtr prod(SrcTypePtr l, SrcTypePtr r) {
  return std::make_shared<SrcType>(SrcType{SrcType::Prod{std::move(l), std::move(r)}});
}
SrcTypePtr arrow(SrcTypePtr d, SrcTypePtr c) {
  return std::make_shared<SrcType>(SrcType{SrcType::Arrow{std::move(d), std::move(c)}});
}
SrcTypePtr rec(Name v, SrcTypePtr b) {
  return std::make_shared<SrcType>(SrcType{SrcType::Rec{std::move(v), std::move(b)}});
}
SrcTypePtr boolean() { return sum(unit(), unit()); }
SrcTypePtr list(SrcTypePtr el) {
  return rec("a", sum(unit(), prod(std::move(el), var("a"))));
}

}  // namespace ty

namespace {

bool type_equal_in(const SrcTypePtr &a, const SrcTypePtr &b,
                   std::vector<std::pair<Name, Name>> &bound) {
  return std::visit(
      overloaded{
          [&](const SrcType::Var &va) {
            const auto *vb = std::get_if<SrcType::Var>(&b->node);
            if (!vb) return false;
            for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
              if (it->first == va.name || it->second == vb->name)
                return it->first == va.name && it->second == vb->name;
            }
            return va.name == vb->name;
          },
          [&](const SrcType::Unit &) { return std::holds_alternative<SrcType::Unit>(b->node); },
          [&](const SrcType::Int &) { return std::holds_alternative<SrcType::Int>(b->node); },
          [&](const SrcType::Sum &sa) {
            const auto *sb = std::get_if<SrcType::Sum>(&b->node);
            return sb && type_equal_in(sa.left, sb->left, bound) &&
                   type_equal_in(sa.right, sb->right, bound);
          },
          [&](const SrcType::Prod &pa) {
            const auto *pb = std::get_if<SrcType::Prod>(&b->node);
            return pb && type_equal_in(pa.left, pb->left, bound) &&
                   type_equal_in(pa.right, pb->right, bound);
          },
          [&](const SrcType::Arrow &aa) {
            const auto *ab = std::get_if<SrcType::Arrow>(&b->node);
            return ab && type_equal_in(aa.dom, ab->dom, bound) &&
                   type_equal_in(aa.cod, ab->cod, bound);
          },
          [&](const SrcType::Rec &ra) {
            const auto *rb = std::get_if<SrcType::Rec>(&b->node);
            if (!rb) return false;
            bound.emplace_back(ra.var, rb->var);
            bool ok = type_equal_in(ra.body, rb->body, bound);
            bound.pop_back();
            return ok;
          },
      },
      a->node);
}

void free_type_vars_in(const SrcTypePtr &t, std::set<Name> &bound,
                       std::set<Name> &out) {
  std::visit(overloaded{
                 [&](const SrcType::Var &v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const SrcType::Unit &) {},
                 [&](const SrcType::Int &) {},
                 [&](const SrcType::Sum &s) {
                   free_type_vars_in(s.left, bound, out);
                   free_type_vars_in(s.right, bound, out);
                 },
                 [&](const SrcType::Prod &p) {
                   free_type_vars_in(p.left, bound, out);
                   free_type_vars_in(p.right, bound, out);
                 },
                 [&](const SrcType::Arrow &a) {
                   free_type_vars_in(a.dom, bound, out);
                   free_type_vars_in(a.cod, bound, out);
                 },
                 [&](const SrcType::Rec &r) {
                   bool fresh = bound.insert(r.var).second;
                   free_type_vars_in(r.body, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
             },
             t->node);
}

Name freshen(const Name &base, const std::set<Name> &avoid) {
  Name n = base;
  while (avoid.count(n)) n += "'";
  return n;
}

}  // namespace

bool type_equal(const SrcTypePtr &a, const SrcTypePtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return type_equal_in(a, b, bound);
}

std::set<Name> free_type_vars(const SrcTypePtr &t) {
  std::set<Name> bound, out;
  free_type_vars_in(t, bound, out);
  return out;
}

bool type_closed(const SrcTypePtr &t) { return free_type_vars(t).empty(); }

SrcTypePtr subst_type(const SrcTypePtr &body, const SrcTypePtr &target,
                      const Name &var) {
  return std::visit(
      overloaded{
          [&](const SrcType::Var &v) -> SrcTypePtr {
            return v.name == var ? target : body;
          },
          [&](const SrcType::Unit &) -> SrcTypePtr { return body; },
          [&](const SrcType::Int &) -> SrcTypePtr { return body; },
          [&](const SrcType::Sum &s) -> SrcTypePtr {
            return ty::sum(subst_type(s.left, target, var),
                           subst_type(s.right, target, var));
          },
          [&](const SrcType::Prod &p) -> SrcTypePtr {
            return ty::prod(subst_type(p.left, target, var),
                            subst_type(p.right, target, var));
          },
          [&](const SrcType::Arrow &a) -> SrcTypePtr {
            return ty::arrow(subst_type(a.dom, target, var),
                             subst_type(a.cod, target, var));
          },
          [&](const SrcType::Rec &r) -> SrcTypePtr {
            if (r.var == var) return body;
            auto target_fv = free_type_vars(target);
            if (target_fv.count(r.var)) {
              auto avoid = target_fv;
              auto body_fv = free_type_vars(r.body);
              avoid.insert(body_fv.begin(), body_fv.end());
              avoid.insert(var);
              Name nv = freshen(r.var, avoid);
              auto renamed = subst_type(r.body, ty::var(nv), r.var);
              return ty::rec(nv, subst_type(renamed, target, var));
            }
            return ty::rec(r.var, subst_type(r.body, target, var));
          },
      },
      body->node);
}

bool is_polynomial_functor(const SrcTypePtr &body, const Name &var) {
  return std::visit(
      overloaded{
          [&](const SrcType::Var &v) {
            return v.name == var || type_closed(body);
          },
          [&](const SrcType::Sum &s) {
            return is_polynomial_functor(s.left, var) &&
                   is_polynomial_functor(s.right, var);
          },
          [&](const SrcType::Prod &p) {
            return is_polynomial_functor(p.left, var) &&
                   is_polynomial_functor(p.right, var);
          },
          [&](const auto &) { return type_closed(body); },
      },
      body->node);
}

std::optional<SrcTypePtr> list_elem_type(const SrcTypePtr &t) {
  const auto *r = std::get_if<SrcType::Rec>(&t->node);
  if (!r) return std::nullopt;
  const auto *s = std::get_if<SrcType::Sum>(&r->body->node);
  if (!s || !std::holds_alternative<SrcType::Unit>(s->left->node))
    return std::nullopt;
  const auto *p = std::get_if<SrcType::Prod>(&s->right->node);
  if (!p) return std::nullopt;
  const auto *v = std::get_if<SrcType::Var>(&p->right->node);
  if (!v || v->name != r->var) return std::nullopt;
  if (free_type_vars(p->left).count(r->var)) return std::nullopt;
  return p->left;
}

bool is_bool_type(const SrcTypePtr &t) {
  const auto *s = std::get_if<SrcType::Sum>(&t->node);
  return s && std::holds_alternative<SrcType::Unit>(s->left->node) &&
         std::holds_alternative<SrcType::Unit>(s->right->node);
}

namespace {

// Precedence levels for printing. Higher binds tighter.
enum TyLevel { kTyArrow = 0, kTySum = 1, kTyProd = 2, kTyPrefix = 3, kTyAtom = 4 };

void show_type_in(const SrcTypePtr &t, int min_level, std::ostream &os) {
  auto paren = [&](int lvl, auto fn) {
    if (lvl < min_level) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  if (is_bool_type(t)) {
    os << "bool";
    return;
  }
  if (auto el = list_elem_type(t)) {
    paren(kTyPrefix, [&] {
      os << "list ";
      show_type_in(*el, kTyAtom, os);
    });
    return;
  }
  std::visit(overloaded{
                 [&](const SrcType::Var &v) { os << v.name; },
                 [&](const SrcType::Unit &) { os << "unit"; },
                 [&](const SrcType::Int &) { os << "int"; },
                 [&](const SrcType::Sum &s) {
                   paren(kTySum, [&] {
                     show_type_in(s.left, kTyProd, os);
                     os << " + ";
                     show_type_in(s.right, kTySum, os);
                   });
                 },
                 [&](const SrcType::Prod &p) {
                   paren(kTyProd, [&] {
                     show_type_in(p.left, kTyPrefix, os);
                     os << " * ";
                     show_type_in(p.right, kTyProd, os);
                   });
                 },
                 [&](const SrcType::Arrow &a) {
                   paren(kTyArrow, [&] {
                     show_type_in(a.dom, kTySum, os);
                     os << " -> ";
                     show_type_in(a.cod, kTyArrow, os);
                   });
                 },
                 [&](const SrcType::Rec &r) {
                   paren(kTyArrow, [&] {
                     os << "mu " << r.var << " . ";
                     show_type_in(r.body, kTyArrow, os);
                   });
                 },
             },
             t->node);
}

}  // namespace

std::string show_type(const SrcTypePtr &t) {
  std::ostringstream os;
  show_type_in(t, kTyArrow, os);
  return os.str();
}

// ---------------------------------------------------------------------------

namespace ex {

namespace {
SrcExprPtr mk(SrcExpr::Node n) { return std::make_shared<SrcExpr>(SrcExpr{std::move(n)}); }
}  // namespace

SrcExprPtr var(Name n) { return mk(SrcExpr::Var{std::move(n)}); }
SrcExprPtr unitval() { return mk(SrcExpr::UnitVal{}); }
SrcExprPtr intlit(std::int64_t v) { return mk(SrcExpr::IntLit{v}); }
SrcExprPtr inj(int tag, SrcExprPtr e) {
  return mk(SrcExpr::Inj{tag, nullptr, std::move(e)});
}
SrcExprPtr inj_at(int tag, SrcTypePtr other, SrcExprPtr e) {
  return mk(SrcExpr::Inj{tag, std::move(other), std::move(e)});
}
SrcExprPtr case_(SrcExprPtr s, Name b0, SrcExprPtr e0, Name b1, SrcExprPtr e1) {
  return mk(SrcExpr::Case{std::move(s), std::move(b0), std::move(e0),
                          std::move(b1), std::move(e1)});
}
SrcExprPtr pair(SrcExprPtr a, SrcExprPtr b) {
  return mk(SrcExpr::Pair{std::move(a), std::move(b)});
}
SrcExprPtr letpair(Name x0, Name x1, SrcExprPtr p, SrcExprPtr body) {
  return mk(SrcExpr::LetPair{std::move(x0), std::move(x1), std::move(p),
                             std::move(body)});
}
SrcExprPtr fun(Name self, Name param, SrcTypePtr pt, SrcTypePtr rt,
               SrcExprPtr body) {
  return mk(SrcExpr::Fun{std::move(self), std::move(param), std::move(pt),
                         std::move(rt), std::move(body)});
}
SrcExprPtr app(SrcExprPtr f, SrcExprPtr a) {
  return mk(SrcExpr::App{std::move(f), std::move(a)});
}
SrcExprPtr fold(SrcTypePtr t, SrcExprPtr e) {
  return mk(SrcExpr::Fold{std::move(t), std::move(e)});
}
SrcExprPtr unfold(SrcTypePtr t, SrcExprPtr e) {
  return mk(SrcExpr::Unfold{std::move(t), std::move(e)});
}
SrcExprPtr tick(SrcExprPtr e) { return mk(SrcExpr::Tick{std::move(e)}); }
SrcExprPtr leq(SrcExprPtr a, SrcExprPtr b) {
  return mk(SrcExpr::Leq{std::move(a), std::move(b)});
}

SrcExprPtr nil(SrcTypePtr elem) {
  auto lt = ty::list(elem);
  return fold(lt, inj_at(0, ty::prod(elem, lt), unitval()));
}
SrcExprPtr cons(SrcTypePtr elem, SrcExprPtr hd, SrcExprPtr tl) {
  auto lt = ty::list(elem);
  return fold(lt, inj_at(1, ty::unit(), pair(std::move(hd), std::move(tl))));
}
SrcExprPtr truev() { return inj_at(0, ty::unit(), unitval()); }
SrcExprPtr falsev() { return inj_at(1, ty::unit(), unitval()); }
SrcExprPtr list_lit(SrcTypePtr elem, const std::vector<SrcExprPtr> &items) {
  SrcExprPtr acc = nil(elem);
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    acc = cons(elem, *it, acc);
  return acc;
}
SrcExprPtr int_list(const std::vector<std::int64_t> &items) {
  std::vector<SrcExprPtr> es;
  es.reserve(items.size());
  for (auto v : items) es.push_back(intlit(v));
  return list_lit(ty::integer(), es);
}

}  // namespace ex

bool is_value(const SrcExprPtr &e) {
  return std::visit(
      overloaded{
          [&](const SrcExpr::UnitVal &) { return true; },
          [&](const SrcExpr::IntLit &) { return true; },
          [&](const SrcExpr::Inj &i) { return is_value(i.arg); },
          [&](const SrcExpr::Pair &p) {
            return is_value(p.fst) && is_value(p.snd);
          },
          [&](const SrcExpr::Fun &) { return true; },
          [&](const SrcExpr::Fold &f) { return is_value(f.arg); },
          [&](const auto &) { return false; },
      },
      e->node);
}

namespace {

void free_vars_in(const SrcExprPtr &e, std::set<Name> &bound,
                  std::set<Name> &out) {
  auto with = [&](std::vector<Name> names, const SrcExprPtr &sub) {
    std::vector<Name> added;
    for (auto &n : names)
      if (bound.insert(n).second) added.push_back(n);
    free_vars_in(sub, bound, out);
    for (auto &n : added) bound.erase(n);
  };
  std::visit(overloaded{
                 [&](const SrcExpr::Var &v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const SrcExpr::UnitVal &) {},
                 [&](const SrcExpr::IntLit &) {},
                 [&](const SrcExpr::Inj &i) { free_vars_in(i.arg, bound, out); },
                 [&](const SrcExpr::Case &c) {
                   free_vars_in(c.scrutinee, bound, out);
                   with({c.bind0}, c.branch0);
                   with({c.bind1}, c.branch1);
                 },
                 [&](const SrcExpr::Pair &p) {
                   free_vars_in(p.fst, bound, out);
                   free_vars_in(p.snd, bound, out);
                 },
                 [&](const SrcExpr::LetPair &l) {
                   free_vars_in(l.pair, bound, out);
                   with({l.x0, l.x1}, l.body);
                 },
                 [&](const SrcExpr::Fun &f) { with({f.self, f.param}, f.body); },
                 [&](const SrcExpr::App &a) {
                   free_vars_in(a.fn, bound, out);
                   free_vars_in(a.arg, bound, out);
                 },
                 [&](const SrcExpr::Fold &f) { free_vars_in(f.arg, bound, out); },
                 [&](const SrcExpr::Unfold &u) { free_vars_in(u.arg, bound, out); },
                 [&](const SrcExpr::Tick &t) { free_vars_in(t.arg, bound, out); },
                 [&](const SrcExpr::Leq &l) {
                   free_vars_in(l.lhs, bound, out);
                   free_vars_in(l.rhs, bound, out);
                 },
             },
             e->node);
}

using Subst = std::map<Name, SrcExprPtr>;

SrcExprPtr subst_in(const SrcExprPtr &e, const Subst &s);

struct BoundSubst {
  std::vector<Name> names;
  SrcExprPtr body;
};

// Substitute under binders, renaming them if they would capture.
BoundSubst subst_under(const Subst &s, std::vector<Name> binders,
                       const SrcExprPtr &body) {
  Subst inner = s;
  for (const auto &b : binders) inner.erase(b);
  std::set<Name> payload_fv;
  for (const auto &[k, v] : inner) {
    auto fv = free_vars(v);
    payload_fv.insert(fv.begin(), fv.end());
  }
  std::vector<Name> final_names = binders;
  SrcExprPtr cur_body = body;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    if (payload_fv.count(binders[i])) {
      std::set<Name> avoid = payload_fv;
      auto bfv = free_vars(cur_body);
      avoid.insert(bfv.begin(), bfv.end());
      for (const auto &n : final_names) avoid.insert(n);
      Name nn = freshen(binders[i], avoid);
      Subst rn{{binders[i], ex::var(nn)}};
      cur_body = subst_in(cur_body, rn);
      final_names[i] = nn;
    }
  }
  if (inner.empty()) return BoundSubst{final_names, cur_body};
  return BoundSubst{final_names, subst_in(cur_body, inner)};
}

SrcExprPtr subst_in(const SrcExprPtr &e, const Subst &s) {
  if (s.empty()) return e;
  return std::visit(
      overloaded{
          [&](const SrcExpr::Var &v) -> SrcExprPtr {
            auto it = s.find(v.name);
            return it == s.end() ? e : it->second;
          },
          [&](const SrcExpr::UnitVal &) -> SrcExprPtr { return e; },
          [&](const SrcExpr::IntLit &) -> SrcExprPtr { return e; },
          [&](const SrcExpr::Inj &i) -> SrcExprPtr {
            return ex::inj_at(i.tag, i.other, subst_in(i.arg, s));
          },
          [&](const SrcExpr::Case &c) -> SrcExprPtr {
            auto scr = subst_in(c.scrutinee, s);
            auto b0 = subst_under(s, {c.bind0}, c.branch0);
            auto b1 = subst_under(s, {c.bind1}, c.branch1);
            return ex::case_(std::move(scr), b0.names[0], b0.body, b1.names[0],
                             b1.body);
          },
          [&](const SrcExpr::Pair &p) -> SrcExprPtr {
            return ex::pair(subst_in(p.fst, s), subst_in(p.snd, s));
          },
          [&](const SrcExpr::LetPair &l) -> SrcExprPtr {
            auto pr = subst_in(l.pair, s);
            auto bs = subst_under(s, {l.x0, l.x1}, l.body);
            return ex::letpair(bs.names[0], bs.names[1], pr, bs.body);
          },
          [&](const SrcExpr::Fun &f) -> SrcExprPtr {
            auto bs = subst_under(s, {f.self, f.param}, f.body);
            return ex::fun(bs.names[0], bs.names[1], f.param_type, f.ret_type,
                           bs.body);
          },
          [&](const SrcExpr::App &a) -> SrcExprPtr {
            return ex::app(subst_in(a.fn, s), subst_in(a.arg, s));
          },
          [&](const SrcExpr::Fold &f) -> SrcExprPtr {
            return ex::fold(f.rec_type, subst_in(f.arg, s));
          },
          [&](const SrcExpr::Unfold &u) -> SrcExprPtr {
            return ex::unfold(u.rec_type, subst_in(u.arg, s));
          },
          [&](const SrcExpr::Tick &t) -> SrcExprPtr {
            return ex::tick(subst_in(t.arg, s));
          },
          [&](const SrcExpr::Leq &l) -> SrcExprPtr {
            return ex::leq(subst_in(l.lhs, s), subst_in(l.rhs, s));
          },
      },
      e->node);
}

bool equal_in(const SrcExprPtr &a, const SrcExprPtr &b, bool alpha,
              std::vector<std::pair<Name, Name>> &bound) {
  auto names_match = [&](const Name &na, const Name &nb) {
    if (!alpha) return na == nb;
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      if (it->first == na || it->second == nb)
        return it->first == na && it->second == nb;
    }
    return na == nb;
  };
  auto under = [&](const Name &na, const Name &nb, const SrcExprPtr &ba,
                   const SrcExprPtr &bb) {
    bound.emplace_back(na, nb);
    bool ok = equal_in(ba, bb, alpha, bound);
    bound.pop_back();
    return ok;
  };
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const SrcExpr::Var &v) {
            return names_match(v.name, std::get<SrcExpr::Var>(b->node).name);
          },
          [&](const SrcExpr::UnitVal &) { return true; },
          [&](const SrcExpr::IntLit &i) {
            return i.value == std::get<SrcExpr::IntLit>(b->node).value;
          },
          [&](const SrcExpr::Inj &i) {
            const auto &o = std::get<SrcExpr::Inj>(b->node);
            if (i.tag != o.tag) return false;
            if ((i.other == nullptr) != (o.other == nullptr)) return false;
            if (i.other && !type_equal(i.other, o.other)) return false;
            return equal_in(i.arg, o.arg, alpha, bound);
          },
          [&](const SrcExpr::Case &c) {
            const auto &o = std::get<SrcExpr::Case>(b->node);
            return equal_in(c.scrutinee, o.scrutinee, alpha, bound) &&
                   under(c.bind0, o.bind0, c.branch0, o.branch0) &&
                   under(c.bind1, o.bind1, c.branch1, o.branch1);
          },
          [&](const SrcExpr::Pair &p) {
            const auto &o = std::get<SrcExpr::Pair>(b->node);
            return equal_in(p.fst, o.fst, alpha, bound) &&
                   equal_in(p.snd, o.snd, alpha, bound);
          },
          [&](const SrcExpr::LetPair &l) {
            const auto &o = std::get<SrcExpr::LetPair>(b->node);
            if (!equal_in(l.pair, o.pair, alpha, bound)) return false;
            bound.emplace_back(l.x0, o.x0);
            bound.emplace_back(l.x1, o.x1);
            bool ok = equal_in(l.body, o.body, alpha, bound);
            bound.pop_back();
            bound.pop_back();
            return ok;
          },
          [&](const SrcExpr::Fun &f) {
            const auto &o = std::get<SrcExpr::Fun>(b->node);
            if (!type_equal(f.param_type, o.param_type) ||
                !type_equal(f.ret_type, o.ret_type))
              return false;
            bound.emplace_back(f.self, o.self);
            bound.emplace_back(f.param, o.param);
            bool ok = equal_in(f.body, o.body, alpha, bound);
            bound.pop_back();
            bound.pop_back();
            return ok;
          },
          [&](const SrcExpr::App &a2) {
            const auto &o = std::get<SrcExpr::App>(b->node);
            return equal_in(a2.fn, o.fn, alpha, bound) &&
                   equal_in(a2.arg, o.arg, alpha, bound);
          },
          [&](const SrcExpr::Fold &f) {
            const auto &o = std::get<SrcExpr::Fold>(b->node);
            return type_equal(f.rec_type, o.rec_type) &&
                   equal_in(f.arg, o.arg, alpha, bound);
          },
          [&](const SrcExpr::Unfold &u) {
            const auto &o = std::get<SrcExpr::Unfold>(b->node);
            return type_equal(u.rec_type, o.rec_type) &&
                   equal_in(u.arg, o.arg, alpha, bound);
          },
          [&](const SrcExpr::Tick &t) {
            return equal_in(t.arg, std::get<SrcExpr::Tick>(b->node).arg, alpha,
                            bound);
          },
          [&](const SrcExpr::Leq &l) {
            const auto &o = std::get<SrcExpr::Leq>(b->node);
            return equal_in(l.lhs, o.lhs, alpha, bound) &&
                   equal_in(l.rhs, o.rhs, alpha, bound);
          },
      },
      a->node);
}

}  // namespace

std::set<Name> free_vars(const SrcExprPtr &e) {
  std::set<Name> bound, out;
  free_vars_in(e, bound, out);
  return out;
}

bool expr_closed(const SrcExprPtr &e) { return free_vars(e).empty(); }

SrcExprPtr subst(const SrcExprPtr &e, const std::map<Name, SrcExprPtr> &r) {
  return subst_in(e, r);
}

bool expr_equal(const SrcExprPtr &a, const SrcExprPtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return equal_in(a, b, /*alpha=*/false, bound);
}

bool alpha_equal(const SrcExprPtr &a, const SrcExprPtr &b) {
  std::vector<std::pair<Name, Name>> bound;
  return equal_in(a, b, /*alpha=*/true, bound);
}

// ---------------------------------------------------------------------------
// Printing. The output re-parses to the identical AST.
// ---------------------------------------------------------------------------

namespace {

enum ExLevel { kExLow = 0, kExApp = 1, kExPrefix = 2, kExAtom = 3 };

struct ConsView {
  SrcExprPtr head, tail;
};

std::optional<SrcTypePtr> as_nil(const SrcExprPtr &e) {
  const auto *f = std::get_if<SrcExpr::Fold>(&e->node);
  if (!f) return std::nullopt;
  auto el = list_elem_type(f->rec_type);
  if (!el) return std::nullopt;
  const auto *i = std::get_if<SrcExpr::Inj>(&f->arg->node);
  if (!i || i->tag != 0 || !std::holds_alternative<SrcExpr::UnitVal>(i->arg->node))
    return std::nullopt;
  return *el;
}

std::optional<ConsView> as_cons(const SrcExprPtr &e) {
  const auto *f = std::get_if<SrcExpr::Fold>(&e->node);
  if (!f) return std::nullopt;
  if (!list_elem_type(f->rec_type)) return std::nullopt;
  const auto *i = std::get_if<SrcExpr::Inj>(&f->arg->node);
  if (!i || i->tag != 1) return std::nullopt;
  const auto *p = std::get_if<SrcExpr::Pair>(&i->arg->node);
  if (!p) return std::nullopt;
  return ConsView{p->fst, p->snd};
}

struct CaselistView {
  SrcExprPtr scrutinee;
  SrcExprPtr nil_branch;
  Name hd, tl;
  SrcExprPtr cons_branch;
};

// The caselist desugaring always uses "_" for the nil binder and "_z" for the
// scrutinee of the inner let; only that exact shape is re-sugared.
std::optional<CaselistView> as_caselist(const SrcExprPtr &e) {
  const auto *c = std::get_if<SrcExpr::Case>(&e->node);
  if (!c || c->bind0 != "_" || c->bind1 != "_z") return std::nullopt;
  const auto *u = std::get_if<SrcExpr::Unfold>(&c->scrutinee->node);
  if (!u || !list_elem_type(u->rec_type)) return std::nullopt;
  const auto *l = std::get_if<SrcExpr::LetPair>(&c->branch1->node);
  if (!l) return std::nullopt;
  const auto *v = std::get_if<SrcExpr::Var>(&l->pair->node);
  if (!v || v->name != "_z") return std::nullopt;
  if (free_vars(l->body).count("_z")) return std::nullopt;
  return CaselistView{u->arg, c->branch0, l->x0, l->x1, l->body};
}

void show_in(const SrcExprPtr &e, int min_level, std::ostream &os);

void show_paren(const SrcExprPtr &e, int lvl, int min_level, std::ostream &os) {
  if (lvl < min_level) {
    os << "(";
    show_in(e, kExLow, os);
    os << ")";
  } else {
    show_in(e, lvl, os);
  }
}

void show_in(const SrcExprPtr &e, int min_level, std::ostream &os) {
  auto paren = [&](int lvl, auto fn) {
    if (lvl < min_level) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  if (auto el = as_nil(e)) {
    os << "nil[" << show_type(*el) << "]";
    return;
  }
  if (auto cv = as_cons(e)) {
    os << "cons(";
    show_in(cv->head, kExLow, os);
    os << ", ";
    show_in(cv->tail, kExLow, os);
    os << ")";
    return;
  }
  if (auto cl = as_caselist(e)) {
    paren(kExLow, [&] {
      os << "caselist ";
      show_paren(cl->scrutinee, kExApp, kExApp, os);
      os << " of nil => ";
      show_in(cl->nil_branch, kExLow, os);
      os << " | cons(" << cl->hd << ", " << cl->tl << ") => ";
      show_in(cl->cons_branch, kExLow, os);
    });
    return;
  }
  std::visit(
      overloaded{
          [&](const SrcExpr::Var &v) { os << v.name; },
          [&](const SrcExpr::UnitVal &) { os << "()"; },
          [&](const SrcExpr::IntLit &i) { os << i.value; },
          [&](const SrcExpr::Inj &i) {
            if (i.other && std::holds_alternative<SrcType::Unit>(i.other->node) &&
                std::holds_alternative<SrcExpr::UnitVal>(i.arg->node)) {
              os << (i.tag == 0 ? "true" : "false");
              return;
            }
            paren(kExPrefix, [&] {
              os << (i.tag == 0 ? "inj0" : "inj1");
              if (i.other) os << "[" << show_type(i.other) << "]";
              os << " ";
              show_paren(i.arg, kExAtom, kExAtom, os);
            });
          },
          [&](const SrcExpr::Case &c) {
            paren(kExLow, [&] {
              // bind0/bind1 of "_" with bool-ish shape prints as if.
              if (c.bind0 == "_" && c.bind1 == "_") {
                os << "if ";
                show_in(c.scrutinee, kExLow, os);
                os << " then ";
                show_in(c.branch0, kExLow, os);
                os << " else ";
                show_in(c.branch1, kExLow, os);
              } else {
                os << "case ";
                show_in(c.scrutinee, kExLow, os);
                os << " of inj0 " << c.bind0 << " => ";
                show_in(c.branch0, kExLow, os);
                os << " | inj1 " << c.bind1 << " => ";
                show_in(c.branch1, kExLow, os);
              }
            });
          },
          [&](const SrcExpr::Pair &p) {
            os << "(";
            show_in(p.fst, kExLow, os);
            os << ", ";
            show_in(p.snd, kExLow, os);
            os << ")";
          },
          [&](const SrcExpr::LetPair &l) {
            paren(kExLow, [&] {
              os << "let (" << l.x0 << ", " << l.x1 << ") = ";
              show_in(l.pair, kExLow, os);
              os << " in ";
              show_in(l.body, kExLow, os);
            });
          },
          [&](const SrcExpr::Fun &f) {
            paren(kExLow, [&] {
              os << "fun " << f.self << " (" << f.param << " : "
                 << show_type(f.param_type) << ") : " << show_type(f.ret_type)
                 << " => ";
              show_in(f.body, kExLow, os);
            });
          },
          [&](const SrcExpr::App &a) {
            paren(kExApp, [&] {
              show_paren(a.fn, kExApp, kExApp, os);
              os << " ";
              show_paren(a.arg, kExAtom, kExAtom, os);
            });
          },
          [&](const SrcExpr::Fold &f) {
            paren(kExPrefix, [&] {
              os << "fold[" << show_type(f.rec_type) << "] ";
              show_paren(f.arg, kExAtom, kExAtom, os);
            });
          },
          [&](const SrcExpr::Unfold &u) {
            paren(kExPrefix, [&] {
              os << "unfold[" << show_type(u.rec_type) << "] ";
              show_paren(u.arg, kExAtom, kExAtom, os);
            });
          },
          [&](const SrcExpr::Tick &t) {
            paren(kExPrefix, [&] {
              os << "tick ";
              show_paren(t.arg, kExAtom, kExAtom, os);
            });
          },
          [&](const SrcExpr::Leq &l) {
            os << "leq(";
            show_in(l.lhs, kExLow, os);
            os << ", ";
            show_in(l.rhs, kExLow, os);
            os << ")";
          },
      },
      e->node);
}

}  // namespace

std::string show_expr(const SrcExprPtr &e) {
  std::ostringstream os;
  show_in(e, kExLow, os);
  return os.str();
}

SrcExprPtr strip_ticks(const SrcExprPtr &e) {
  return std::visit(
      overloaded{
          [&](const SrcExpr::Var &) { return e; },
          [&](const SrcExpr::UnitVal &) { return e; },
          [&](const SrcExpr::IntLit &) { return e; },
          [&](const SrcExpr::Inj &i) {
            return ex::inj_at(i.tag, i.other, strip_ticks(i.arg));
          },
          [&](const SrcExpr::Case &c) {
            return ex::case_(strip_ticks(c.scrutinee), c.bind0,
                             strip_ticks(c.branch0), c.bind1,
                             strip_ticks(c.branch1));
          },
          [&](const SrcExpr::Pair &p) {
            return ex::pair(strip_ticks(p.fst), strip_ticks(p.snd));
          },
          [&](const SrcExpr::LetPair &l) {
            return ex::letpair(l.x0, l.x1, strip_ticks(l.pair),
                               strip_ticks(l.body));
          },
          [&](const SrcExpr::Fun &f) {
            return ex::fun(f.self, f.param, f.param_type, f.ret_type,
                           strip_ticks(f.body));
          },
          [&](const SrcExpr::App &a) {
            return ex::app(strip_ticks(a.fn), strip_ticks(a.arg));
          },
          [&](const SrcExpr::Fold &f) {
            return ex::fold(f.rec_type, strip_ticks(f.arg));
          },
          [&](const SrcExpr::Unfold &u) {
            return ex::unfold(u.rec_type, strip_ticks(u.arg));
          },
          [&](const SrcExpr::Tick &t) { return strip_ticks(t.arg); },
          [&](const SrcExpr::Leq &l) {
            return ex::leq(strip_ticks(l.lhs), strip_ticks(l.rhs));
          },
      },
      e->node);
}

}  // namespace recurrify

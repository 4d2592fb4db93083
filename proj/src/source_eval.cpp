#include "recurrify/source_eval.hpp"

#include <variant>
#include <vector>

#include "recurrify/errors.hpp"

namespace recurrify {

namespace {

struct InjK {
  int tag;
  SrcTypePtr other;
};
struct CaseK {
  Name b0;
  SrcExprPtr e0;
  Name b1;
  SrcExprPtr e1;
};
struct PairK1 {
  SrcExprPtr snd;
};
struct PairK2 {
  SrcExprPtr fst_val;
};
struct LetPairK {
  Name x0, x1;
  SrcExprPtr body;
};
struct AppK1 {
  SrcExprPtr arg;
};
struct AppK2 {
  SrcExprPtr fn_val;
};
struct FoldK {
  SrcTypePtr type;
};
struct UnfoldK {};
struct LeqK1 {
  SrcExprPtr rhs;
};
struct LeqK2 {
  SrcExprPtr lhs_val;
};

using Frame = std::variant<InjK, CaseK, PairK1, PairK2, LetPairK, AppK1, AppK2,
                           FoldK, UnfoldK, LeqK1, LeqK2>;

bool is_axiom(const SrcExprPtr &e) {
  return std::holds_alternative<SrcExpr::UnitVal>(e->node) ||
         std::holds_alternative<SrcExpr::IntLit>(e->node) ||
         std::holds_alternative<SrcExpr::Fun>(e->node);
}

}  // namespace

Outcome eval(const SrcExprPtr &root, Fuel fuel) {
  std::vector<Frame> stack;
  Cost cost = 0;
  SrcExprPtr cur = root;
  bool returning = false;
  SrcExprPtr retval;

  for (;;) {
    if (!returning) {
      // About to apply a rule for `cur`.
      if (fuel == 0) return Outcome{false, nullptr, cost};
      if (is_axiom(cur)) {
        --fuel;
        returning = true;
        retval = cur;
        continue;
      }
      // Compound rules need at least one premise node beyond their own.
      if (fuel < 2) return Outcome{false, nullptr, cost};
      --fuel;
      std::visit(
          overloaded{
              [&](const SrcExpr::Inj &i) {
                stack.push_back(InjK{i.tag, i.other});
                cur = i.arg;
              },
              [&](const SrcExpr::Case &c) {
                stack.push_back(CaseK{c.bind0, c.branch0, c.bind1, c.branch1});
                cur = c.scrutinee;
              },
              [&](const SrcExpr::Pair &p) {
                stack.push_back(PairK1{p.snd});
                cur = p.fst;
              },
              [&](const SrcExpr::LetPair &l) {
                stack.push_back(LetPairK{l.x0, l.x1, l.body});
                cur = l.pair;
              },
              [&](const SrcExpr::App &a) {
                stack.push_back(AppK1{a.arg});
                cur = a.fn;
              },
              [&](const SrcExpr::Fold &f) {
                stack.push_back(FoldK{f.rec_type});
                cur = f.arg;
              },
              [&](const SrcExpr::Unfold &u) {
                stack.push_back(UnfoldK{});
                cur = u.arg;
              },
              [&](const SrcExpr::Tick &t) {
                ++cost;
                cur = t.arg;  // tick forwards the value unchanged
              },
              [&](const SrcExpr::Leq &l) {
                stack.push_back(LeqK1{l.rhs});
                cur = l.lhs;
              },
              [&](const SrcExpr::Var &v) {
                throw EvalError("free variable " + v.name);
              },
              [&](const auto &) { throw EvalError("unreachable"); },
          },
          cur->node);
      continue;
    }

    // Returning `retval` to the innermost frame.
    if (stack.empty()) return Outcome{true, retval, cost};
    Frame fr = std::move(stack.back());
    stack.pop_back();
    std::visit(
        overloaded{
            [&](const InjK &k) { retval = ex::inj_at(k.tag, k.other, retval); },
            [&](const CaseK &k) {
              const auto *i = std::get_if<SrcExpr::Inj>(&retval->node);
              if (!i) throw EvalError("case scrutinee not an injection");
              const Name &b = i->tag == 0 ? k.b0 : k.b1;
              const SrcExprPtr &br = i->tag == 0 ? k.e0 : k.e1;
              cur = subst(br, {{b, i->arg}});
              returning = false;
            },
            [&](const PairK1 &k) {
              stack.push_back(PairK2{retval});
              cur = k.snd;
              returning = false;
            },
            [&](const PairK2 &k) { retval = ex::pair(k.fst_val, retval); },
            [&](const LetPairK &k) {
              const auto *p = std::get_if<SrcExpr::Pair>(&retval->node);
              if (!p) throw EvalError("let pattern scrutinee not a pair");
              cur = subst(k.body, {{k.x0, p->fst}, {k.x1, p->snd}});
              returning = false;
            },
            [&](const AppK1 &k) {
              stack.push_back(AppK2{retval});
              cur = k.arg;
              returning = false;
            },
            [&](const AppK2 &k) {
              const auto *f = std::get_if<SrcExpr::Fun>(&k.fn_val->node);
              if (!f) throw EvalError("applied a non-function value");
              cur = subst(f->body, {{f->self, k.fn_val}, {f->param, retval}});
              returning = false;
            },
            [&](const FoldK &k) { retval = ex::fold(k.type, retval); },
            [&](const UnfoldK &) {
              const auto *f = std::get_if<SrcExpr::Fold>(&retval->node);
              if (!f) throw EvalError("unfold of a non-fold value");
              retval = f->arg;
            },
            [&](const LeqK1 &k) {
              stack.push_back(LeqK2{retval});
              cur = k.rhs;
              returning = false;
            },
            [&](const LeqK2 &k) {
              const auto *a = std::get_if<SrcExpr::IntLit>(&k.lhs_val->node);
              const auto *b = std::get_if<SrcExpr::IntLit>(&retval->node);
              if (!a || !b) throw EvalError("leq on non-integers");
              retval = a->value <= b->value ? ex::truev() : ex::falsev();
            },
        },
        fr);
  }
}

bool value_self_eval_check(const SrcExprPtr &v) {
  if (!is_value(v) || !expr_closed(v)) return false;
  Outcome o = eval(v, 1u << 20);
  return o.complete && o.cost == 0 && expr_equal(o.value, v);
}

bool cost_monotone_check(const SrcExprPtr &e, const std::vector<Fuel> &ladder) {
  Outcome full = eval(e, 1u << 24);
  if (!full.complete) return false;
  Cost prev = 0;
  for (Fuel f : ladder) {
    Outcome o = eval(e, f);
    Cost c = o.cost;
    if (c < prev) return false;
    if (c > full.cost) return false;
    prev = c;
  }
  return true;
}

}  // namespace recurrify

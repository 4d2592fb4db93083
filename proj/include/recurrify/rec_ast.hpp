#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "recurrify/source_ast.hpp"

namespace recurrify {

// ---------------------------------------------------------------------------
// Recurrence language types: source types plus the cost type C and the
// complexity monad C(sigma).
// ---------------------------------------------------------------------------

struct RecType;
using RecTypePtr = std::shared_ptr<const RecType>;

struct RecType {
  struct Var {
    Name name;
  };
  struct CostC {};
  struct Unit {};
  struct Int {};
  struct Sum {
    RecTypePtr left, right;
  };
  struct Prod {
    RecTypePtr left, right;
  };
  struct Arrow {
    RecTypePtr dom, cod;
  };
  struct Rec {
    Name var;
    RecTypePtr body;
  };
  struct Cmplx {
    RecTypePtr inner;
  };
  using Node =
      std::variant<Var, CostC, Unit, Int, Sum, Prod, Arrow, Rec, Cmplx>;
  Node node;
};

namespace rty {
RecTypePtr var(Name n);
RecTypePtr cost();
RecTypePtr unit();
RecTypePtr integer();
RecTypePtr sum(RecTypePtr l, RecTypePtr r);
RecTypePtr prod(RecTypePtr l, RecTypePtr r);
RecTypePtr arrow(RecTypePtr d, RecTypePtr c);
RecTypePtr rec(Name v, RecTypePtr b);
RecTypePtr cmplx(RecTypePtr inner);
RecTypePtr boolean();
RecTypePtr list(RecTypePtr el);
}  // namespace rty

bool rec_type_equal(const RecTypePtr &a, const RecTypePtr &b);
bool rec_type_closed(const RecTypePtr &t);
std::set<Name> rec_free_type_vars(const RecTypePtr &t);
RecTypePtr rec_subst_type(const RecTypePtr &body, const RecTypePtr &target,
                          const Name &var);
// A potential type contains no Cmplx anywhere under another Cmplx, and is
// itself not a Cmplx; used to check extracted types.
bool is_potential_type(const RecTypePtr &t);
std::optional<RecTypePtr> rec_list_elem_type(const RecTypePtr &t);
bool rec_is_bool_type(const RecTypePtr &t);
std::string show_rec_type(const RecTypePtr &t);

// ---------------------------------------------------------------------------
// Recurrence language expressions (with the two model-notation complexity
// builders the simplifier normalizes into: WithCost and PlusC).
// ---------------------------------------------------------------------------

struct RecExpr;
using RecExprPtr = std::shared_ptr<const RecExpr>;

struct RecExpr {
  struct Var {
    Name name;
  };
  struct Zero {};
  struct One {};
  struct Plus {
    RecExprPtr lhs, rhs;
  };
  struct UnitVal {};
  struct IntLit {
    std::int64_t value;
  };
  struct Inj {
    int tag;
    RecTypePtr other;  // optional, as in the source language
    RecExprPtr arg;
  };
  struct Case {
    RecExprPtr scrutinee;
    Name bind0;
    RecExprPtr branch0;
    Name bind1;
    RecExprPtr branch1;
  };
  struct Pair {
    RecExprPtr fst, snd;
  };
  struct LetPair {
    Name x0, x1;
    RecExprPtr pair, body;
  };
  struct Lam {
    Name param;
    RecTypePtr param_type;  // required for typechecking/denotation
    RecExprPtr body;
  };
  struct App {
    RecExprPtr fn, arg;
  };
  struct Fix {
    Name name;
    RecTypePtr type;  // type of the fixpoint variable
    RecExprPtr body;
  };
  struct Fold {
    RecTypePtr rec_type;
    RecExprPtr arg;
  };
  struct Unfold {
    RecTypePtr rec_type;
    RecExprPtr arg;
  };
  struct Val {
    RecExprPtr arg;
  };
  struct Bind {  // n-ary monadic bind
    std::vector<Name> names;
    std::vector<RecExprPtr> sources;
    RecExprPtr body;
  };
  struct Incr {
    RecExprPtr arg;
  };
  struct CostProj {
    RecExprPtr arg;
  };
  struct PotProj {
    RecExprPtr arg;
  };
  struct WithCost {  // complexity with explicit cost and potential
    RecExprPtr cost, pot;
  };
  struct PlusC {  // add a cost onto a complexity
    RecExprPtr cost, cmplx;
  };
  struct Leq {
    RecExprPtr lhs, rhs;
  };
  using Node = std::variant<Var, Zero, One, Plus, UnitVal, IntLit, Inj, Case,
                            Pair, LetPair, Lam, App, Fix, Fold, Unfold, Val,
                            Bind, Incr, CostProj, PotProj, WithCost, PlusC,
                            Leq>;
  Node node;
};

namespace rx {
RecExprPtr var(Name n);
RecExprPtr zero();
RecExprPtr one();
RecExprPtr plus(RecExprPtr a, RecExprPtr b);
RecExprPtr unitval();
RecExprPtr intlit(std::int64_t v);
RecExprPtr inj(int tag, RecExprPtr e);
RecExprPtr inj_at(int tag, RecTypePtr other, RecExprPtr e);
RecExprPtr case_(RecExprPtr s, Name b0, RecExprPtr e0, Name b1, RecExprPtr e1);
RecExprPtr pair(RecExprPtr a, RecExprPtr b);
RecExprPtr letpair(Name x0, Name x1, RecExprPtr p, RecExprPtr body);
RecExprPtr lam(Name param, RecTypePtr pt, RecExprPtr body);
RecExprPtr app(RecExprPtr f, RecExprPtr a);
RecExprPtr fix(Name n, RecTypePtr t, RecExprPtr body);
RecExprPtr fold(RecTypePtr t, RecExprPtr e);
RecExprPtr unfold(RecTypePtr t, RecExprPtr e);
RecExprPtr val(RecExprPtr e);
RecExprPtr bind(std::vector<Name> names, std::vector<RecExprPtr> sources,
                RecExprPtr body);
RecExprPtr incr(RecExprPtr e);
RecExprPtr costp(RecExprPtr e);
RecExprPtr potp(RecExprPtr e);
RecExprPtr withcost(RecExprPtr cost, RecExprPtr pot);
RecExprPtr plusc(RecExprPtr cost, RecExprPtr cmplx);
RecExprPtr leq(RecExprPtr a, RecExprPtr b);
RecExprPtr nil(RecTypePtr elem);
RecExprPtr cons(RecTypePtr elem, RecExprPtr hd, RecExprPtr tl);
}  // namespace rx

std::set<Name> rec_free_vars(const RecExprPtr &e);
RecExprPtr rec_subst(const RecExprPtr &e,
                     const std::map<Name, RecExprPtr> &replacements);
bool rec_expr_equal(const RecExprPtr &a, const RecExprPtr &b);
bool rec_alpha_equal(const RecExprPtr &a, const RecExprPtr &b);

// Pretty printer using the usual recurrence notation: val, p <- e; e',
// e_c, e_p, incr, withcost, +c, and nil/cons/caselist/if sugar.
std::string show_rec(const RecExprPtr &e);

}  // namespace recurrify

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace recurrify {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Name = std::string;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct SrcType;
using SrcTypePtr = std::shared_ptr<const SrcType>;

struct SrcType {
  struct Var {
    Name name;
  };
  struct Unit {};
  struct Int {};
  struct Sum {
    SrcTypePtr left, right;
  };
  struct Prod {
    SrcTypePtr left, right;
  };
  struct Arrow {
    SrcTypePtr dom, cod;
  };
  struct Rec {
    Name var;
    SrcTypePtr body;
  };
  using Node = std::variant<Var, Unit, Int, Sum, Prod, Arrow, Rec>;
  Node node;
};

namespace ty {
SrcTypePtr var(Name n);
SrcTypePtr unit();
SrcTypePtr integer();
SrcTypePtr sum(SrcTypePtr l, SrcTypePtr r);
SrcTypePtr prod(SrcTypePtr l, SrcTypePtr r);
SrcTypePtr arrow(SrcTypePtr d, SrcTypePtr c);
SrcTypePtr rec(Name v, SrcTypePtr b);
SrcTypePtr boolean();            // unit + unit
SrcTypePtr list(SrcTypePtr el);  // mu a . unit + (el * a)
}  // namespace ty

bool type_equal(const SrcTypePtr &a, const SrcTypePtr &b);  // alpha-equivalence
bool type_closed(const SrcTypePtr &t);
std::set<Name> free_type_vars(const SrcTypePtr &t);

// Capture-avoiding substitution body[target/var].
SrcTypePtr subst_type(const SrcTypePtr &body, const SrcTypePtr &target,
                      const Name &var);

// True iff `body` matches F ::= var | closed sigma | F + F | F * F.
bool is_polynomial_functor(const SrcTypePtr &body, const Name &var);

// Recognize mu a . unit + (el * a); returns the element type.
std::optional<SrcTypePtr> list_elem_type(const SrcTypePtr &t);
bool is_bool_type(const SrcTypePtr &t);

std::string show_type(const SrcTypePtr &t);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct SrcExpr;
using SrcExprPtr = std::shared_ptr<const SrcExpr>;

struct SrcExpr {
  struct Var {
    Name name;
  };
  struct UnitVal {};
  struct IntLit {
    std::int64_t value;
  };
  struct Inj {
    int tag;  // 0 or 1
    SrcTypePtr other;  // type of the summand not taken; null when the
                       // surrounding context determines it
    SrcExprPtr arg;
  };
  struct Case {
    SrcExprPtr scrutinee;
    Name bind0;
    SrcExprPtr branch0;
    Name bind1;
    SrcExprPtr branch1;
  };
  struct Pair {
    SrcExprPtr fst, snd;
  };
  struct LetPair {
    Name x0, x1;
    SrcExprPtr pair;
    SrcExprPtr body;
  };
  struct Fun {
    Name self;
    Name param;
    SrcTypePtr param_type;
    SrcTypePtr ret_type;
    SrcExprPtr body;
  };
  struct App {
    SrcExprPtr fn, arg;
  };
  struct Fold {
    SrcTypePtr rec_type;  // the mu type being folded into
    SrcExprPtr arg;
  };
  struct Unfold {
    SrcTypePtr rec_type;
    SrcExprPtr arg;
  };
  struct Tick {
    SrcExprPtr arg;
  };
  struct Leq {  // built-in int comparison, result bool
    SrcExprPtr lhs, rhs;
  };
  using Node = std::variant<Var, UnitVal, IntLit, Inj, Case, Pair, LetPair,
                            Fun, App, Fold, Unfold, Tick, Leq>;
  Node node;
};

namespace ex {
SrcExprPtr var(Name n);
SrcExprPtr unitval();
SrcExprPtr intlit(std::int64_t v);
SrcExprPtr inj(int tag, SrcExprPtr e);
SrcExprPtr inj_at(int tag, SrcTypePtr other, SrcExprPtr e);
SrcExprPtr case_(SrcExprPtr s, Name b0, SrcExprPtr e0, Name b1, SrcExprPtr e1);
SrcExprPtr pair(SrcExprPtr a, SrcExprPtr b);
SrcExprPtr letpair(Name x0, Name x1, SrcExprPtr p, SrcExprPtr body);
SrcExprPtr fun(Name self, Name param, SrcTypePtr pt, SrcTypePtr rt,
               SrcExprPtr body);
SrcExprPtr app(SrcExprPtr f, SrcExprPtr a);
SrcExprPtr fold(SrcTypePtr t, SrcExprPtr e);
SrcExprPtr unfold(SrcTypePtr t, SrcExprPtr e);
SrcExprPtr tick(SrcExprPtr e);
SrcExprPtr leq(SrcExprPtr a, SrcExprPtr b);

// List / bool sugar, expanded to core forms.
SrcExprPtr nil(SrcTypePtr elem);
SrcExprPtr cons(SrcTypePtr elem, SrcExprPtr hd, SrcExprPtr tl);
SrcExprPtr truev();
SrcExprPtr falsev();
SrcExprPtr list_lit(SrcTypePtr elem, const std::vector<SrcExprPtr> &items);
SrcExprPtr int_list(const std::vector<std::int64_t> &items);
}  // namespace ex

bool is_value(const SrcExprPtr &e);
std::set<Name> free_vars(const SrcExprPtr &e);
bool expr_closed(const SrcExprPtr &e);

// Simultaneous capture-avoiding substitution.
SrcExprPtr subst(const SrcExprPtr &e,
                 const std::map<Name, SrcExprPtr> &replacements);

bool expr_equal(const SrcExprPtr &a, const SrcExprPtr &b);  // structural
bool alpha_equal(const SrcExprPtr &a, const SrcExprPtr &b);

// Concrete syntax; parse(show_expr(e)) reproduces e exactly.
std::string show_expr(const SrcExprPtr &e);

// Rebuilds e with every Tick removed (used by the "ticks are the only cost"
// property tests).
SrcExprPtr strip_ticks(const SrcExprPtr &e);

}  // namespace recurrify

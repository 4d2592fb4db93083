#include "recurrify/source_parser.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <variant>

#include "recurrify/errors.hpp"

namespace recurrify {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Colon,
  Dot,
  Bar,
  Plus,
  Star,
  Arrow,     // ->
  FatArrow,  // =>
  Equal,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string &src) : src_(src) { advance(); }

  const Token &peek() const { return cur_; }

  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, cur_.line, cur_.col);
  }

 private:
  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_ = {Tok::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
          text += d;
          bump();
        } else {
          break;
        }
      }
      cur_ = {Tok::Ident, text, cur_.line, cur_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        text += src_[pos_];
        bump();
      }
      cur_ = {Tok::Int, text, cur_.line, cur_.col};
      return;
    }
    auto two = src_.substr(pos_, 2);
    if (two == "->") {
      bump();
      bump();
      cur_ = {Tok::Arrow, "->", cur_.line, cur_.col};
      return;
    }
    if (two == "=>") {
      bump();
      bump();
      cur_ = {Tok::FatArrow, "=>", cur_.line, cur_.col};
      return;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '.': k = Tok::Dot; break;
      case '|': k = Tok::Bar; break;
      case '+': k = Tok::Plus; break;
      case '*': k = Tok::Star; break;
      case '=': k = Tok::Equal; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_,
                         col_);
    }
    bump();
    cur_ = {k, std::string(1, c), cur_.line, cur_.col};
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string &src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_{Tok::End, "", 1, 1};
};

bool is_kw(const Token &t, const char *kw) {
  return t.kind == Tok::Ident && t.text == kw;
}

// ---------------------------------------------------------------------------
// Surface syntax: parsed shape before elaboration expands the sugar.
// ---------------------------------------------------------------------------

struct Surf;
using SurfPtr = std::shared_ptr<Surf>;

struct Surf {
  struct Var { Name name; };
  struct Unit {};
  struct IntLit { std::int64_t value; };
  struct True {};
  struct False {};
  struct Inj { int tag; SrcTypePtr other; SurfPtr arg; };
  struct Case { SurfPtr scr; Name b0; SurfPtr e0; Name b1; SurfPtr e1; };
  struct Pair { SurfPtr fst, snd; };
  struct LetPair { Name x0, x1; SurfPtr pair, body; };
  struct Fun { Name self, param; SrcTypePtr pt, rt; SurfPtr body; };
  struct App { SurfPtr fn, arg; };
  struct Fold { SrcTypePtr type; SurfPtr arg; };
  struct Unfold { SrcTypePtr type; SurfPtr arg; };
  struct Tick { SurfPtr arg; };
  struct Leq { SurfPtr lhs, rhs; };
  struct Nil { SrcTypePtr elem; };
  struct Cons { SurfPtr hd, tl; };
  struct Caselist { SurfPtr scr; SurfPtr nil_branch; Name hd, tl; SurfPtr cons_branch; };
  struct If { SurfPtr cond, then_e, else_e; };
  struct ListLit { std::vector<SurfPtr> items; };
  using Node = std::variant<Var, Unit, IntLit, True, False, Inj, Case, Pair,
                            LetPair, Fun, App, Fold, Unfold, Tick, Leq, Nil,
                            Cons, Caselist, If, ListLit>;
  Node node;
  int line = 0, col = 0;
};

template <typename T>
SurfPtr mk(T n, const Token &at) {
  auto s = std::make_shared<Surf>();
  s->node = std::move(n);
  s->line = at.line;
  s->col = at.col;
  return s;
}

// ---------------------------------------------------------------------------
// Type parser
// ---------------------------------------------------------------------------

SrcTypePtr parse_type(Lexer &lx);

SrcTypePtr parse_type_atom(Lexer &lx) {
  Token t = lx.peek();
  if (t.kind == Tok::LParen) {
    lx.next();
    auto ty = parse_type(lx);
    if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' in type");
    lx.next();
    return ty;
  }
  if (t.kind == Tok::Ident) {
    if (t.text == "unit") { lx.next(); return ty::unit(); }
    if (t.text == "int") { lx.next(); return ty::integer(); }
    if (t.text == "bool") { lx.next(); return ty::boolean(); }
    if (t.text == "list") {
      lx.next();
      return ty::list(parse_type_atom(lx));
    }
    if (t.text == "mu") {
      lx.next();
      Token v = lx.next();
      if (v.kind != Tok::Ident) lx.fail("expected type variable after 'mu'");
      if (lx.peek().kind != Tok::Dot) lx.fail("expected '.' in mu type");
      lx.next();
      return ty::rec(v.text, parse_type(lx));
    }
    lx.next();
    return ty::var(t.text);
  }
  lx.fail("expected a type");
}

SrcTypePtr parse_type_prod(Lexer &lx) {
  auto l = parse_type_atom(lx);
  if (lx.peek().kind == Tok::Star) {
    lx.next();
    return ty::prod(l, parse_type_prod(lx));
  }
  return l;
}

SrcTypePtr parse_type_sum(Lexer &lx) {
  auto l = parse_type_prod(lx);
  if (lx.peek().kind == Tok::Plus) {
    lx.next();
    return ty::sum(l, parse_type_sum(lx));
  }
  return l;
}

SrcTypePtr parse_type(Lexer &lx) {
  auto l = parse_type_sum(lx);
  if (lx.peek().kind == Tok::Arrow) {
    lx.next();
    return ty::arrow(l, parse_type(lx));
  }
  return l;
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

SurfPtr parse_expr_s(Lexer &lx);

Name parse_binder(Lexer &lx) {
  Token t = lx.next();
  if (t.kind != Tok::Ident) throw ParseError("expected a binder", t.line, t.col);
  return t.text;
}

SrcTypePtr parse_bracket_type(Lexer &lx) {
  if (lx.peek().kind != Tok::LBracket) lx.fail("expected '[' with type");
  lx.next();
  auto t = parse_type(lx);
  if (lx.peek().kind != Tok::RBracket) lx.fail("expected ']' after type");
  lx.next();
  return t;
}

std::optional<SrcTypePtr> parse_optional_bracket_type(Lexer &lx) {
  if (lx.peek().kind != Tok::LBracket) return std::nullopt;
  return parse_bracket_type(lx);
}

SurfPtr parse_atom(Lexer &lx) {
  Token t = lx.peek();
  switch (t.kind) {
    case Tok::Int: {
      lx.next();
      return mk(Surf::IntLit{std::stoll(t.text)}, t);
    }
    case Tok::LParen: {
      lx.next();
      if (lx.peek().kind == Tok::RParen) {
        lx.next();
        return mk(Surf::Unit{}, t);
      }
      auto e = parse_expr_s(lx);
      if (lx.peek().kind == Tok::Comma) {
        lx.next();
        auto e2 = parse_expr_s(lx);
        if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' after pair");
        lx.next();
        return mk(Surf::Pair{e, e2}, t);
      }
      if (lx.peek().kind != Tok::RParen) lx.fail("expected ')'");
      lx.next();
      return e;
    }
    case Tok::LBracket: {
      lx.next();
      std::vector<SurfPtr> items;
      if (lx.peek().kind == Tok::RBracket)
        lx.fail("empty list literal; use nil[T]");
      items.push_back(parse_expr_s(lx));
      while (lx.peek().kind == Tok::Comma) {
        lx.next();
        items.push_back(parse_expr_s(lx));
      }
      if (lx.peek().kind != Tok::RBracket) lx.fail("expected ']'");
      lx.next();
      return mk(Surf::ListLit{std::move(items)}, t);
    }
    case Tok::Ident: {
      if (t.text == "true") { lx.next(); return mk(Surf::True{}, t); }
      if (t.text == "false") { lx.next(); return mk(Surf::False{}, t); }
      if (t.text == "nil") {
        lx.next();
        return mk(Surf::Nil{parse_bracket_type(lx)}, t);
      }
      if (t.text == "cons") {
        lx.next();
        if (lx.peek().kind != Tok::LParen) lx.fail("expected '(' after cons");
        lx.next();
        auto hd = parse_expr_s(lx);
        if (lx.peek().kind != Tok::Comma) lx.fail("expected ',' in cons");
        lx.next();
        auto tl = parse_expr_s(lx);
        if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' after cons");
        lx.next();
        return mk(Surf::Cons{hd, tl}, t);
      }
      if (t.text == "leq") {
        lx.next();
        if (lx.peek().kind != Tok::LParen) lx.fail("expected '(' after leq");
        lx.next();
        auto a = parse_expr_s(lx);
        if (lx.peek().kind != Tok::Comma) lx.fail("expected ',' in leq");
        lx.next();
        auto b = parse_expr_s(lx);
        if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' after leq");
        lx.next();
        return mk(Surf::Leq{a, b}, t);
      }
      if (t.text == "_")
        throw ParseError("wildcard '_' cannot be used as an expression", t.line,
                         t.col);
      lx.next();
      return mk(Surf::Var{t.text}, t);
    }
    default:
      throw ParseError("expected an expression", t.line, t.col);
  }
}

bool starts_atom(const Token &t) {
  switch (t.kind) {
    case Tok::Int:
    case Tok::LParen:
    case Tok::LBracket:
      return true;
    case Tok::Ident:
      // Keywords that begin non-atom expression forms.
      return t.text != "of" && t.text != "then" && t.text != "else" &&
             t.text != "in" && t.text != "fun" && t.text != "let" &&
             t.text != "if" && t.text != "case" && t.text != "caselist" &&
             t.text != "inj0" && t.text != "inj1" && t.text != "fold" &&
             t.text != "unfold" && t.text != "tick" && t.text != "def" &&
             t.text != "main";
    default:
      return false;
  }
}

SurfPtr parse_prefix(Lexer &lx) {
  Token t = lx.peek();
  if (t.kind == Tok::Ident) {
    if (t.text == "inj0" || t.text == "inj1") {
      lx.next();
      int tag = t.text == "inj0" ? 0 : 1;
      auto other = parse_optional_bracket_type(lx);
      auto arg = parse_prefix(lx);
      return mk(Surf::Inj{tag, other.value_or(nullptr), arg}, t);
    }
    if (t.text == "fold") {
      lx.next();
      auto ty2 = parse_bracket_type(lx);
      return mk(Surf::Fold{ty2, parse_prefix(lx)}, t);
    }
    if (t.text == "unfold") {
      lx.next();
      auto ty2 = parse_bracket_type(lx);
      return mk(Surf::Unfold{ty2, parse_prefix(lx)}, t);
    }
    if (t.text == "tick") {
      lx.next();
      return mk(Surf::Tick{parse_prefix(lx)}, t);
    }
  }
  return parse_atom(lx);
}

SurfPtr parse_app(Lexer &lx) {
  auto e = parse_prefix(lx);
  while (starts_atom(lx.peek())) {
    Token t = lx.peek();
    auto arg = parse_atom(lx);
    e = mk(Surf::App{e, arg}, t);
  }
  return e;
}

SurfPtr parse_expr_s(Lexer &lx) {
  Token t = lx.peek();
  if (is_kw(t, "fun")) {
    lx.next();
    Name self = parse_binder(lx);
    if (lx.peek().kind != Tok::LParen) lx.fail("expected '(' after fun name");
    lx.next();
    Name param = parse_binder(lx);
    if (lx.peek().kind != Tok::Colon) lx.fail("expected ':' in fun parameter");
    lx.next();
    auto pt = parse_type(lx);
    if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' after parameter");
    lx.next();
    if (lx.peek().kind != Tok::Colon) lx.fail("expected ':' before result type");
    lx.next();
    auto rt = parse_type(lx);
    if (lx.peek().kind != Tok::FatArrow) lx.fail("expected '=>' in fun");
    lx.next();
    return mk(Surf::Fun{self, param, pt, rt, parse_expr_s(lx)}, t);
  }
  if (is_kw(t, "let")) {
    lx.next();
    if (lx.peek().kind != Tok::LParen) lx.fail("expected '(' after let");
    lx.next();
    Name x0 = parse_binder(lx);
    if (lx.peek().kind != Tok::Comma) lx.fail("expected ',' in let pattern");
    lx.next();
    Name x1 = parse_binder(lx);
    if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' in let pattern");
    lx.next();
    if (lx.peek().kind != Tok::Equal) lx.fail("expected '=' in let");
    lx.next();
    auto p = parse_expr_s(lx);
    if (!is_kw(lx.peek(), "in")) lx.fail("expected 'in'");
    lx.next();
    return mk(Surf::LetPair{x0, x1, p, parse_expr_s(lx)}, t);
  }
  if (is_kw(t, "if")) {
    lx.next();
    auto c = parse_expr_s(lx);
    if (!is_kw(lx.peek(), "then")) lx.fail("expected 'then'");
    lx.next();
    auto a = parse_expr_s(lx);
    if (!is_kw(lx.peek(), "else")) lx.fail("expected 'else'");
    lx.next();
    auto b = parse_expr_s(lx);
    return mk(Surf::If{c, a, b}, t);
  }
  if (is_kw(t, "case")) {
    lx.next();
    auto scr = parse_expr_s(lx);
    if (!is_kw(lx.peek(), "of")) lx.fail("expected 'of'");
    lx.next();
    if (!is_kw(lx.peek(), "inj0")) lx.fail("expected 'inj0' branch");
    lx.next();
    Name b0 = parse_binder(lx);
    if (lx.peek().kind != Tok::FatArrow) lx.fail("expected '=>'");
    lx.next();
    auto e0 = parse_expr_s(lx);
    if (lx.peek().kind != Tok::Bar) lx.fail("expected '|'");
    lx.next();
    if (!is_kw(lx.peek(), "inj1")) lx.fail("expected 'inj1' branch");
    lx.next();
    Name b1 = parse_binder(lx);
    if (lx.peek().kind != Tok::FatArrow) lx.fail("expected '=>'");
    lx.next();
    auto e1 = parse_expr_s(lx);
    return mk(Surf::Case{scr, b0, e0, b1, e1}, t);
  }
  if (is_kw(t, "caselist")) {
    lx.next();
    auto scr = parse_expr_s(lx);
    if (!is_kw(lx.peek(), "of")) lx.fail("expected 'of'");
    lx.next();
    if (!is_kw(lx.peek(), "nil")) lx.fail("expected 'nil' branch");
    lx.next();
    if (lx.peek().kind != Tok::FatArrow) lx.fail("expected '=>'");
    lx.next();
    auto e0 = parse_expr_s(lx);
    if (lx.peek().kind != Tok::Bar) lx.fail("expected '|'");
    lx.next();
    if (!is_kw(lx.peek(), "cons")) lx.fail("expected 'cons' branch");
    lx.next();
    if (lx.peek().kind != Tok::LParen) lx.fail("expected '(' in cons pattern");
    lx.next();
    Name hd = parse_binder(lx);
    if (lx.peek().kind != Tok::Comma) lx.fail("expected ',' in cons pattern");
    lx.next();
    Name tl = parse_binder(lx);
    if (lx.peek().kind != Tok::RParen) lx.fail("expected ')' in cons pattern");
    lx.next();
    if (lx.peek().kind != Tok::FatArrow) lx.fail("expected '=>'");
    lx.next();
    auto e1 = parse_expr_s(lx);
    return mk(Surf::Caselist{scr, e0, hd, tl, e1}, t);
  }
  return parse_app(lx);
}

// ---------------------------------------------------------------------------
// Bidirectional elaboration: expands sugar and synthesizes/checks types.
// ---------------------------------------------------------------------------

struct Elab {
  std::map<Name, SrcTypePtr> ctx;

  [[noreturn]] void fail(const Surf &at, const std::string &msg) const {
    throw ParseError(msg, at.line, at.col);
  }

  struct Out {
    SrcExprPtr expr;
    SrcTypePtr type;
  };

  Out synth(const SurfPtr &s) {
    return std::visit(
        overloaded{
            [&](const Surf::Var &v) -> Out {
              auto it = ctx.find(v.name);
              if (it == ctx.end()) fail(*s, "unknown identifier '" + v.name + "'");
              return {ex::var(v.name), it->second};
            },
            [&](const Surf::Unit &) -> Out { return {ex::unitval(), ty::unit()}; },
            [&](const Surf::IntLit &i) -> Out {
              return {ex::intlit(i.value), ty::integer()};
            },
            [&](const Surf::True &) -> Out { return {ex::truev(), ty::boolean()}; },
            [&](const Surf::False &) -> Out {
              return {ex::falsev(), ty::boolean()};
            },
            [&](const Surf::Inj &i) -> Out {
              if (!i.other)
                fail(*s,
                     "cannot infer the sum type of a bare injection; "
                     "annotate as inj" +
                         std::to_string(i.tag) + "[T] or use a checked position");
              auto a = synth(i.arg);
              auto sum = i.tag == 0 ? ty::sum(a.type, i.other)
                                    : ty::sum(i.other, a.type);
              return {ex::inj_at(i.tag, i.other, a.expr), sum};
            },
            [&](const Surf::Case &c) -> Out {
              auto scr = synth(c.scr);
              const auto *sum = std::get_if<SrcType::Sum>(&scr.type->node);
              if (!sum) fail(*c.scr, "case scrutinee must have a sum type");
              Elab e0c = *this;
              e0c.ctx[c.b0] = sum->left;
              Elab e1c = *this;
              e1c.ctx[c.b1] = sum->right;
              // Try to synthesize either branch, checking the other against it.
              try {
                auto r0 = e0c.synth(c.e0);
                auto r1 = e1c.check(c.e1, r0.type);
                return {ex::case_(scr.expr, c.b0, r0.expr, c.b1, r1), r0.type};
              } catch (const ParseError &) {
                auto r1 = e1c.synth(c.e1);
                auto r0 = e0c.check(c.e0, r1.type);
                return {ex::case_(scr.expr, c.b0, r0, c.b1, r1.expr), r1.type};
              }
            },
            [&](const Surf::Pair &p) -> Out {
              auto a = synth(p.fst);
              auto b = synth(p.snd);
              return {ex::pair(a.expr, b.expr), ty::prod(a.type, b.type)};
            },
            [&](const Surf::LetPair &l) -> Out {
              auto p = synth(l.pair);
              const auto *pr = std::get_if<SrcType::Prod>(&p.type->node);
              if (!pr) fail(*l.pair, "let pattern needs a product type");
              Elab inner = *this;
              inner.ctx[l.x0] = pr->left;
              inner.ctx[l.x1] = pr->right;
              auto b = inner.synth(l.body);
              return {ex::letpair(l.x0, l.x1, p.expr, b.expr), b.type};
            },
            [&](const Surf::Fun &f) -> Out {
              if (!type_closed(f.pt) || !type_closed(f.rt))
                fail(*s, "function annotations must be closed types");
              Elab inner = *this;
              inner.ctx[f.self] = ty::arrow(f.pt, f.rt);
              inner.ctx[f.param] = f.pt;
              auto b = inner.check(f.body, f.rt);
              return {ex::fun(f.self, f.param, f.pt, f.rt, b),
                      ty::arrow(f.pt, f.rt)};
            },
            [&](const Surf::App &a) -> Out {
              auto fn = synth(a.fn);
              const auto *ar = std::get_if<SrcType::Arrow>(&fn.type->node);
              if (!ar) fail(*a.fn, "applied expression is not a function");
              auto arg = check(a.arg, ar->dom);
              return {ex::app(fn.expr, arg), ar->cod};
            },
            [&](const Surf::Fold &f) -> Out {
              const auto *r = std::get_if<SrcType::Rec>(&f.type->node);
              if (!r) fail(*s, "fold annotation must be a mu type");
              auto unrolled = subst_type(r->body, f.type, r->var);
              auto a = check(f.arg, unrolled);
              return {ex::fold(f.type, a), f.type};
            },
            [&](const Surf::Unfold &u) -> Out {
              const auto *r = std::get_if<SrcType::Rec>(&u.type->node);
              if (!r) fail(*s, "unfold annotation must be a mu type");
              auto a = check(u.arg, u.type);
              return {ex::unfold(u.type, a),
                      subst_type(r->body, u.type, r->var)};
            },
            [&](const Surf::Tick &t2) -> Out {
              auto a = synth(t2.arg);
              return {ex::tick(a.expr), a.type};
            },
            [&](const Surf::Leq &l) -> Out {
              auto a = check(l.lhs, ty::integer());
              auto b = check(l.rhs, ty::integer());
              return {ex::leq(a, b), ty::boolean()};
            },
            [&](const Surf::Nil &n) -> Out {
              if (!type_closed(n.elem)) fail(*s, "nil annotation must be closed");
              return {ex::nil(n.elem), ty::list(n.elem)};
            },
            [&](const Surf::Cons &c) -> Out {
              auto tl = synth(c.tl);
              auto el = list_elem_type(tl.type);
              if (!el) fail(*c.tl, "cons tail must be a list");
              auto hd = check(c.hd, *el);
              return {ex::cons(*el, hd, tl.expr), tl.type};
            },
            [&](const Surf::Caselist &c) -> Out {
              auto scr = synth(c.scr);
              auto el = list_elem_type(scr.type);
              if (!el) fail(*c.scr, "caselist scrutinee must be a list");
              auto nil_r = synth(c.nil_branch);
              Elab inner = *this;
              inner.ctx[c.hd] = *el;
              inner.ctx[c.tl] = scr.type;
              auto cons_r = inner.check(c.cons_branch, nil_r.type);
              return {desugar_caselist(scr.type, scr.expr, nil_r.expr, c.hd,
                                       c.tl, cons_r),
                      nil_r.type};
            },
            [&](const Surf::If &i) -> Out {
              auto c = check(i.cond, ty::boolean());
              auto a = synth(i.then_e);
              auto b = check(i.else_e, a.type);
              return {ex::case_(c, "_", a.expr, "_", b), a.type};
            },
            [&](const Surf::ListLit &l) -> Out {
              auto first = synth(l.items.front());
              std::vector<SrcExprPtr> items{first.expr};
              for (std::size_t i = 1; i < l.items.size(); ++i)
                items.push_back(check(l.items[i], first.type));
              return {ex::list_lit(first.type, items), ty::list(first.type)};
            },
        },
        s->node);
  }

  SrcExprPtr check(const SurfPtr &s, const SrcTypePtr &expected) {
    // Forms with useful checking rules; everything else synthesizes
    // and compares.
    if (const auto *i = std::get_if<Surf::Inj>(&s->node)) {
      const auto *sum = std::get_if<SrcType::Sum>(&expected->node);
      if (!sum) fail(*s, "injection checked against a non-sum type");
      auto mine = i->tag == 0 ? sum->left : sum->right;
      auto other = i->tag == 0 ? sum->right : sum->left;
      if (i->other && !type_equal(i->other, other))
        fail(*s, "injection annotation disagrees with the expected type");
      auto arg = check(i->arg, mine);
      return ex::inj_at(i->tag, other, arg);
    }
    if (const auto *p = std::get_if<Surf::Pair>(&s->node)) {
      const auto *pr = std::get_if<SrcType::Prod>(&expected->node);
      if (!pr) fail(*s, "pair checked against a non-product type");
      return ex::pair(check(p->fst, pr->left), check(p->snd, pr->right));
    }
    if (const auto *c = std::get_if<Surf::Cons>(&s->node)) {
      auto el = list_elem_type(expected);
      if (!el) fail(*s, "cons checked against a non-list type");
      return ex::cons(*el, check(c->hd, *el), check(c->tl, expected));
    }
    if (const auto *l = std::get_if<Surf::ListLit>(&s->node)) {
      auto el = list_elem_type(expected);
      if (!el) fail(*s, "list literal checked against a non-list type");
      std::vector<SrcExprPtr> items;
      for (const auto &it : l->items) items.push_back(check(it, *el));
      return ex::list_lit(*el, items);
    }
    if (const auto *c = std::get_if<Surf::Case>(&s->node)) {
      auto scr = synth(c->scr);
      const auto *sum = std::get_if<SrcType::Sum>(&scr.type->node);
      if (!sum) fail(*c->scr, "case scrutinee must have a sum type");
      Elab e0c = *this;
      e0c.ctx[c->b0] = sum->left;
      Elab e1c = *this;
      e1c.ctx[c->b1] = sum->right;
      return ex::case_(scr.expr, c->b0, e0c.check(c->e0, expected), c->b1,
                       e1c.check(c->e1, expected));
    }
    if (const auto *i = std::get_if<Surf::If>(&s->node)) {
      auto c = check(i->cond, ty::boolean());
      return ex::case_(c, "_", check(i->then_e, expected), "_",
                       check(i->else_e, expected));
    }
    if (const auto *c = std::get_if<Surf::Caselist>(&s->node)) {
      auto scr = synth(c->scr);
      auto el = list_elem_type(scr.type);
      if (!el) fail(*c->scr, "caselist scrutinee must be a list");
      auto nil_e = check(c->nil_branch, expected);
      Elab inner = *this;
      inner.ctx[c->hd] = *el;
      inner.ctx[c->tl] = scr.type;
      auto cons_e = inner.check(c->cons_branch, expected);
      return desugar_caselist(scr.type, scr.expr, nil_e, c->hd, c->tl, cons_e);
    }
    if (const auto *l = std::get_if<Surf::LetPair>(&s->node)) {
      auto p = synth(l->pair);
      const auto *pr = std::get_if<SrcType::Prod>(&p.type->node);
      if (!pr) fail(*l->pair, "let pattern needs a product type");
      Elab inner = *this;
      inner.ctx[l->x0] = pr->left;
      inner.ctx[l->x1] = pr->right;
      return ex::letpair(l->x0, l->x1, p.expr, inner.check(l->body, expected));
    }
    if (const auto *t2 = std::get_if<Surf::Tick>(&s->node)) {
      return ex::tick(check(t2->arg, expected));
    }
    auto r = synth(s);
    if (!type_equal(r.type, expected))
      fail(*s, "expected type " + show_type(expected) + " but found " +
                   show_type(r.type));
    return r.expr;
  }

  static SrcExprPtr desugar_caselist(const SrcTypePtr &list_ty,
                                     const SrcExprPtr &scr,
                                     const SrcExprPtr &nil_e, const Name &hd,
                                     const Name &tl, const SrcExprPtr &cons_e) {
    return ex::case_(ex::unfold(list_ty, scr), "_", nil_e, "_z",
                     ex::letpair(hd, tl, ex::var("_z"), cons_e));
  }
};

}  // namespace

Program parse_program(const std::string &text) {
  Lexer lx(text);
  Program prog;
  Elab elab;
  while (lx.peek().kind != Tok::End) {
    Token t = lx.next();
    bool is_main = is_kw(t, "main");
    if (!is_main && !is_kw(t, "def"))
      throw ParseError("expected 'def' or 'main'", t.line, t.col);
    Name name;
    if (!is_main) {
      Token n = lx.next();
      if (n.kind != Tok::Ident) throw ParseError("expected name", n.line, n.col);
      name = n.text;
    }
    if (lx.peek().kind != Tok::Equal) lx.fail("expected '='");
    lx.next();
    auto surf = parse_expr_s(lx);
    if (lx.peek().kind != Tok::Semi) lx.fail("expected ';'");
    lx.next();
    auto out = elab.synth(surf);
    if (is_main) {
      prog.main = out.expr;
      prog.main_type = out.type;
    } else {
      prog.defs.push_back(Def{name, out.expr, out.type});
      elab.ctx[name] = out.type;
    }
  }
  return prog;
}

SrcExprPtr parse_expr(const std::string &text, const std::vector<Def> &defs,
                      SrcTypePtr *out_type) {
  Lexer lx(text);
  Elab elab;
  for (const auto &d : defs) elab.ctx[d.name] = d.type;
  auto surf = parse_expr_s(lx);
  if (lx.peek().kind != Tok::End) lx.fail("trailing input after expression");
  auto out = elab.synth(surf);
  if (out_type) *out_type = out.type;
  return out.expr;
}

const Def &find_def(const Program &p, const Name &name) {
  for (const auto &d : p.defs)
    if (d.name == name) return d;
  throw std::out_of_range("no definition named '" + name + "'");
}

SrcExprPtr resolve_defs(const std::vector<Def> &defs, const SrcExprPtr &e) {
  std::map<Name, SrcExprPtr> closed;
  for (const auto &d : defs) closed[d.name] = subst(d.value, closed);
  return subst(e, closed);
}

}  // namespace recurrify

#include "recurrify/corpus.hpp"

namespace recurrify {

namespace {

const char *kSorting = R"(-- Merge sort and quick sort over lists of ints.
-- Every int comparison is wrapped in a tick; nothing else costs.

def split = fun split (xs : list int) : list int * list int =>
  caselist xs of
    nil => (nil[int], nil[int])
  | cons(y, ys) =>
      caselist ys of
        nil => ([y], nil[int])
      | cons(z, zs) =>
          let (as, bs) = split zs in (cons(y, as), cons(z, bs)) ;

def merge = fun merge (xsys : list int * list int) : list int =>
  let (xs, ys) = xsys in
  caselist xs of
    nil => ys
  | cons(x', xs') =>
      caselist ys of
        nil => xs
      | cons(y', ys') =>
          if tick (leq(x', y'))
          then cons(x', merge (xs', ys))
          else cons(y', merge (xs, ys')) ;

def msort = fun msort (xs : list int) : list int =>
  caselist xs of
    nil => nil[int]
  | cons(y, ys) =>
      caselist ys of
        nil => [y]
      | cons(_, _) =>
          let (ws, zs) = split xs in merge (msort ws, msort zs) ;

def part = fun part (xxs : int * list int) : list int * list int =>
  let (x, xs) = xxs in
  caselist xs of
    nil => (nil[int], nil[int])
  | cons(y, ys) =>
      let (ws, zs) = part (x, ys) in
      if tick (leq(x, y)) then (ws, cons(y, zs)) else (cons(y, ws), zs) ;

def app = fun app (xsys : list int * list int) : list int =>
  let (xs, ys) = xsys in
  caselist xs of
    nil => ys
  | cons(x', xs') => cons(x', app (xs', ys)) ;

def qsort = fun qsort (xs : list int) : list int =>
  caselist xs of
    nil => nil[int]
  | cons(y, ys) =>
      let (ws, zs) = part (y, ys) in
      let (ws', zs') = (qsort ws, qsort zs) in
      app (ws', cons(y, zs')) ;
)";

const char *kDivergers = R"(-- Programs with no complete evaluation.

def omega = fun omega (x : unit) : unit => omega x ;

def tickloop = fun tickloop (x : unit) : unit => tickloop (tick x) ;
)";

const char *kUnits = R"(-- Small expressions used by the checking suites.

def u0 = tick () ;
def u1 = (tick (), tick ()) ;
def u2 = if tick (leq(1, 2)) then [1] else [2, 3] ;
def u3 = let (a, b) = (tick 4, 5) in leq(a, b) ;
def u4 = caselist [1, 2, 3] of nil => 0 | cons(h, t) => tick h ;
)";

}  // namespace

const std::map<std::string, std::string> &corpus_sources() {
  static const std::map<std::string, std::string> m = {
      {"sorting", kSorting},
      {"divergers", kDivergers},
      {"units", kUnits},
  };
  return m;
}

Program load_corpus(const std::string &name) {
  return parse_program(corpus_sources().at(name));
}

}  // namespace recurrify

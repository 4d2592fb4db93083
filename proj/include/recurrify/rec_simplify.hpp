#pragma once

#include <vector>

#include "recurrify/rec_ast.hpp"

namespace recurrify {

// The oriented rewrites of the equational size-order fragment. Each tag is
// one left-to-right equation; the inequational beta axioms are not rewrites
// (the model validates those).
enum class SizeRule {
  BindVal,   // p <- val e'; e  =>  e[e'/p]
  ValCost,   // (val e)_c  =>  0
  ValPot,    // (val e)_p  =>  e
  BindCost,  // (bind ...)_c  =>  sum of source costs + body cost
  BindPot,   // (bind ...)_p  =>  body potential at source potentials
  IncrCost,  // (incr e)_c  =>  e_c + 1
  IncrPot,   // (incr e)_p  =>  e_p
  IdL,       // 0 + e  =>  e
  IdR,       // e + 0  =>  e
  Assoc,     // cost-sum reassociation
};

const char *size_rule_name(SizeRule r);

// Normalizes a recurrence expression under the oriented equational rewrites:
// binds collapse into cost-prefixed substitutions, cost/potential projections
// push through val/incr/withcost, and zero summands disappear. Every step is
// an equality in the size order, so the result denotes the same value as the
// input in both product modes. When `fired` is given, the rules applied are
// appended to it.
RecExprPtr simplify(const RecExprPtr &e);
RecExprPtr simplify(const RecExprPtr &e, std::vector<SizeRule> *fired);

// Cost and potential of an already-simplified complexity expression.
RecExprPtr cost_of(const RecExprPtr &e);
RecExprPtr pot_of(const RecExprPtr &e);

// Smart constructors that keep the normal form: plusc(0, e) = e,
// plusc(c, val p) = p withcost c, nested cost prefixes merge.
RecExprPtr mk_plusc(const RecExprPtr &cost, const RecExprPtr &cmplx);
RecExprPtr mk_sum(const RecExprPtr &a, const RecExprPtr &b);

}  // namespace recurrify

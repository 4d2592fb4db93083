#pragma once

#include <cstdint>
#include <vector>

#include "recurrify/source_ast.hpp"

namespace recurrify {

using Cost = std::uint64_t;
using Fuel = std::uint64_t;

struct Outcome {
  bool complete;
  SrcExprPtr value;  // set iff complete
  Cost cost;
};

// Big-step cost-counting evaluation, bounded by fuel. Fuel counts rule
// applications (derivation nodes, axioms included). When no complete
// derivation fits, the outcome is the cost of the deepest left-to-right
// partial derivation the fuel admits.
//
// The machine is iterative; host stack depth does not grow with the
// derivation.
Outcome eval(const SrcExprPtr &e, Fuel fuel);

// Checks eval(v, fuel) = Complete(v, 0) for a closed value.
bool value_self_eval_check(const SrcExprPtr &v);

// Given that eval(e, large fuel) completes at cost c, checks that the
// incomplete costs over the given fuel ladder are non-decreasing and
// bounded by c.
bool cost_monotone_check(const SrcExprPtr &e, const std::vector<Fuel> &ladder);

}  // namespace recurrify

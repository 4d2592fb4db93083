#pragma once

#include <random>

#include "recurrify/rec_ast.hpp"
#include "recurrify/rec_typecheck.hpp"
#include "recurrify/source_ast.hpp"
#include "recurrify/source_typecheck.hpp"

namespace recurrify {

struct FuzzOptions {
  std::uint64_t seed = 0;
  int size_budget = 24;
  // Probability that a generated recursive function recurses without a
  // structural decrease (and may diverge).
  double diverge_prob = 0.1;
  std::int64_t max_int = 1024;
};

// Deterministic type-directed generation of a closed well-typed expression.
SrcExprPtr fuzz_program(const FuzzOptions &opts);

// First-order types only (no arrows at the top level).
SrcTypePtr fuzz_type(std::mt19937_64 &rng, int depth);

// Closed value of the given first-order type.
SrcExprPtr fuzz_value(std::mt19937_64 &rng, const SrcTypePtr &t, int depth,
                      std::int64_t max_int = 1024);

// Well-typed expression of type t under ctx.
SrcExprPtr fuzz_expr(std::mt19937_64 &rng, const TypeCtx &ctx,
                     const SrcTypePtr &t, int budget, double diverge_prob,
                     std::int64_t max_int = 1024);

// --- recurrence-language generators (for the model-axiom suites) ---

// First-order potential types.
RecTypePtr fuzz_rec_type(std::mt19937_64 &rng, int depth);

// Closed recurrence expression of the given type under ctx.
RecExprPtr fuzz_rec_expr(std::mt19937_64 &rng, const RecTypeCtx &ctx,
                         const RecTypePtr &t, int budget);

}  // namespace recurrify

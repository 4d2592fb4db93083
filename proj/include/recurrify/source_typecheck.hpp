#pragma once

#include <map>

#include "recurrify/source_ast.hpp"

namespace recurrify {

using TypeCtx = std::map<Name, SrcTypePtr>;

// Returns the unique type derivable for e under ctx; throws TypeError.
// Bare injections without a sum annotation only type in checked positions
// (under fold, as a checked case branch, or as a function argument).
SrcTypePtr typecheck(const TypeCtx &ctx, const SrcExprPtr &e);

// Checks e against an expected type; throws TypeError on mismatch.
void typecheck_against(const TypeCtx &ctx, const SrcExprPtr &e,
                       const SrcTypePtr &expected);

}  // namespace recurrify

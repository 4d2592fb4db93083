#pragma once

#include <map>

#include "recurrify/rec_ast.hpp"

namespace recurrify {

using RecTypeCtx = std::map<Name, RecTypePtr>;

// Syntax-directed typing for the recurrence language; throws TypeError.
RecTypePtr typecheck_rec(const RecTypeCtx &ctx, const RecExprPtr &e);

void typecheck_rec_against(const RecTypeCtx &ctx, const RecExprPtr &e,
                           const RecTypePtr &expected);

}  // namespace recurrify

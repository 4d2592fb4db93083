#pragma once

#include "recurrify/rec_ast.hpp"
#include "recurrify/source_ast.hpp"
#include "recurrify/source_typecheck.hpp"

namespace recurrify {

// Potential translation of a type.
RecTypePtr extract_type_potential(const SrcTypePtr &t);

// Full translation: the complexity type C(<t>).
RecTypePtr extract_type(const SrcTypePtr &t);

// Recurrence extraction of an expression. The context supplies types of free
// variables (needed to annotate extracted fixpoints). Bind pattern names are
// drawn from a deterministic counter.
RecExprPtr extract_expr(const TypeCtx &ctx, const SrcExprPtr &e);
RecExprPtr extract_expr(const SrcExprPtr &e);

// Potential translation of a value; throws TypeError when the input is not
// a value. The context types any free variables (top-level definition names).
RecExprPtr extract_value(const SrcExprPtr &v, const TypeCtx &ctx = {});

}  // namespace recurrify

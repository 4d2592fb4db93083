#pragma once

#include <string>
#include <vector>

#include "recurrify/source_ast.hpp"

namespace recurrify {

struct Def {
  Name name;
  SrcExprPtr value;  // elaborated core expression; earlier defs appear free
  SrcTypePtr type;
};

struct Program {
  std::vector<Def> defs;
  SrcExprPtr main;       // null when the file has no main item
  SrcTypePtr main_type;  // type of main when present
};

// Parses and elaborates a program file. List/bool/int sugar is expanded, so
// the resulting expressions use only core constructs.
Program parse_program(const std::string &text);

// Parses a standalone expression with the given definitions in scope.
SrcExprPtr parse_expr(const std::string &text, const std::vector<Def> &defs,
                      SrcTypePtr *out_type = nullptr);

// Looks up a definition by name; throws std::out_of_range when missing.
const Def &find_def(const Program &p, const Name &name);

// Substitutes all definitions into e, producing a closed expression
// (each def value itself gets earlier defs substituted first).
SrcExprPtr resolve_defs(const std::vector<Def> &defs, const SrcExprPtr &e);

}  // namespace recurrify

#pragma once

#include <string>
#include <vector>

#include "miniform/expr_tree.hpp"
#include "miniform/expression.hpp"
#include "miniform/names.hpp"
#include "miniform/term.hpp"

namespace miniform {

// Term body without sign: "2/21*den1( - 3/2,j1)". The coefficient's sign is
// the caller's business (sum rendering).
std::string renderTermBody(const Term& t, const SymbolTable& table);

// " + body" / " - body" (the %t print directive).
std::string renderTermSigned(const Term& t, const SymbolTable& table);

// Display form of a small expression: "3 - 2*j1". Terms appear in reverse
// storage order (constants first). Leading " - " when the first displayed
// term is negative.
std::string renderSmallInline(const SmallExpr& e, const SymbolTable& table);

// Compact form without spaces, used for `$x' text interpolation: "-100".
std::string renderSmallCompact(const SmallExpr& e, const SymbolTable& table);

struct PrintOptions {
    bool oneTermPerLine = false;
};

// Full expression block:
//
//    F =
//        1 + 2*y + y^2;
//
// Bracketed expressions group per bracket line: "+ y * ( 2 + 5*x )".
std::string renderExpression(const Expression& e, const SymbolTable& table,
                             const PrintOptions& opt);

// The per-module statistics block.
std::string renderStats(const std::string& exprName, const SortStats& stats);

// Canonical single-line rendering of a parse tree (statement listings).
std::string renderTree(const TreePtr& tree, const SymbolTable& table);

} // namespace miniform

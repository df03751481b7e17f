#pragma once

#include <map>
#include <optional>
#include <vector>

#include "miniform/expr_tree.hpp"
#include "miniform/names.hpp"
#include "miniform/term.hpp"

namespace miniform {

// Pattern-side set restriction with literals evaluated to values.
struct CompiledRestrict {
    enum Kind { None, Number, InSet, NotInSet } kind = None;
    std::vector<SmallExpr> literals;
    std::vector<int> wildRefs;
};

struct PatternArg {
    enum Kind { Lit, Wild, ArgField, FunPat } kind = Lit;
    SmallExpr lit;                 // Lit
    int wildId = -1;               // Wild
    CompiledRestrict restr;        // Wild
    int funId = -1;                // FunPat
    std::vector<PatternArg> args;  // FunPat
};

struct PatternPart {
    enum Kind { SymPow, WildSym, IdxPart, FunPart } kind = SymPow;
    int id = -1;       // SymPow/IdxPart: concrete id; WildSym: wildcard name id
    long exp = 1;      // SymPow/WildSym
    CompiledRestrict restr; // WildSym
    std::vector<PatternArg> args; // FunPart
    bool commuting = true;
    Symmetry sym = Symmetry::None;
};

struct Pattern {
    std::vector<PatternPart> parts;
    int signFactor = 1; // from canonicalizing antisymmetric literal arguments
};

struct Bound {
    enum Kind { Value, ArgList } kind = Value;
    SmallExpr value;
    std::vector<SmallExpr> list;
};

using Bindings = std::map<int, Bound>;

struct MatchInfo {
    Bindings bindings;
    std::vector<size_t> funParts;                   // consumed term part positions
    std::vector<std::pair<size_t, long>> symConsume; // (term part position, pattern exponent)
};

struct PatternError {
    std::string message;
};

// Compiles a parsed pattern tree. Throws PatternError on constructs the
// matcher does not support (argument field wildcards inside symmetric or
// antisymmetric functions are a compile error).
Pattern compilePattern(const TreePtr& tree, SymbolTable& table, const TermLimits& limits);

// First match in deterministic search order, or nullopt.
std::optional<MatchInfo> matchPattern(const Pattern& p, const Term& term,
                                      const SymbolTable& table);

bool containsMatch(const Pattern& p, const Term& term, const SymbolTable& table);

} // namespace miniform

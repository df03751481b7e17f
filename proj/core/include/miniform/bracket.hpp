#pragma once

#include <vector>

#include "miniform/expression.hpp"
#include "miniform/term.hpp"

namespace miniform {

// Ordered key -> position table over a bracketed expression. Keys follow the
// expression's own (bracket-major) storage order. When the entry count would
// exceed the cap, the stride doubles and only every stride-th bracket is kept;
// skipped brackets are reachable by a forward linear scan from the nearest
// preceding entry.
struct BracketIndex {
    struct Entry {
        Term key;       // bracket part, coefficient 1
        size_t first;   // position of the bracket's first term
        size_t count;   // number of terms in the bracket
    };
    std::vector<Entry> entries;
    std::vector<int> bracketSyms;
    size_t stride = 1;
    size_t totalBrackets = 0;

    // Instrumentation, mutable so lookups stay logically const.
    mutable long keyComparisons = 0;
    mutable long termReads = 0;
};

// Build over a canonical (bracket-major ordered) term sequence.
BracketIndex buildBracketIndex(const std::vector<Term>& terms, const std::vector<int>& bracketSyms,
                               size_t cap);

// Contents of the bracket with the given key (key: identity part over the
// bracket symbols, coefficient ignored). Returns the cofactor sum; zero
// expression when absent. Uses binary search over the index; skipped keys are
// found by linear scan from the nearest preceding entry.
SmallExpr lookupBracket(const Expression& expr, const Term& key);

// Linear filter fallback used when no index is present (also the test oracle).
SmallExpr lookupBracketLinear(const Expression& expr, const Term& key, const std::vector<int>& syms,
                              long* termReads = nullptr);

} // namespace miniform

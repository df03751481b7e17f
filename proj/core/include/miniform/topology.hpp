#pragma once

#include <optional>

#include "miniform/names.hpp"
#include "miniform/term.hpp"

namespace miniform {

// Finds the smallest index-contraction loop among the occurrences of `funId`
// in the term and replaces it by one application of `outFunId` carrying the
// loop's external arguments in cycle order. Returns nullopt when no loop of
// the requested size exists. At most one loop is replaced per call.
std::optional<Term> replaceLoop(const Term& term, int funId, int argCount, long loopSize,
                                int outFunId, const SymbolTable& table,
                                const TermLimits& limits);

} // namespace miniform

#include "miniform/bracket.hpp"

#include <algorithm>

namespace miniform {

namespace {

int compareKey(const Term& a, const Term& b) {
    // keys are bracket parts; plain identity comparison applies
    return compareIdentity(a, b);
}

Term bracketPartOf(const Term& t, const std::vector<int>& syms) {
    Term b, r;
    splitBracket(t, syms, b, r);
    return b;
}

Term contentOf(const Term& t, const std::vector<int>& syms) {
    Term b, r;
    splitBracket(t, syms, b, r);
    return r;
}

} // namespace

BracketIndex buildBracketIndex(const std::vector<Term>& terms, const std::vector<int>& bracketSyms,
                               size_t cap) {
    BracketIndex ix;
    ix.bracketSyms = bracketSyms;
    if (cap == 0)
        cap = 1;
    size_t pos = 0;
    size_t bracketOrdinal = 0;
    while (pos < terms.size()) {
        Term key = bracketPartOf(terms[pos], bracketSyms);
        size_t end = pos + 1;
        while (end < terms.size() &&
               compareKey(bracketPartOf(terms[end], bracketSyms), key) == 0)
            ++end;
        if (bracketOrdinal % ix.stride == 0) {
            if (ix.entries.size() >= cap) {
                // drop every second entry, double the stride
                std::vector<BracketIndex::Entry> kept;
                kept.reserve(ix.entries.size() / 2 + 1);
                for (size_t i = 0; i < ix.entries.size(); i += 2)
                    kept.push_back(ix.entries[i]);
                ix.entries = std::move(kept);
                ix.stride *= 2;
            }
            if (bracketOrdinal % ix.stride == 0)
                ix.entries.push_back({key, pos, end - pos});
        }
        ++bracketOrdinal;
        pos = end;
    }
    ix.totalBrackets = bracketOrdinal;
    return ix;
}

SmallExpr lookupBracketLinear(const Expression& expr, const Term& key, const std::vector<int>& syms,
                              long* termReads) {
    SmallExpr out;
    for (const Term& t : expr.terms) {
        if (termReads)
            ++*termReads;
        Term b, r;
        splitBracket(t, syms, b, r);
        if (compareIdentity(b, key) == 0)
            out.push_back(r);
    }
    canonicalize(out);
    return out;
}

SmallExpr lookupBracket(const Expression& expr, const Term& key) {
    if (!expr.index || expr.index->entries.empty())
        return lookupBracketLinear(expr, key, expr.bracketSyms,
                                   expr.index ? &expr.index->termReads : nullptr);

    const BracketIndex& ix = *expr.index;
    // binary search for the last entry with entry.key <= key in storage order
    size_t lo = 0, hi = ix.entries.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        ++ix.keyComparisons;
        int c = compareKey(ix.entries[mid].key, key);
        if (c == 0) {
            const auto& e = ix.entries[mid];
            SmallExpr out;
            out.reserve(e.count);
            for (size_t i = 0; i < e.count; ++i) {
                ++ix.termReads;
                out.push_back(contentOf(expr.terms[e.first + i], ix.bracketSyms));
            }
            canonicalize(out);
            return out;
        }
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    // nearest indexed bracket in front, then forward linear scan
    size_t startPos = 0;
    if (lo > 0)
        startPos = ix.entries[lo - 1].first;
    for (size_t pos = startPos; pos < expr.terms.size();) {
        ++ix.termReads;
        Term b, r;
        splitBracket(expr.terms[pos], ix.bracketSyms, b, r);
        ++ix.keyComparisons;
        int c = compareKey(b, key);
        if (c == 0) {
            SmallExpr out;
            out.push_back(r);
            for (size_t q = pos + 1; q < expr.terms.size(); ++q) {
                ++ix.termReads;
                Term b2, r2;
                splitBracket(expr.terms[q], ix.bracketSyms, b2, r2);
                if (compareIdentity(b2, b) != 0)
                    break;
                out.push_back(r2);
            }
            canonicalize(out);
            return out;
        }
        if (c > 0)
            break; // passed the place the key would occupy
        ++pos;
    }
    return {};
}

} // namespace miniform

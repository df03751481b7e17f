#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "miniform/names.hpp"
#include "miniform/rational.hpp"

namespace miniform {

struct Term;

// A small expression: term list in canonical storage order, merged, zero-free.
// Function arguments and $-variable values are SmallExprs. Zero is the empty list.
using SmallExpr = std::vector<Term>;

enum class PartKind : uint8_t { Sym, Idx, Fun };

struct SubTerm {
    PartKind kind = PartKind::Sym;
    int id = 0;
    long exp = 0;                 // Sym only, never 0 once normalized
    std::vector<SmallExpr> args;  // Fun only
    bool commuting = true;        // Fun only
    Symmetry sym = Symmetry::None;

    static SubTerm symbol(int id, long exp);
    static SubTerm index(int id);
    static SubTerm func(int id, std::vector<SmallExpr> args, bool commuting, Symmetry sym);
};

struct Term {
    Rational coeff;
    std::vector<SubTerm> parts; // canonical: symbols, indices, commuting funcs sorted;
                                // noncommuting funcs last, relative order preserved

    Term() : coeff(0) {}
    explicit Term(Rational c) : coeff(std::move(c)) {}
};

struct TermLimits {
    long maxTermSize = 10000; // in words, see termSize()
    long maxRepeat = 100000;
};

struct TermError {
    std::string message;
};

// --- comparison ---------------------------------------------------------

// Identity comparison (coefficient excluded). Total order on normalized terms:
// parts pairwise by (class rank Sym < Idx < Fun, then declaration ordinal,
// then exponent descending, then arguments); when one part list is a prefix
// of the other the longer term sorts first. Returns <0, 0, >0.
int compareIdentity(const Term& a, const Term& b);

// Identity, then canonical coefficient order (Rational::cmpCanonical).
int compareFull(const Term& a, const Term& b);

// Lexicographic over stored terms with compareFull; shorter list first on ties.
int compareSmallExpr(const SmallExpr& a, const SmallExpr& b);

// Bracket-major identity comparison: the symbol powers whose ids are in
// `bracketSyms` (sorted id list) compare first, the remainder second.
int compareBracketMajor(const Term& a, const Term& b, const std::vector<int>& bracketSyms);

// Splits parts into (bracket part, rest) w.r.t. a sorted id list.
void splitBracket(const Term& t, const std::vector<int>& bracketSyms, Term& bracket, Term& rest);

bool sameBracketPart(const Term& a, const Term& b, const std::vector<int>& bracketSyms);

// --- normalization ------------------------------------------------------

// Canonicalizes arguments of a function application per its symmetry.
// Returns +1/-1/0; 0 means the whole term vanishes (antisymmetric duplicate).
int symmetrize(SubTerm& f);

// Merges symbol powers, drops x^0, sorts commuting parts, applies symmetrize.
// Returns nullopt when the coefficient becomes zero. Throws TermError when
// the term exceeds limits.maxTermSize.
std::optional<Term> normalize(Term raw, const TermLimits& limits);

// Raw product: coefficients multiplied, parts concatenated (not normalized).
Term mulRaw(const Term& a, const Term& b);

// Sorts by full comparison and merges equal identities; drops zero sums.
void canonicalize(SmallExpr& e);

// Merge-add of canonical inputs.
SmallExpr addSmall(const SmallExpr& a, const SmallExpr& b);

// Distributing product of canonical inputs, result canonical.
// Throws TermError on limit violations.
SmallExpr mulSmall(const SmallExpr& a, const SmallExpr& b, const TermLimits& limits);

// e^n by repeated squaring with intermediate merges. Negative n requires a
// single invertible term (symbols and coefficient only).
SmallExpr powSmall(const SmallExpr& e, long n, const TermLimits& limits);

// Inverse of a single-term expression, error otherwise.
Term invertTerm(const Term& t);

// Number of "words" a term occupies (limit accounting).
long termSize(const Term& t);

// Single integer/rational value of a one-term, part-free expression.
std::optional<Rational> asRational(const SmallExpr& e);

// SmallExpr holding one symbol / one index / a plain number.
SmallExpr exprSymbol(int id);
SmallExpr exprIndex(int id);
SmallExpr exprNumber(const Rational& r);

bool equalSmallExpr(const SmallExpr& a, const SmallExpr& b);

// --- serialization (sorter spill + byte statistics) ----------------------

void encodeTerm(const Term& t, std::vector<uint8_t>& out);
size_t decodeTerm(const uint8_t* data, size_t size, Term& out); // bytes consumed
long encodedSize(const Term& t);

} // namespace miniform

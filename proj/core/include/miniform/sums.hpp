#pragma once

#include <vector>

#include "miniform/rational.hpp"

namespace miniform::sums {

// Nested-sum index vector in integer notation (nonzero entries, signs carry
// the alternation) and in the 0/±1 notation (entry count = weight).
using IndexVector = std::vector<long>;

struct SumTerm {
    Rational coeff;
    IndexVector indices;
};
using SumExpr = std::vector<SumTerm>; // merged, sorted lexicographically

struct SumsError {
    std::string message;
};

long weight(const IndexVector& integerForm);

// Integer notation -> 0/±1 notation: each index m becomes |m|-1 zeros
// followed by sign(m).
IndexVector toCompact(const IndexVector& integerForm);

// 0/±1 notation -> integer notation; a zero adds one to the absolute value of
// the first nonzero to its right. Trailing zeros are invalid.
IndexVector fromCompact(const IndexVector& compactForm);

// Quasi-shuffle product in integer notation: every output term carries a
// single index vector of weight w1+w2.
SumExpr stuffleProduct(const IndexVector& a, const IndexVector& b);

// Shuffle product in 0/±1 notation: all order-preserving interleavings with
// multiplicity.
SumExpr shuffleProduct(const IndexVector& a, const IndexVector& b);

// Exact nested summation S_{m...}(n); alternating for negative indices.
Rational evalSum(const IndexVector& integerForm, long n);

// Exact Taylor coefficients of H(v; x) for x^1..x^order (0/±1 notation, the
// rightmost index must be nonzero).
std::vector<Rational> hplSeries(const IndexVector& compactForm, int order);

} // namespace miniform::sums

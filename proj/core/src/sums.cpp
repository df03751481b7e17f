#include "miniform/sums.hpp"

#include <algorithm>
#include <map>

namespace miniform::sums {

namespace {

void validateInteger(const IndexVector& v) {
    for (long m : v)
        if (m == 0)
            throw SumsError{"Index 0 is invalid in integer notation"};
}

void mergeInto(std::map<IndexVector, Rational>& acc, const IndexVector& v, const Rational& c) {
    auto [it, fresh] = acc.emplace(v, c);
    if (!fresh)
        it->second += c;
}

SumExpr fromMap(std::map<IndexVector, Rational>&& acc) {
    SumExpr out;
    for (auto& [v, c] : acc)
        if (!c.isZero())
            out.push_back({c, v});
    return out;
}

void stuffleRec(const IndexVector& a, size_t ia, const IndexVector& b, size_t ib,
                IndexVector& head, const Rational& coeff,
                std::map<IndexVector, Rational>& acc) {
    if (ia == a.size() && ib == b.size()) {
        mergeInto(acc, head, coeff);
        return;
    }
    if (ia == a.size()) {
        IndexVector v = head;
        v.insert(v.end(), b.begin() + static_cast<long>(ib), b.end());
        mergeInto(acc, v, coeff);
        return;
    }
    if (ib == b.size()) {
        IndexVector v = head;
        v.insert(v.end(), a.begin() + static_cast<long>(ia), a.end());
        mergeInto(acc, v, coeff);
        return;
    }
    head.push_back(a[ia]);
    stuffleRec(a, ia + 1, b, ib, head, coeff, acc);
    head.back() = b[ib];
    stuffleRec(a, ia, b, ib + 1, head, coeff, acc);
    long sa = a[ia] < 0 ? -1 : 1;
    long sb = b[ib] < 0 ? -1 : 1;
    head.back() = sa * sb * (std::labs(a[ia]) + std::labs(b[ib]));
    stuffleRec(a, ia + 1, b, ib + 1, head, -coeff, acc);
    head.pop_back();
}

void shuffleRec(const IndexVector& a, size_t ia, const IndexVector& b, size_t ib,
                IndexVector& head, std::map<IndexVector, Rational>& acc) {
    if (ia == a.size() && ib == b.size()) {
        mergeInto(acc, head, Rational(1));
        return;
    }
    if (ia < a.size()) {
        head.push_back(a[ia]);
        shuffleRec(a, ia + 1, b, ib, head, acc);
        head.pop_back();
    }
    if (ib < b.size()) {
        head.push_back(b[ib]);
        shuffleRec(a, ia, b, ib + 1, head, acc);
        head.pop_back();
    }
}

} // namespace

long weight(const IndexVector& v) {
    long w = 0;
    for (long m : v)
        w += std::labs(m);
    return w;
}

IndexVector toCompact(const IndexVector& v) {
    validateInteger(v);
    IndexVector out;
    for (long m : v) {
        for (long k = 1; k < std::labs(m); ++k)
            out.push_back(0);
        out.push_back(m < 0 ? -1 : 1);
    }
    return out;
}

IndexVector fromCompact(const IndexVector& v) {
    IndexVector out;
    long zeros = 0;
    for (long m : v) {
        if (m == 0) {
            ++zeros;
        } else if (m == 1 || m == -1) {
            out.push_back(m * (zeros + 1));
            zeros = 0;
        } else {
            throw SumsError{"Compact notation allows only 0, 1 and -1"};
        }
    }
    if (zeros)
        throw SumsError{"Trailing zeros are invalid in compact notation"};
    return out;
}

SumExpr stuffleProduct(const IndexVector& a, const IndexVector& b) {
    validateInteger(a);
    validateInteger(b);
    std::map<IndexVector, Rational> acc;
    IndexVector head;
    stuffleRec(a, 0, b, 0, head, Rational(1), acc);
    return fromMap(std::move(acc));
}

SumExpr shuffleProduct(const IndexVector& a, const IndexVector& b) {
    std::map<IndexVector, Rational> acc;
    IndexVector head;
    shuffleRec(a, 0, b, 0, head, acc);
    return fromMap(std::move(acc));
}

Rational evalSum(const IndexVector& v, long n) {
    validateInteger(v);
    if (n < 1)
        throw SumsError{"evalSum requires n >= 1"};
    // memoize on (suffix start, argument)
    std::map<std::pair<size_t, long>, Rational> memo;
    std::function<Rational(size_t, long)> eval = [&](size_t start, long arg) -> Rational {
        if (start == v.size())
            return Rational(1);
        auto key = std::make_pair(start, arg);
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
        long m = v[start];
        long absm = std::labs(m);
        Rational total(0);
        for (long i = 1; i <= arg; ++i) {
            Rational num(1);
            if (m < 0 && (i % 2 != 0))
                num = Rational(-1);
            Rational den = Rational(i).pow(absm);
            total += num / den * eval(start + 1, i);
        }
        memo.emplace(key, total);
        return total;
    };
    return eval(0, n);
}

std::vector<Rational> hplSeries(const IndexVector& v, int order) {
    if (order < 1)
        throw SumsError{"Series order must be positive"};
    if (v.empty())
        throw SumsError{"Weight zero has no series"};
    if (v.back() == 0)
        throw SumsError{"Trailing zero index: function is logarithmic at the origin"};
    for (long m : v)
        if (m != 0 && m != 1 && m != -1)
            throw SumsError{"Compact notation allows only 0, 1 and -1"};

    // series coefficients c[0..order]; empty suffix is the constant 1
    std::vector<Rational> h(static_cast<size_t>(order) + 1, Rational(0));
    h[0] = Rational(1);
    for (size_t pos = v.size(); pos-- > 0;) {
        long m = v[pos];
        std::vector<Rational> g(static_cast<size_t>(order) + 1, Rational(0));
        if (m == 0) {
            // integral of h(x)/x: h[0] must vanish
            for (int k = 1; k <= order; ++k)
                g[static_cast<size_t>(k)] = h[static_cast<size_t>(k)] / Rational(k);
        } else {
            // multiply by 1/(1 -+ x) then integrate
            std::vector<Rational> prod(static_cast<size_t>(order) + 1, Rational(0));
            for (int k = 0; k <= order; ++k) {
                Rational sum(0);
                for (int j = 0; j <= k; ++j) {
                    Rational kernel(1);
                    if (m == -1 && ((k - j) % 2 != 0))
                        kernel = Rational(-1);
                    sum += h[static_cast<size_t>(j)] * kernel;
                }
                prod[static_cast<size_t>(k)] = sum;
            }
            for (int k = 1; k <= order; ++k)
                g[static_cast<size_t>(k)] = prod[static_cast<size_t>(k - 1)] / Rational(k);
        }
        h = std::move(g);
    }
    return h;
}

} // namespace miniform::sums

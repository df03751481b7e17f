#include "miniform/rational.hpp"

#include <stdexcept>

namespace miniform {

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den.is_zero())
        throw std::domain_error("division by zero");
    BigInt n = num, d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    v_ = boost::multiprecision::cpp_rational(n, d);
}

std::optional<Rational> Rational::parse(std::string_view text) {
    // [-]digits[/digits]
    if (text.empty())
        return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (text[0] == '-' || text[0] == '+') {
        neg = text[0] == '-';
        i = 1;
    }
    size_t numStart = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        ++i;
    if (i == numStart)
        return std::nullopt;
    BigInt num(std::string(text.substr(numStart, i - numStart)));
    BigInt den = 1;
    if (i < text.size()) {
        if (text[i] != '/')
            return std::nullopt;
        ++i;
        size_t denStart = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            ++i;
        if (i != text.size() || i == denStart)
            return std::nullopt;
        den = BigInt(std::string(text.substr(denStart)));
        if (den.is_zero())
            return std::nullopt;
    }
    if (neg)
        num = -num;
    return Rational(num, den);
}

std::optional<long> Rational::toLong() const {
    if (!isInteger())
        return std::nullopt;
    BigInt n = numerator();
    if (n > std::numeric_limits<long>::max() || n < std::numeric_limits<long>::min())
        return std::nullopt;
    return static_cast<long>(n);
}

Rational Rational::operator-() const {
    Rational r;
    r.v_ = -v_;
    return r;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.v_.is_zero())
        throw std::domain_error("division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::inverse() const {
    if (v_.is_zero())
        throw std::domain_error("division by zero");
    Rational r;
    r.v_ = 1 / v_;
    return r;
}

Rational Rational::pow(long e) const {
    if (e == 0)
        return Rational(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-(e + 1)) + 1ul : static_cast<unsigned long>(e);
    Rational base = *this;
    if (inv)
        base = base.inverse();
    Rational acc(1);
    while (k) {
        if (k & 1)
            acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

int Rational::cmpCanonical(const Rational& a, const Rational& b) {
    BigInt da = a.denominator(), db = b.denominator();
    if (da != db)
        return da < db ? -1 : 1;
    BigInt na = a.numerator(), nb = b.numerator();
    if (na != nb)
        return na < nb ? -1 : 1;
    return 0;
}

std::string Rational::str() const {
    std::string s = numerator().str();
    if (!isInteger()) {
        s += '/';
        s += denominator().str();
    }
    return s;
}

} // namespace miniform

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <string_view>

namespace miniform {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational coefficient. Invariants: gcd(|num|,den)=1, den>0, zero is 0/1.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(const BigInt& n) : v_(n) {}
    Rational(const BigInt& num, const BigInt& den);

    static std::optional<Rational> parse(std::string_view text);

    BigInt numerator() const { return boost::multiprecision::numerator(v_); }
    BigInt denominator() const { return boost::multiprecision::denominator(v_); }

    bool isZero() const { return v_.is_zero(); }
    bool isInteger() const { return denominator() == 1; }
    bool isNegative() const { return v_ < 0; }
    int sign() const { return v_ < 0 ? -1 : (v_.is_zero() ? 0 : 1); }

    // Integer value if it fits in a long; nullopt otherwise.
    std::optional<long> toLong() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o); // throws std::domain_error on /0

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

    Rational inverse() const;       // throws on zero
    Rational pow(long e) const;     // throws on 0^negative

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    // Order used by canonical term/argument comparison: denominator first
    // (integers before fractions), then numerator. Distinct from value order.
    static int cmpCanonical(const Rational& a, const Rational& b);

    // "p" or "p/q".
    std::string str() const;

private:
    boost::multiprecision::cpp_rational v_;
};

} // namespace miniform

#include <doctest.h>

#include <random>

#include "miniform/rational.hpp"

using miniform::BigInt;
using miniform::Rational;

TEST_CASE("rational invariants") {
    Rational r(BigInt(4), BigInt(-6));
    CHECK(r.numerator() == BigInt(-2));
    CHECK(r.denominator() == BigInt(3));
    CHECK(Rational(0).denominator() == BigInt(1));
    CHECK(Rational(BigInt(7), BigInt(7)) == Rational(1));
}

TEST_CASE("rational arithmetic") {
    Rational a(BigInt(1), BigInt(2));
    Rational b(BigInt(1), BigInt(3));
    CHECK((a + b).str() == "5/6");
    CHECK((a - b).str() == "1/6");
    CHECK((a * b).str() == "1/6");
    CHECK((a / b).str() == "3/2");
    CHECK((-a).str() == "-1/2");
    CHECK(a.pow(3).str() == "1/8");
    CHECK(a.pow(-2).str() == "4");
    CHECK(Rational(10).pow(0) == Rational(1));
    CHECK_THROWS(a / Rational(0));
    CHECK_THROWS(Rational(0).inverse());
}

TEST_CASE("rational parse") {
    CHECK(Rational::parse("11/6")->str() == "11/6");
    CHECK(Rational::parse("-3")->str() == "-3");
    CHECK(Rational::parse("-3/9")->str() == "-1/3");
    CHECK(!Rational::parse("x"));
    CHECK(!Rational::parse("1/0"));
    CHECK(!Rational::parse(""));
}

TEST_CASE("canonical order puts integers before fractions") {
    // 0 < 2 < -3/2 in the canonical (denominator-major) order
    Rational zero(0), two(2), mth(BigInt(-3), BigInt(2));
    CHECK(Rational::cmpCanonical(zero, two) < 0);
    CHECK(Rational::cmpCanonical(two, mth) < 0);
    CHECK(Rational::cmpCanonical(zero, mth) < 0);
    CHECK(Rational::cmpCanonical(two, two) == 0);
}

TEST_CASE("canonical order is a strict total order") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 12);
    std::vector<Rational> xs;
    for (int i = 0; i < 300; ++i)
        xs.emplace_back(BigInt(num(rng)), BigInt(den(rng)));
    for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = 0; j < xs.size(); ++j) {
            int ab = Rational::cmpCanonical(xs[i], xs[j]);
            int ba = Rational::cmpCanonical(xs[j], xs[i]);
            CHECK(ab == -ba);
            if (ab == 0)
                CHECK(xs[i] == xs[j]);
        }
}

TEST_CASE("exact big arithmetic") {
    Rational fact(1);
    for (long i = 1; i <= 30; ++i)
        fact *= Rational(i);
    CHECK(fact.str() == "265252859812191058636308480000000");
    CHECK(fact.isInteger());
    CHECK(!fact.toLong()); // out of long range
}

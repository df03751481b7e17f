#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"

using namespace miniform;
using testutil::Fixture;

TEST_CASE("normalize merges symbol powers and drops x^0") {
    Fixture fx;
    // 3*x*x^2*y^0 -> 3*x^3
    Term raw{Rational(3)};
    raw.parts.push_back(SubTerm::symbol(fx.x, 1));
    raw.parts.push_back(SubTerm::symbol(fx.x, 2));
    raw.parts.push_back(SubTerm::symbol(fx.y, 0));
    auto t = normalize(raw, fx.limits);
    REQUIRE(t);
    CHECK(t->parts.size() == 1);
    CHECK(t->parts[0].exp == 3);
    CHECK(t->coeff == Rational(3));
}

TEST_CASE("antisymmetric normalization") {
    Fixture fx;
    int fa = fx.table.declare("fa", NameClass::CFunction, Symmetry::Antisymmetric);

    auto app = [&](std::vector<int> idx) {
        Term t{Rational(1)};
        std::vector<SmallExpr> args;
        for (int id : idx)
            args.push_back(exprIndex(id));
        t.parts.push_back(SubTerm::func(fa, std::move(args), true, Symmetry::Antisymmetric));
        return normalize(t, fx.limits);
    };

    auto swapped = app({fx.i2, fx.i1});
    REQUIRE(swapped);
    CHECK(swapped->coeff == Rational(-1)); // one transposition

    CHECK(!app({fx.i1, fx.i1})); // duplicate argument kills the term

    auto even = app({fx.i3, fx.i1, fx.i2}); // cyclic = even for 3 arguments
    REQUIRE(even);
    CHECK(even->coeff == Rational(1));
}

TEST_CASE("cyclesymmetric picks the least rotation") {
    Fixture fx;
    int gc = fx.table.declare("gc", NameClass::CFunction, Symmetry::Cyclic);
    Term t{Rational(1)};
    std::vector<SmallExpr> args{exprNumber(Rational(3)), exprNumber(Rational(1)),
                                exprNumber(Rational(2))};
    t.parts.push_back(SubTerm::func(gc, std::move(args), true, Symmetry::Cyclic));
    auto n = normalize(t, fx.limits);
    REQUIRE(n);
    const SubTerm& p = n->parts[0];
    CHECK(*asRational(p.args[0]) == Rational(1));
    CHECK(*asRational(p.args[1]) == Rational(2));
    CHECK(*asRational(p.args[2]) == Rational(3));
}

TEST_CASE("reversecyclesymmetric minimizes over rotations and reversal") {
    // brute-force oracle over all rotations of the list and its reversal
    Fixture fx;
    int rc = fx.table.declare("rc", NameClass::CFunction, Symmetry::ReverseCyclic);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> val(0, 4);
    std::uniform_int_distribution<int> len(1, 5);
    for (int iter = 0; iter < 300; ++iter) {
        int n = len(rng);
        std::vector<long> vals;
        for (int i = 0; i < n; ++i)
            vals.push_back(val(rng));

        auto build = [&](const std::vector<long>& v) {
            Term t{Rational(1)};
            std::vector<SmallExpr> args;
            for (long a : v)
                args.push_back(exprNumber(Rational(a)));
            t.parts.push_back(
                SubTerm::func(rc, std::move(args), true, Symmetry::ReverseCyclic));
            return *normalize(t, fx.limits);
        };

        // all rotations of the list and of its reversal normalize identically
        std::vector<std::vector<long>> candidates;
        std::vector<long> r = vals;
        std::vector<long> rev(vals.rbegin(), vals.rend());
        for (int k = 0; k < n; ++k) {
            candidates.push_back(r);
            candidates.push_back(rev);
            std::rotate(r.begin(), r.begin() + 1, r.end());
            std::rotate(rev.begin(), rev.begin() + 1, rev.end());
        }
        Term best = build(candidates[0]);
        for (auto& c : candidates) {
            Term t = build(c);
            CHECK(compareIdentity(t, best) == 0);
        }
    }
}

TEST_CASE("antisymmetric sign equals permutation parity (exhaustive <= 5)") {
    Fixture fx;
    int fa = fx.table.declare("fa2", NameClass::CFunction, Symmetry::Antisymmetric);
    for (int n = 2; n <= 5; ++n) {
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            perm[static_cast<size_t>(i)] = i;
        do {
            int sign = 1;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)])
                        sign = -sign;
            Term t{Rational(1)};
            std::vector<SmallExpr> args;
            for (int i = 0; i < n; ++i)
                args.push_back(exprNumber(Rational(perm[static_cast<size_t>(i)] + 1)));
            t.parts.push_back(
                SubTerm::func(fa, std::move(args), true, Symmetry::Antisymmetric));
            auto norm = normalize(t, fx.limits);
            REQUIRE(norm);
            CHECK(norm->coeff == Rational(sign));
            for (int i = 0; i < n; ++i)
                CHECK(*asRational(norm->parts[0].args[static_cast<size_t>(i)]) ==
                      Rational(i + 1));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("Levi-Civita tensor is antisymmetric") {
    Fixture fx;
    int e_ = fx.table.builtins().e;
    Term t{Rational(1)};
    t.parts.push_back(SubTerm::func(e_, {exprIndex(fx.i1), exprIndex(fx.i2), exprIndex(fx.i1)},
                                    true, Symmetry::Antisymmetric));
    CHECK(!normalize(t, fx.limits)); // repeated index vanishes
}

TEST_CASE("compare is a strict total order on normalized terms") {
    Fixture fx;
    std::mt19937 rng(99);
    std::vector<Term> ts;
    for (int i = 0; i < 250; ++i)
        ts.push_back(testutil::randomTerm(fx, rng));
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(compareFull(ts[i], ts[i]) == 0);
        for (size_t j = 0; j < ts.size(); ++j) {
            int ab = compareFull(ts[i], ts[j]);
            int ba = compareFull(ts[j], ts[i]);
            CHECK((ab == 0 ? ba == 0 : (ab < 0) == (ba > 0)));
        }
    }
    std::sort(ts.begin(), ts.end(),
              [](const Term& a, const Term& b) { return compareFull(a, b) < 0; });
    for (size_t i = 1; i < ts.size(); ++i)
        CHECK(compareFull(ts[i - 1], ts[i]) <= 0);
}

TEST_CASE("compare ranks exponents descending and ordinals ascending") {
    Fixture fx;
    Term x3 = fx.parseTerm("x^3");
    Term x2 = fx.parseTerm("x^2");
    Term xx = fx.parseTerm("x");
    Term yy = fx.parseTerm("y");
    CHECK(compareIdentity(x3, x2) < 0); // x^3 first
    CHECK(compareIdentity(xx, yy) < 0); // declared earlier first
    Term cx = fx.parseTerm("2*x");
    Term cx2 = fx.parseTerm("5*x");
    CHECK(compareIdentity(cx, cx2) == 0); // coefficient excluded
}

TEST_CASE("normalize is idempotent") {
    Fixture fx;
    std::mt19937 rng(1234);
    for (int i = 0; i < 300; ++i) {
        Term t = testutil::randomTerm(fx, rng);
        auto again = normalize(t, fx.limits);
        REQUIRE(again);
        CHECK(compareFull(*again, t) == 0);
    }
}

TEST_CASE("raw multiplication") {
    Fixture fx;
    Term a = fx.parseTerm("2*x");
    Term b = fx.parseTerm("3*x^2");
    auto ab = normalize(mulRaw(a, b), fx.limits);
    REQUIRE(ab);
    CHECK(testutil::algebraEqual({*ab}, fx.parse("6*x^3")));

    Term y = fx.parseTerm("y");
    Term minusOne = fx.parseTerm("-1");
    auto my = normalize(mulRaw(y, minusOne), fx.limits);
    CHECK(testutil::algebraEqual({*my}, fx.parse("-y")));

    // noncommuting order is preserved and distinguishes terms
    Term AB = fx.parseTerm("A(x)*B(x)");
    Term BA = fx.parseTerm("B(x)*A(x)");
    CHECK(compareIdentity(AB, BA) != 0);
}

TEST_CASE("small expression helpers") {
    Fixture fx;
    SmallExpr sum = addSmall(fx.parse("2*x"), fx.parse("3*y - 2*x"));
    CHECK(testutil::algebraEqual(sum, fx.parse("3*y")));

    SmallExpr prod = mulSmall(fx.parse("x+y"), fx.parse("x-y"), fx.limits);
    CHECK(testutil::algebraEqual(prod, fx.parse("x^2-y^2")));

    SmallExpr p = powSmall(fx.parse("x+1"), 2, fx.limits);
    CHECK(testutil::algebraEqual(p, fx.parse("x^2+2*x+1")));
    CHECK_THROWS(powSmall(fx.parse("x+1"), -1, fx.limits));
    SmallExpr inv = powSmall(fx.parse("2*x"), -2, fx.limits);
    CHECK(testutil::algebraEqual(inv, fx.parse("1/4*x^-2")));
}

TEST_CASE("term serialization round-trips") {
    Fixture fx;
    std::mt19937 rng(4321);
    for (int i = 0; i < 100; ++i) {
        Term t = testutil::randomTerm(fx, rng);
        std::vector<uint8_t> buf;
        encodeTerm(t, buf);
        Term back;
        size_t used = decodeTerm(buf.data(), buf.size(), back);
        CHECK(used == buf.size());
        CHECK(compareFull(t, back) == 0);
        CHECK(t.coeff == back.coeff);
    }
}

TEST_CASE("term size limit") {
    Fixture fx;
    TermLimits tight;
    tight.maxTermSize = 4;
    Term t{Rational(1)};
    t.parts.push_back(SubTerm::symbol(fx.x, 1));
    t.parts.push_back(SubTerm::symbol(fx.y, 2));
    CHECK_THROWS_AS((void)normalize(t, tight), TermError);
}

#pragma once

#include <random>
#include <sstream>
#include <string>

#include "miniform/eval.hpp"
#include "miniform/names.hpp"
#include "miniform/parser.hpp"
#include "miniform/session.hpp"
#include "miniform/term.hpp"

namespace testutil {

using namespace miniform;

// Table preloaded with a handful of symbols and functions for unit tests.
struct Fixture {
    SymbolTable table;
    TermLimits limits;
    int x, y, z, i1, i2, i3, f, g, h, A, B;

    Fixture() {
        x = table.declare("x", NameClass::Symbol);
        y = table.declare("y", NameClass::Symbol);
        z = table.declare("z", NameClass::Symbol);
        i1 = table.declare("i1", NameClass::Index);
        i2 = table.declare("i2", NameClass::Index);
        i3 = table.declare("i3", NameClass::Index);
        f = table.declare("f", NameClass::CFunction);
        g = table.declare("g", NameClass::CFunction);
        h = table.declare("h", NameClass::CFunction);
        A = table.declare("A", NameClass::NFunction);
        B = table.declare("B", NameClass::NFunction);
    }

    SmallExpr parse(const std::string& text) {
        TreePtr tree = parseAlgebra(text, table);
        return evalStatic(tree, table, limits);
    }

    Term parseTerm(const std::string& text) {
        SmallExpr e = parse(text);
        REQUIRE(e.size() == 1);
        return e[0];
    }
};

inline Term randomTerm(Fixture& fx, std::mt19937& rng) {
    std::uniform_int_distribution<int> coeff(-6, 6);
    std::uniform_int_distribution<int> nparts(0, 4);
    std::uniform_int_distribution<int> kind(0, 5);
    std::uniform_int_distribution<int> expd(1, 4);
    Term t{Rational(coeff(rng) == 0 ? 1 : coeff(rng))};
    int n = nparts(rng);
    int syms[3] = {fx.x, fx.y, fx.z};
    int funs[3] = {fx.f, fx.g, fx.h};
    std::uniform_int_distribution<int> pick(0, 2);
    for (int i = 0; i < n; ++i) {
        switch (kind(rng)) {
        case 0:
        case 1:
        case 2:
            t.parts.push_back(SubTerm::symbol(syms[pick(rng)], expd(rng)));
            break;
        case 3:
            t.parts.push_back(SubTerm::index(pick(rng) == 0 ? fx.i1 : fx.i2));
            break;
        default: {
            std::vector<SmallExpr> args;
            int na = pick(rng);
            for (int a = 0; a < na; ++a)
                args.push_back(exprNumber(Rational(coeff(rng))));
            t.parts.push_back(SubTerm::func(funs[pick(rng)], std::move(args), true,
                                            Symmetry::None));
            break;
        }
        }
    }
    auto norm = normalize(t, fx.limits);
    return norm ? *norm : Term{Rational(1)};
}

// Runs a program text through a fresh session and returns it for inspection.
struct Run {
    std::ostringstream out, err;
    Session session;
    int rc;

    explicit Run(const std::string& program, RunConfig cfg = RunConfig{})
        : session(cfg, out, err), rc(session.runText(program, "test.frm")) {}
};

// Algebraic equality: difference of the two canonical term lists is empty.
inline bool algebraEqual(const SmallExpr& a, const SmallExpr& b) {
    SmallExpr neg = b;
    for (Term& t : neg)
        t.coeff = -t.coeff;
    return addSmall(a, neg).empty();
}

} // namespace testutil

#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "miniform/sorter.hpp"

using namespace miniform;
using testutil::Fixture;
using testutil::Run;

TEST_CASE("sorter merges and cancels") {
    Fixture fx;
    auto runStream = [&](const std::vector<std::string>& terms, size_t capacity) {
        SorterConfig cfg;
        cfg.bufferCapacity = capacity;
        Sorter s(cfg, {});
        for (const std::string& t : terms)
            s.add(fx.parseTerm(t));
        SortStats st;
        return std::pair(s.finish(st), st);
    };

    auto [r1, st1] = runStream({"2*x", "3*y", "-2*x"}, 0);
    CHECK(testutil::algebraEqual(r1, fx.parse("3*y")));
    CHECK(st1.generated == 3);
    CHECK(st1.inOutput == 1);

    auto [r2, st2] = runStream({"x^2", "x", "x^2"}, 0);
    CHECK(testutil::algebraEqual(r2, fx.parse("2*x^2+x")));
}

TEST_CASE("sorter vs naive map-accumulate oracle, all buffer capacities") {
    Fixture fx;
    std::mt19937 rng(2024);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Term> stream;
        int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i)
            stream.push_back(testutil::randomTerm(fx, rng));

        SmallExpr oracle;
        for (const Term& t : stream)
            oracle = addSmall(oracle, SmallExpr{t});

        for (size_t cap : {size_t(0), size_t(1), size_t(10)}) {
            SorterConfig cfg;
            cfg.bufferCapacity = cap;
            Sorter s(cfg, {});
            for (const Term& t : stream)
                s.add(t);
            SortStats st;
            std::vector<Term> out = s.finish(st);
            CHECK(testutil::algebraEqual(out, oracle));
            for (size_t i = 1; i < out.size(); ++i)
                CHECK(compareIdentity(out[i - 1], out[i]) < 0);
        }
    }
}

TEST_CASE("sort result is independent of stream order") {
    Fixture fx;
    std::mt19937 rng(555);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<Term> stream;
        for (int i = 0; i < 30; ++i)
            stream.push_back(testutil::randomTerm(fx, rng));
        SorterConfig cfg;
        Sorter s1(cfg, {});
        for (const Term& t : stream)
            s1.add(t);
        SortStats a;
        auto r1 = s1.finish(a);

        std::shuffle(stream.begin(), stream.end(), rng);
        Sorter s2(cfg, {});
        for (const Term& t : stream)
            s2.add(t);
        SortStats b;
        auto r2 = s2.finish(b);
        CHECK(testutil::algebraEqual(r1, r2));
    }
}

TEST_CASE("id x = y+1 on x^2 through a whole module") {
    Run r("Symbols x,y;\n"
          "Local F = x^2;\n"
          "id x = y+1;\n"
          ".end\n");
    CHECK(r.rc == 0);
    const Expression* f = r.session.expressionByName("F");
    REQUIRE(f);
    Run expect("Symbols x,y;\nLocal G = y^2+2*y+1;\n.end\n");
    CHECK(testutil::algebraEqual(f->terms, expect.session.expressionByName("G")->terms));
}

TEST_CASE("conservation: id x = x leaves expressions fixed") {
    std::mt19937 rng(77);
    for (int iter = 0; iter < 20; ++iter) {
        std::string poly;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            if (i)
                poly += "+";
            poly += std::to_string(1 + rng() % 9) + "*x^" + std::to_string(rng() % 5) +
                    "*y^" + std::to_string(rng() % 3);
        }
        Run a("Symbols x,y;\nLocal F = " + poly + ";\n.end\n");
        Run b("Symbols x,y;\nLocal F = " + poly + ";\nid x = x;\n.end\n");
        REQUIRE(a.rc == 0);
        REQUIRE(b.rc == 0);
        CHECK(testutil::algebraEqual(a.session.expressionByName("F")->terms,
                                     b.session.expressionByName("F")->terms));
    }
}

TEST_CASE("count in conditions reads the exponent") {
    Run r("Symbols x,y;\n"
          "Local F = 5*x^3*y + y^2 + x;\n"
          "if ( count(x,1) > 2 );\n"
          "  multiply 100;\n"
          "endif;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nLocal G = 500*x^3*y + y^2 + x;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("G")->terms));
}

TEST_CASE("expression(G) guards terms of one expression") {
    Run r("Symbols x,y;\n"
          "Local F = x;\n"
          "Local G = x;\n"
          "if ( expression(G) == 0 );\n"
          "  id x = y;\n"
          "endif;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run ey("Symbols x,y;\nLocal E = y;\n.end\n");
    Run ex("Symbols x,y;\nLocal E = x;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 ey.session.expressionByName("E")->terms));
    CHECK(testutil::algebraEqual(r.session.expressionByName("G")->terms,
                                 ex.session.expressionByName("E")->terms));
}

TEST_CASE("dollar maximum program") {
    Run r("Symbols x;\n"
          "#$max = -100;\n"
          "Local F = x + x^3 + x^2;\n"
          "if ( count(x,1) > $max ) $max = count_(x,1);\n"
          ".sort\n"
          "#do i = `$max',`$max'\n"
          "Local G`i' = x;\n"
          "#enddo\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    CHECK(r.session.expressionByName("G3")); // loop bound read the $ as text
    auto v = asRational(r.session.dollars().find("max")->value);
    REQUIRE(v);
    CHECK(*v == Rational(3));
}

TEST_CASE("dollar keeps its preset value on an empty stream") {
    Run r("Symbols x;\n"
          "#$max = -100;\n"
          "Local F = 0;\n"
          "if ( count(x,1) > $max ) $max = count_(x,1);\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    auto v = asRational(r.session.dollars().find("max")->value);
    REQUIRE(v);
    CHECK(*v == Rational(-100));
}

TEST_CASE("SplitArg splits per marker") {
    Run r("Symbols j1,x,x1,x2;\n"
          "CF den,den1;\n"
          "Off Statistics;\n"
          "L   F = den(j1)*den(2+j1)*den(3-2*j1);\n"
          "SplitArg,((j1)),den;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols j1,x,x1,x2;\nCF den,den1;\n"
               "L E = den(2,j1)*den(3,-2*j1)*den(j1);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("SplitArg plain form gives one argument per term") {
    Run r("Symbols a,b,c;\n"
          "CF den;\n"
          "L F = den(a+b+c);\n"
          "SplitArg,den;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols a,b,c;\nCF den;\nL E = den(a,b,c);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("hide, unhide and drop") {
    Run r("Symbols x,y;\n"
          "Local F1 = x;\n"
          "Local F2 = x;\n"
          ".sort\n"
          "Hide F1;\n"
          "id x = y;\n"
          ".sort\n"
          "Unhide F1;\n"
          "id x = y^2;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run e1("Symbols x,y;\nLocal E = y^2;\n.end\n");
    Run e2("Symbols x,y;\nLocal E = y;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F1")->terms,
                                 e1.session.expressionByName("E")->terms));
    CHECK(testutil::algebraEqual(r.session.expressionByName("F2")->terms,
                                 e2.session.expressionByName("E")->terms));
}

TEST_CASE("hidden expressions stay usable on right-hand sides") {
    Run r("Symbols x,y;\n"
          "Local F1 = x;\n"
          "Local F3 = y;\n"
          ".sort\n"
          "Hide F1;\n"
          "Local F4 = F1+F3;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nLocal E = x+y;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F4")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("hide/unhide round trip preserves expressions") {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        std::string poly = "x^" + std::to_string(1 + rng() % 5) + " + " +
                           std::to_string(1 + rng() % 7) + "*y";
        Run plain("Symbols x,y;\nLocal F = " + poly + ";\n.end\n");
        Run trip("Symbols x,y;\nLocal F = " + poly +
                 ";\n.sort\nHide F;\n.sort\nUnhide F;\n.sort\n.end\n");
        REQUIRE(trip.rc == 0);
        CHECK(testutil::algebraEqual(plain.session.expressionByName("F")->terms,
                                     trip.session.expressionByName("F")->terms));
    }
}

TEST_CASE("skip copies an expression through one module only") {
    Run r("Symbols x,y;\n"
          "Local F = x;\n"
          ".sort\n"
          "Skip F;\n"
          "id x = y;\n"
          ".sort\n"
          "id x = y^2;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nLocal E = y^2;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("dropped expressions disappear after the module") {
    Run r("Symbols x;\n"
          "Local F = x;\n"
          ".sort\n"
          "Drop F;\n"
          "Local G = F + 1;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    const Expression* f = r.session.expressionByName("F");
    CHECK((f == nullptr || f->status == Expression::Status::Dropped));
    Run expect("Symbols x;\nLocal E = x+1;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("G")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("term environment factorization program") {
    Run r("S   x,y,[x+1],[x+2],x1,x2;\n"
          "CF  acc;\n"
          "Off Statistics;\n"
          "L   F = y*(x+1)^2*(x+2)+y^2*(x+1)*x+y^3*(x+2)*x+y^4*x^2;\n"
          "B   y;\n"
          ".sort\n"
          "Collect,acc;\n"
          "Term;\n"
          "    $min1 = 1000;\n"
          "    $min2 = 1000;\n"
          "    id acc(x?) = x;\n"
          "    id  x = x1-1;\n"
          "    sort;\n"
          "    if ( count(x1,1) < $min1 ) $min1 = count_(x1,1);\n"
          "    sort;\n"
          "    Multiply ([x+1]/x1)^$min1;\n"
          "    id  x1 = x+1;\n"
          "    id  x = x2-2;\n"
          "    sort;\n"
          "    if ( count(x2,1) < $min2 ) $min2 = count_(x2,1);\n"
          "    sort;\n"
          "    Multiply ([x+2]/x2)^$min2;\n"
          "    id  x2 = x+2;\n"
          "EndTerm;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("S x,y,[x+1],[x+2],x1,x2;\n"
               "L E = x*y^2*[x+1] + x*y^3*[x+2] + x^2*y^4 + y*[x+1]^2*[x+2];\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("empty term environment passes terms through") {
    Run r("Symbols x,y;\nLocal F = x+y;\nTerm;\nEndTerm;\n.end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nLocal E = x+y;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("inner sort merges constants per private expression") {
    Run r("Symbols x,y;\n"
          "Local F = 2*x+3*y;\n"
          "Term;\n"
          "id x = 1;\n"
          "id y = 1;\n"
          "sort;\n"
          "EndTerm;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x;\nLocal E = 5;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("collect wraps bracket contents") {
    Run r("Symbols x,y;\n"
          "CF acc;\n"
          "Local F = 2*y + 5*x*y + 4*x^2*y + y^2*x;\n"
          "B y;\n"
          ".sort\n"
          "Collect,acc;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nCF acc;\n"
               "Local E = y*acc(2+5*x+4*x^2) + y^2*acc(x);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("collect of a single-term bracket") {
    Run r("Symbols x,y;\nCF acc;\nLocal F = 3*x^2*y;\nB y;\n.sort\nCollect,acc;\n.end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nCF acc;\nLocal E = y*acc(3*x^2);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("collect with no bracket symbols in a term") {
    Run r("Symbols x,y;\nCF acc;\nLocal F = y*x + 7;\nB y;\n.sort\nCollect,acc;\n.end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nCF acc;\nLocal E = y*acc(x) + acc(7);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("builtin sum_ and sig_") {
    Run r("Symbols k,n;\nCF f;\n"
          "Local F = sum_(k,1,3,f(k));\n"
          "Local G = sig_(-5) + sig_(7) + sig_(0);\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols k;\nCF f;\nLocal E = f(1)+f(2)+f(3);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
    Run zero("Symbols k;\nLocal E = 0;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("G")->terms,
                                 zero.session.expressionByName("E")->terms));
}

TEST_CASE("table lookups substitute only filled entries") {
    Run r("Symbols x;\nTable tab(2);\n"
          "Fill tab(1,2) = 7;\n"
          "Local F = tab(1,2) + tab(1,3);\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x;\nTable tab(2);\nLocal E = 7 + tab(1,3);\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("multiply with a dollar exponent") {
    Run r("Symbols x,y;\n"
          "#$p = 3;\n"
          "Local F = y;\n"
          "Multiply x^$p;\n"
          ".end\n");
    REQUIRE(r.rc == 0);
    Run expect("Symbols x,y;\nLocal E = x^3*y;\n.end\n");
    CHECK(testutil::algebraEqual(r.session.expressionByName("F")->terms,
                                 expect.session.expressionByName("E")->terms));
}

TEST_CASE("chunked dollar processing matches unchunked under merge modes") {
    std::mt19937 rng(2718);
    for (int iter = 0; iter < 20; ++iter) {
        std::string poly;
        int n = 3 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            if (i)
                poly += "+";
            poly += std::to_string(1 + rng() % 5) + "*x^" + std::to_string(rng() % 12) +
                    "*y^" + std::to_string(i); // distinct y powers keep all terms alive
        }
        std::string src = "Symbols x,y;\n"
                          "#$max = -100;\n"
                          "Local F = " + poly + ";\n"
                          "ModuleOption maximum,$max;\n"
                          "if ( count(x,1) > $max ) $max = count_(x,1);\n"
                          ".end\n";
        Run whole(src);
        REQUIRE(whole.rc == 0);
        std::ostringstream o2, e2;
        Session s2(RunConfig{}, o2, e2);
        s2.setChunking(4);
        REQUIRE(s2.runText(src, "t.frm") == 0);
        auto a = asRational(whole.session.dollars().find("max")->value);
        auto b = asRational(s2.dollars().find("max")->value);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(*a == *b);
    }
}

TEST_CASE("chunked sum merge adds the chunk values") {
    std::string src = "Symbols x;\n"
                      "#$n = 0;\n"
                      "Local F = x + x^2 + x^3 + x^4 + x^5;\n"
                      "ModuleOption sum,$n;\n"
                      "$n = $n + 1;\n"
                      ".end\n";
    std::ostringstream o1, e1;
    Session s1(RunConfig{}, o1, e1);
    REQUIRE(s1.runText(src, "t.frm") == 0);
    auto total = asRational(s1.dollars().find("n")->value);
    REQUIRE(total);
    CHECK(*total == Rational(5));

    std::ostringstream o2, e2;
    Session s2(RunConfig{}, o2, e2);
    s2.setChunking(2);
    REQUIRE(s2.runText(src, "t.frm") == 0);
    auto chunked = asRational(s2.dollars().find("n")->value);
    REQUIRE(chunked);
    CHECK(*chunked == Rational(5));
}

TEST_CASE("chunked run without a merge mode is refused") {
    std::string src = "Symbols x;\n"
                      "#$n = 0;\n"
                      "Local F = x + x^2;\n"
                      "$n = $n + 1;\n"
                      ".end\n";
    std::ostringstream o, e;
    Session s(RunConfig{}, o, e);
    s.setChunking(2);
    CHECK(s.runText(src, "t.frm") != 0);
    CHECK(e.str().find("moduleoption") != std::string::npos);
}

TEST_CASE("spill transparency: identical results for all capacities") {
    std::string src = "Symbols x,y;\nLocal F = (x+y)^12;\n.end\n";
    std::vector<SmallExpr> results;
    for (size_t cap : {size_t(0), size_t(1), size_t(10)}) {
        RunConfig cfg;
        cfg.sortBufferCapacity = cap;
        std::ostringstream o, e;
        Session s(cfg, o, e);
        REQUIRE(s.runText(src, "t.frm") == 0);
        results.push_back(s.expressionByName("F")->terms);
        CHECK(results.back().size() == 13);
    }
    CHECK(testutil::algebraEqual(results[0], results[1]));
    CHECK(testutil::algebraEqual(results[0], results[2]));
}

TEST_CASE("repeat guards against non-terminating rule sets") {
    RunConfig cfg;
    cfg.maxRepeat = 50;
    std::ostringstream o, e;
    Session s(cfg, o, e);
    int rc = s.runText("Symbols x,y;\nLocal F = x;\nrepeat id x = 2*x;\n.end\n", "t.frm");
    CHECK(rc != 0);
}

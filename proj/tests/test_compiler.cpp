#include <doctest.h>

#include "helpers.hpp"
#include "miniform/compiler.hpp"
#include "miniform/print.hpp"

using namespace miniform;

namespace {

struct CompilerFixture {
    SymbolTable table;
    TableStore tables;
    TermLimits limits;
    Compiler compiler{table, tables, limits};

    CompiledModule compile(const std::vector<std::string>& stmts) {
        int line = 1;
        for (const std::string& s : stmts)
            compiler.compileStatement(s, "t.frm", line++);
        return compiler.takeModule();
    }
};

} // namespace

TEST_CASE("declarations fill the symbol table") {
    CompilerFixture cx;
    cx.compile({"Symbols x1,x2,y", "Indices i1,i2", "CF den,den1", "Functions Q",
                "Tensor tt", "Set small: x1,x2"});
    CHECK(cx.table.find("x1")->cls == NameClass::Symbol);
    CHECK(cx.table.find("i2")->cls == NameClass::Index);
    CHECK(cx.table.find("den1")->cls == NameClass::CFunction);
    CHECK(cx.table.find("Q")->cls == NameClass::NFunction);
    CHECK(cx.table.find("tt")->cls == NameClass::Tensor);
    CHECK(cx.table.find("small")->cls == NameClass::Set);
    // declaration ordinals are stable
    CHECK(cx.table.find("x1")->id < cx.table.find("x2")->id);
    CHECK(cx.table.find("x2")->id < cx.table.find("y")->id);
}

TEST_CASE("function properties parse") {
    CompilerFixture cx;
    cx.compile(
        {"CF f(antisymmetric),ff(cyclesymmetric),s1(symmetric),r1(reversecyclesymmetric)"});
    CHECK(cx.table.find("f")->sym == Symmetry::Antisymmetric);
    CHECK(cx.table.find("ff")->sym == Symmetry::Cyclic);
    CHECK(cx.table.find("s1")->sym == Symmetry::Symmetric);
    CHECK(cx.table.find("r1")->sym == Symmetry::ReverseCyclic);
}

TEST_CASE("id statement compiles to pattern and replacement") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({"Symbols x,y", "id x = y+1"});
    REQUIRE(m.program.size() == 1);
    CHECK(m.program[0]->op == Statement::Id);
    CHECK(m.program[0]->pattern.parts.size() == 1);
    CHECK(m.program[0]->line == 2);
}

TEST_CASE("empty module is valid") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({});
    CHECK(m.program.empty());
    CHECK(m.defs.empty());
}

TEST_CASE("undeclared names are compile errors, never silent creation") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x", "t.frm", 1);
    CHECK_THROWS_WITH_AS(cx.compiler.compileStatement("Local F = FF*x", "t.frm", 2),
                         "Undeclared variable FF", CompileError);
    CHECK_THROWS_AS(cx.compiler.compileStatement("id qq = 1", "t.frm", 3), CompileError);
}

TEST_CASE("the ^^ operator produces the documented message") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x1,x2", "ex1.frm", 2);
    CHECK_THROWS_WITH_AS(
        cx.compiler.compileStatement("Local    F = (x1+x2)^^10", "ex1.frm", 3),
        "Illegal position for operator: ^10", CompileError);
}

TEST_CASE("compilation continues after an error to report more") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x", "t.frm", 1);
    CHECK_THROWS_AS(cx.compiler.compileStatement("Local F = zz", "t.frm", 2), CompileError);
    // next statement still compiles into the same module
    cx.compiler.compileStatement("Local G = x", "t.frm", 3);
    CompiledModule m = cx.compiler.takeModule();
    CHECK(m.defs.size() == 1);
    CHECK(m.defs[0].name == "G");
}

TEST_CASE("declarations after executable statements are rejected") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x,y", "t.frm", 1);
    cx.compiler.compileStatement("id x = y", "t.frm", 2);
    CHECK_THROWS_AS(cx.compiler.compileStatement("Symbols z", "t.frm", 3), CompileError);
    CHECK_THROWS_AS(cx.compiler.compileStatement("Local F = x", "t.frm", 4), CompileError);
}

TEST_CASE("block statements") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({"Symbols x,y", "repeat", "id x = y", "endrepeat",
                                   "if ( count(x,1) > 2 )", "id y = 1", "else", "id y = 2",
                                   "endif", "term", "sort", "endterm"});
    REQUIRE(m.program.size() == 3);
    CHECK(m.program[0]->op == Statement::Repeat);
    CHECK(m.program[0]->body.size() == 1);
    CHECK(m.program[1]->op == Statement::If);
    CHECK(m.program[1]->branches.size() == 2);
    CHECK(m.program[1]->branches[1].isElse);
    CHECK(m.program[2]->op == Statement::TermEnv);
    CHECK(m.program[2]->body.size() == 1);
    CHECK(m.program[2]->body[0]->op == Statement::InnerSort);
}

TEST_CASE("repeat id one-liner") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({"Symbols x,y", "CF den1",
                                   "repeat id den1(x?,y)*y = 1-x*den1(x,y)"});
    REQUIRE(m.program.size() == 1);
    CHECK(m.program[0]->op == Statement::Repeat);
    REQUIRE(m.program[0]->body.size() == 1);
    CHECK(m.program[0]->body[0]->op == Statement::Id);
}

TEST_CASE("inline if with dollar assignment") {
    CompilerFixture cx;
    CompiledModule m =
        cx.compile({"Symbols x", "if ( count(x,1) > $max ) $max = count_(x,1)"});
    REQUIRE(m.program.size() == 1);
    CHECK(m.program[0]->op == Statement::If);
    REQUIRE(m.program[0]->branches.size() == 1);
    REQUIRE(m.program[0]->branches[0].body.size() == 1);
    CHECK(m.program[0]->branches[0].body[0]->op == Statement::DollarAssign);
}

TEST_CASE("unterminated blocks are an error at module end") {
    CompilerFixture cx;
    cx.compiler.compileStatement("repeat", "t.frm", 1);
    CHECK_THROWS_AS(cx.compiler.takeModule(), CompileError);
}

TEST_CASE("sort outside a term environment is rejected") {
    CompilerFixture cx;
    CHECK_THROWS_AS(cx.compiler.compileStatement("sort", "t.frm", 1), CompileError);
}

TEST_CASE("nested term environments are rejected") {
    CompilerFixture cx;
    cx.compiler.compileStatement("term", "t.frm", 1);
    CHECK_THROWS_AS(cx.compiler.compileStatement("term", "t.frm", 2), CompileError);
}

TEST_CASE("module directives") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({
        "Symbols x,y",
        "Local F = x",
        "Local G = y",
        "Hide F",
        "Skip G",
        "Bracket+ x",
        "Off Statistics",
        "ModuleOption maximum,$max",
        "InParallel",
        "Print +s",
    });
    CHECK(m.hide.size() == 1);
    CHECK(m.skips.size() == 1);
    CHECK(m.bracketPlus);
    CHECK(m.bracketSyms.size() == 1);
    REQUIRE(m.statsToggle);
    CHECK(!*m.statsToggle);
    REQUIRE(m.dollarModes.size() == 1);
    CHECK(m.dollarModes[0].first == "max");
    CHECK(m.dollarModes[0].second == MergeMode::Maximum);
    REQUIRE(m.endPrint);
    CHECK(m.endPrint->perLine);
    CHECK(m.program.empty()); // none of these is executable
}

TEST_CASE("print with format string is a termwise statement") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({"Print +f \"<1> %t\""});
    REQUIRE(m.program.size() == 1);
    CHECK(m.program[0]->op == Statement::PrintTerm);
    CHECK(m.program[0]->format == "<1> %t");
}

TEST_CASE("fill statements") {
    CompilerFixture cx;
    CompiledModule m = cx.compile({"Symbols x", "Table tab(2)", "Fill tab(1,2) = 7*x",
                                   "Fill tab(-1,3) = 0"});
    REQUIRE(m.fills.size() == 2);
    CHECK(m.fills[0].key == std::vector<long>{1, 2});
    CHECK(m.fills[1].key == std::vector<long>{-1, 3});
    CHECK_THROWS_AS(cx.compiler.compileStatement("Fill tab(1) = 2", "t.frm", 9),
                    CompileError);
}

TEST_CASE("replaceloop option parsing and outfun check") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Indices i1,i2", "t.frm", 1);
    cx.compiler.compileStatement("CF f(antisymmetric),ff(cyclesymmetric),gg", "t.frm", 2);
    cx.compiler.compileStatement("ReplaceLoop,f,arguments=3,loopsize=all,outfun=ff", "t.frm",
                                 3);
    CompiledModule m = cx.compiler.takeModule();
    REQUIRE(m.program.size() == 1);
    CHECK(m.program[0]->rlFun == cx.table.find("f")->id);
    CHECK(m.program[0]->rlLoopSize == -1);
    CHECK(m.program[0]->rlArgCount == 3);
    // outfun must be at least cyclesymmetric; loopsize must be >= 2
    CHECK_THROWS_AS(cx.compiler.compileStatement(
                        "ReplaceLoop,f,arguments=3,loopsize=all,outfun=gg", "t.frm", 4),
                    CompileError);
    CHECK_THROWS_AS(cx.compiler.compileStatement(
                        "ReplaceLoop,f,arguments=3,loopsize=1,outfun=ff", "t.frm", 5),
                    CompileError);
}

TEST_CASE("argument field wildcards are rejected inside (anti)symmetric functions") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x", "t.frm", 1);
    cx.compiler.compileStatement("CF fs(symmetric),fa(antisymmetric),plain", "t.frm", 2);
    CHECK_THROWS_AS(cx.compiler.compileStatement("id fs(?a) = 1", "t.frm", 3), CompileError);
    CHECK_THROWS_AS(cx.compiler.compileStatement("id fa(?a,x?) = 1", "t.frm", 4),
                    CompileError);
    cx.compiler.compileStatement("id plain(?a) = 1", "t.frm", 5); // fine
}

TEST_CASE("statement listings recompile to the same listing") {
    CompilerFixture cx;
    cx.compiler.compileStatement("Symbols x,y,j1", "t.frm", 1);
    cx.compiler.compileStatement("CF den,den1", "t.frm", 2);
    std::vector<std::string> sources = {
        "id den(x?,j1) = den1(x/j1*y,j1)/j1*y",
        "multiply (x+1)^2",
        "$min = count_(x,1)",
        "repeat id den1(x?,j1)*j1 = 1-x*den1(x,j1)",
        "print \"<2> %t\"",
    };
    int line = 3;
    for (const std::string& s : sources)
        cx.compiler.compileStatement(s, "t.frm", line++);
    CompiledModule m = cx.compiler.takeModule();

    for (const StmtPtr& s : m.program) {
        std::string listing = statementListing(*s, cx.table);
        Compiler c2(cx.table, cx.tables, cx.limits);
        std::string piece;
        bool quoted = false;
        for (char c : listing) {
            if (c == '"')
                quoted = !quoted;
            if (c == ';' && !quoted) {
                c2.compileStatement(piece, "relist.frm", 1);
                piece.clear();
            } else {
                piece += c;
            }
        }
        CompiledModule m2 = c2.takeModule();
        REQUIRE(m2.program.size() == 1);
        CHECK(statementListing(*m2.program[0], cx.table) == listing);
    }
}

TEST_CASE("error message text") {
    CompilerFixture cx;
    try {
        cx.compiler.compileStatement("Local F = FF", "ex1.frm", 8);
        FAIL("expected error");
    } catch (const CompileError& e) {
        CHECK(e.message == "Undeclared variable FF");
    }
}

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "miniform/eval.hpp"
#include "miniform/expr_tree.hpp"
#include "miniform/pattern.hpp"

namespace miniform {

struct CondValue {
    enum Kind { Number, DollarRef, CountOf, ExprMember } kind = Number;
    Rational number;
    std::string dollar;
    std::vector<std::pair<int, Rational>> countPairs; // (symbol id, weight)
    int exprNameId = -1;
};

struct Cond {
    enum Kind { Cmp, And, Or } kind = Cmp;
    enum Op { LT, LE, GT, GE, EQ, NE } op = EQ;
    CondValue lhs, rhs;
    std::vector<Cond> children;
};

struct Statement;
using StmtPtr = std::shared_ptr<Statement>;

struct Statement {
    enum Op {
        Id,           // id pattern = replacement
        Repeat,       // repeat; body endrepeat;  (and `repeat id ...`)
        Multiply,     // multiply <expr>
        If,           // if (..) / elseif / else / endif, or inline one-liner
        SplitArgOp,   // splitarg[,((expr))],f1,...
        ReplaceLoopOp,
        TermEnv,      // term; ... endterm;
        InnerSort,    // sort;  (only inside a term environment)
        CollectOp,    // collect,<fun>
        PrintTerm,    // print "format"  (termwise)
        DollarAssign, // $x = expr
    } op = Id;

    std::string file;
    int line = 0;
    std::string source; // statement text as compiled (listing/diagnostics)

    // Id
    Pattern pattern;
    TreePtr lhsTree;
    TreePtr rhs; // also Multiply operand and DollarAssign value

    // Repeat / TermEnv
    std::vector<StmtPtr> body;

    // If
    struct Branch {
        bool isElse = false;
        Cond cond;
        std::vector<StmtPtr> body;
    };
    std::vector<Branch> branches;

    // SplitArg
    std::optional<Pattern> splitMarker;
    std::vector<int> splitFuns;

    // ReplaceLoop
    int rlFun = -1;
    int rlArgCount = 0;
    long rlLoopSize = -1; // -1 = all
    int rlOutFun = -1;

    // PrintTerm
    std::string format;

    // Collect
    int collectFun = -1;

    // DollarAssign
    std::string dollarName;
};

struct Definition {
    int nameId = -1;
    std::string name;
    TreePtr rhs;
    std::string file;
    int line = 0;
    bool global = false;
};

struct EndPrint {
    bool all = true;
    std::vector<int> names;
    bool perLine = false;
};

struct TableFill {
    int funId = -1;
    std::vector<long> key;
    TreePtr value;
    std::string file;
    int line = 0;
};

struct CompiledModule {
    std::vector<StmtPtr> program;
    std::vector<Definition> defs;
    std::vector<TableFill> fills;
    std::vector<int> hide, unhide, skips, drops;
    bool dropAll = false, skipAll = false, hideAll = false, unhideAll = false;
    std::vector<int> bracketSyms; // sorted ids
    bool bracketPlus = false;
    std::optional<bool> statsToggle;
    std::vector<std::pair<std::string, MergeMode>> dollarModes;
    std::optional<EndPrint> endPrint;
};

// One-line listing of a compiled statement (diagnostics; re-compilable).
std::string statementListing(const Statement& s, const SymbolTable& table);

} // namespace miniform

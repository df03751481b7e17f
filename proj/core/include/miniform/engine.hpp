#pragma once

#include <functional>
#include <ostream>

#include "miniform/eval.hpp"
#include "miniform/statement.hpp"

namespace miniform {

struct ExecHost {
    SymbolTable& table;
    const TermLimits& limits;
    DollarStore* dollars = nullptr;
    TableStore* tables = nullptr;
    std::function<const Expression*(int)> exprById;
    std::ostream* out = nullptr;
    const Expression* currentExpr = nullptr;
    const Statement* currentStmt = nullptr; // last executed; error context
};

// Streams one term depth-first through program[startIdx..]; terms reaching the
// end go to `emit` in generation order.
void execProgram(ExecHost& host, const std::vector<StmtPtr>& program, size_t startIdx, Term t,
                 const std::function<void(Term)>& emit);

// Names of $-variables assigned anywhere in the program (chunked execution
// refuses to run per-term assignments without a merge mode).
void collectDollarAssigns(const std::vector<StmtPtr>& program, std::vector<std::string>& names);

bool evalCondition(ExecHost& host, const Cond& c, const Term& term);

} // namespace miniform

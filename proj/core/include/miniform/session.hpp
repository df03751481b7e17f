#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "miniform/compiler.hpp"
#include "miniform/eval.hpp"
#include "miniform/expression.hpp"
#include "miniform/names.hpp"
#include "miniform/preprocessor.hpp"
#include "miniform/sorter.hpp"
#include "miniform/statement.hpp"

namespace miniform {

struct RunConfig {
    long maxTermSize = 10000;
    long maxRepeat = 100000;
    size_t sortBufferCapacity = 0;        // 0 = unbounded
    size_t bracketIndexCap = 1ul << 20;
    std::string tempDir;                  // sort spill directory
    std::vector<std::string> includePath = {""};
    std::map<std::string, std::string> predefine; // -D name=value

    // Applies a "<key> <value>" setup line; unknown keys are an error.
    // Recognized keys: MaxTermSize, MaxRepeat, SortBufferSize,
    // BracketIndexSize, TempDir, IncludePath (case-insensitive).
    void applySetupLine(const std::string& line);
    void loadSetupFile(const std::string& path);
};

// One batch run: drives preprocessing, per-module compilation and execution.
class Session {
public:
    Session(RunConfig cfg, std::ostream& out, std::ostream& err);
    ~Session();

    int runFile(const std::string& path);
    int runText(const std::string& text, const std::string& filename);

    // introspection (tests, embedding)
    const Expression* expressionByName(std::string_view name) const;
    const DollarStore& dollars() const { return dollars_; }
    SymbolTable& table() { return table_; }
    const SortStats* lastStats(std::string_view exprName) const;

    // Test hook: process every expression in k consecutive chunks, with
    // per-chunk $-variable copies merged per their module option.
    void setChunking(int k) { chunking_ = k; }

private:
    friend struct SessionHooks;

    void diagnose(const std::string& file, int line, const std::string& message);
    void executeModule(CompiledModule& m);
    void processExpression(Expression& e, CompiledModule& m);
    const Expression* exprById(int nameId) const;
    std::string dollarAsText(const std::string& name) const;

    RunConfig cfg_;
    TermLimits limits_;
    std::ostream& out_;
    std::ostream& err_;
    SymbolTable table_;
    TableStore tables_;
    DollarStore dollars_;
    DollarStore* activeDollars_ = &dollars_;
    std::vector<std::unique_ptr<Expression>> exprs_; // declaration order
    std::map<int, Expression*> exprIndex_;           // by name id
    bool statsOn_ = true;
    int chunking_ = 1;
    bool hadErrors_ = false;
    bool errorInLoop_ = false;
};

} // namespace miniform

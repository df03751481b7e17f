#pragma once

#include <string>

#include "miniform/eval.hpp"
#include "miniform/names.hpp"
#include "miniform/statement.hpp"

namespace miniform {

struct CompileError {
    std::string message;
};

// Statement-by-statement module compiler. Statements are translated as read;
// declarations update the symbol table immediately, executable statements
// accumulate into the current module program.
class Compiler {
public:
    Compiler(SymbolTable& table, TableStore& tables, const TermLimits& limits);

    // Throws CompileError; the driver formats the diagnostic and continues.
    void compileStatement(const std::string& text, const std::string& file, int line);

    // Finalizes the current module (error on unclosed blocks) and resets.
    CompiledModule takeModule();

    bool insideBlocks() const { return !blocks_.empty(); }

private:
    struct OpenBlock {
        StmtPtr stmt; // Repeat / If / TermEnv
    };

    std::vector<StmtPtr>& currentSink();
    void append(StmtPtr s);
    StmtPtr parseExecutable(const std::string& text, const std::string& keyword,
                            const std::string& rest, const std::string& file, int line);
    Cond parseCond(const std::string& text);
    CondValue parseCondValue(const std::string& text);
    void declareList(NameClass cls, const std::string& rest);
    void requireDeclarationPosition(const std::string& what);

    SymbolTable& table_;
    TableStore& tables_;
    const TermLimits& limits_;
    CompiledModule module_;
    std::vector<OpenBlock> blocks_;
    bool sawExecutable_ = false;
    bool inTermEnv_ = false;
};

} // namespace miniform

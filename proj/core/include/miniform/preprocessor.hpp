#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "miniform/rational.hpp"

namespace miniform {

// Preprocessor integers are exact; division truncates toward zero.
using PPNumber = BigInt;

struct PPError {
    std::string message;
    std::string file;
    int line = 0;
};

struct Procedure {
    std::string name;
    std::vector<std::string> params;
    struct Line {
        std::string text;
        std::string file;
        int line;
    };
    std::vector<Line> body;
};

struct PPEnv {
    std::map<std::string, std::string> definitions;
    std::map<std::string, Procedure> procedures;
    std::vector<std::string> includePath;
};

// Evaluates integer arithmetic over + - * / and parentheses.
PPNumber ppArith(std::string_view text);

// Expands one `a SEP ... SEP b` occurrence list in a statement text; the
// public entry expands every occurrence outside double-quoted strings.
std::string expandSequences(const std::string& text);

struct PPItem {
    enum Kind { Stmt, EndModule, EndProgram } kind = Stmt;
    std::string text;      // statement text, or terminator tag (".sort" name part)
    std::string file;
    int line = 0;
    int loopDepth = 0;
};

// Streaming macro processor. next() never reads past a module terminator, so
// the driver can execute a module (updating $-variables) before the following
// text is interpolated.
class Preprocessor {
public:
    struct Hooks {
        // text form of a $-variable for `$x' interpolation
        std::function<std::optional<std::string>(const std::string&)> dollarText;
        // #$x = rhs;  evaluated immediately at preprocessor time
        std::function<void(const std::string& name, const std::string& rhs,
                           const std::string& file, int line)>
            dollarAssign;
        // #write <target> "text" (target empty = regular output)
        std::function<void(const std::string& target, const std::string& text)> writeFile;
    };

    Preprocessor(std::string mainText, std::string mainFile, PPEnv env, Hooks hooks);

    // nullopt = end of input without .end
    std::optional<PPItem> next();

    // Aborts the innermost running #do loop (driver calls this when a
    // statement from the loop body fails to compile).
    void abortInnermostLoop();

    PPEnv& env() { return env_; }

    std::string interpolate(const std::string& text, int depth = 0);

private:
    struct SourceLine {
        std::string text;
        std::string file;
        int line;
    };

    struct Frame {
        enum Kind { File, Loop, Proc } kind = File;
        std::vector<SourceLine> lines;
        size_t pos = 0;
        // Loop
        std::string var;
        PPNumber current{0}, bound{0}, step{1};
        bool loopDone = false;
        // Proc
        std::map<std::string, std::string> locals;
    };

    struct CondState {
        bool active;      // currently emitting
        bool taken;       // some branch already taken
        bool wasActive;   // enclosing state
    };

    std::optional<SourceLine> nextLine();
    void handleDirective(const SourceLine& ln);
    void pushStatementText(const SourceLine& ln);
    std::string lookupVar(const std::string& name, bool* found);
    void setVar(const std::string& name, const std::string& value);
    [[noreturn]] void fail(const std::string& msg, const SourceLine& ln);
    int loopDepth() const;
    void startLoop(const std::string& args, const SourceLine& ln);
    std::vector<SourceLine> captureBlock(const char* endWord, const char* startWord,
                                         const SourceLine& at);
    void callProcedure(const std::string& rest, const SourceLine& ln);
    bool condActive() const;

    PPEnv env_;
    Hooks hooks_;
    std::vector<Frame> frames_;
    std::vector<CondState> conds_;
    std::deque<PPItem> queue_;
    std::string stmtBuf_;
    std::string stmtFile_;
    int stmtLine_ = 0;
    bool sawEnd_ = false;
};

} // namespace miniform

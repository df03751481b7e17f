#include "miniform/compiler.hpp"

#include <algorithm>
#include <cctype>

#include "miniform/parser.hpp"
#include "miniform/print.hpp"

namespace miniform {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string r;
    for (char c : s)
        r += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
}

std::vector<std::string> splitTop(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[')
            ++depth;
        else if (c == ')' || c == '}' || c == ']')
            --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trim(cur);
    if (!last.empty() || !out.empty())
        out.push_back(last);
    while (!out.empty() && out.back().empty())
        out.pop_back();
    return out;
}

size_t findTop(const std::string& s, char ch) {
    int depth = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '{' || c == '[')
            ++depth;
        else if (c == ')' || c == '}' || c == ']')
            --depth;
        else if (c == ch && depth == 0)
            return i;
    }
    return std::string::npos;
}

Symmetry symmetryFromWord(const std::string& w) {
    std::string s = lower(w);
    if (s == "symmetric")
        return Symmetry::Symmetric;
    if (s == "antisymmetric")
        return Symmetry::Antisymmetric;
    if (s == "cyclesymmetric" || s == "cyclic")
        return Symmetry::Cyclic;
    if (s == "reversecyclesymmetric" || s == "rcyclic")
        return Symmetry::ReverseCyclic;
    throw CompileError{"Unknown function property " + w};
}

} // namespace

Compiler::Compiler(SymbolTable& table, TableStore& tables, const TermLimits& limits)
    : table_(table), tables_(tables), limits_(limits) {}

std::vector<StmtPtr>& Compiler::currentSink() {
    if (blocks_.empty())
        return module_.program;
    Statement& s = *blocks_.back().stmt;
    if (s.op == Statement::If)
        return s.branches.back().body;
    return s.body;
}

void Compiler::append(StmtPtr s) {
    sawExecutable_ = true;
    currentSink().push_back(std::move(s));
}

void Compiler::requireDeclarationPosition(const std::string& what) {
    if (sawExecutable_ || !blocks_.empty())
        throw CompileError{what + " must precede the executable statements of a module"};
}

void Compiler::declareList(NameClass cls, const std::string& rest) {
    for (const std::string& item : splitTop(rest, ',')) {
        if (item.empty())
            continue;
        std::string name = item;
        Symmetry sym = Symmetry::None;
        size_t par = item.find('(');
        if (par != std::string::npos) {
            size_t close = item.rfind(')');
            if (close == std::string::npos || close < par)
                throw CompileError{"Unbalanced properties in declaration of " + item};
            name = trim(item.substr(0, par));
            std::string props = item.substr(par + 1, close - par - 1);
            for (const std::string& p : splitTop(props, ','))
                sym = symmetryFromWord(p);
        }
        if (name.empty())
            throw CompileError{"Missing name in declaration"};
        try {
            table_.declare(name, cls, sym);
        } catch (const NameError& e) {
            throw CompileError{e.message};
        }
    }
}

void Compiler::compileStatement(const std::string& text, const std::string& file, int line) {
    std::string t = trim(text);
    if (t.empty())
        return;

    try {
        // $x = value;
        if (t[0] == '$') {
            size_t eq = findTop(t, '=');
            if (eq == std::string::npos)
                throw CompileError{"Missing = in $-assignment"};
            std::string name = trim(t.substr(1, eq - 1));
            if (name.empty())
                throw CompileError{"Missing $-variable name"};
            auto s = std::make_shared<Statement>();
            s->op = Statement::DollarAssign;
            s->dollarName = name;
            s->rhs = parsePattern(trim(t.substr(eq + 1)), table_);
            s->file = file;
            s->line = line;
            s->source = t;
            append(std::move(s));
            return;
        }

        std::string word;
        size_t i = 0;
        while (i < t.size() && std::isalpha(static_cast<unsigned char>(t[i])))
            ++i;
        word = lower(t.substr(0, i));
        bool plus = i < t.size() && t[i] == '+';
        if (plus)
            ++i;
        std::string rest = trim(t.substr(i));
        if (!rest.empty() && rest[0] == ',')
            rest = trim(rest.substr(1));

        // declarations
        if (word == "symbol" || word == "symbols" || word == "s") {
            requireDeclarationPosition("Declarations");
            declareList(NameClass::Symbol, rest);
            return;
        }
        if (word == "index" || word == "indices" || word == "i") {
            requireDeclarationPosition("Declarations");
            declareList(NameClass::Index, rest);
            return;
        }
        if (word == "cfunction" || word == "cfunctions" || word == "cf") {
            requireDeclarationPosition("Declarations");
            declareList(NameClass::CFunction, rest);
            return;
        }
        if (word == "function" || word == "functions" || word == "f" || word == "nfunction" ||
            word == "nfunctions" || word == "nf") {
            requireDeclarationPosition("Declarations");
            declareList(NameClass::NFunction, rest);
            return;
        }
        if (word == "tensor" || word == "tensors" || word == "t") {
            requireDeclarationPosition("Declarations");
            declareList(NameClass::Tensor, rest);
            return;
        }
        if (word == "table") {
            requireDeclarationPosition("Declarations");
            size_t par = rest.find('(');
            size_t close = rest.rfind(')');
            if (par == std::string::npos || close == std::string::npos || close < par)
                throw CompileError{"Table declaration needs a dimension: Table name(d)"};
            std::string name = trim(rest.substr(0, par));
            std::string dimText = trim(rest.substr(par + 1, close - par - 1));
            int dim = std::atoi(dimText.c_str());
            if (name.empty() || dim < 1)
                throw CompileError{"Bad table declaration " + rest};
            int id;
            try {
                id = table_.declare(name, NameClass::Table, Symmetry::None, dim);
            } catch (const NameError& e) {
                throw CompileError{e.message};
            }
            tables_.define(id, dim);
            return;
        }
        if (word == "set") {
            requireDeclarationPosition("Declarations");
            size_t colon = rest.find(':');
            if (colon == std::string::npos)
                throw CompileError{"Set declaration needs a colon: Set name: elements"};
            std::string name = trim(rest.substr(0, colon));
            std::vector<std::string> elems = splitTop(trim(rest.substr(colon + 1)), ',');
            int id;
            try {
                id = table_.declare(name, NameClass::Set);
            } catch (const NameError& e) {
                throw CompileError{e.message};
            }
            table_.setSetElements(id, std::move(elems));
            return;
        }

        // definitions
        if (word == "local" || word == "l" || word == "global" || word == "g") {
            requireDeclarationPosition("Expression definitions");
            size_t eq = findTop(rest, '=');
            if (eq == std::string::npos)
                throw CompileError{"Missing = in expression definition"};
            Definition d;
            d.name = trim(rest.substr(0, eq));
            d.global = word == "global" || word == "g";
            d.file = file;
            d.line = line;
            if (d.name.empty())
                throw CompileError{"Missing expression name"};
            try {
                d.nameId = table_.declare(d.name, NameClass::Expression);
            } catch (const NameError& e) {
                throw CompileError{e.message};
            }
            d.rhs = parseAlgebra(trim(rest.substr(eq + 1)), table_);
            module_.defs.push_back(std::move(d));
            return;
        }

        if (word == "fill") {
            requireDeclarationPosition("Fill statements");
            size_t eq = findTop(rest, '=');
            if (eq == std::string::npos)
                throw CompileError{"Missing = in Fill"};
            std::string lhs = trim(rest.substr(0, eq));
            size_t par = lhs.find('(');
            size_t close = lhs.rfind(')');
            if (par == std::string::npos || close == std::string::npos)
                throw CompileError{"Fill needs table(indices)"};
            std::string name = trim(lhs.substr(0, par));
            const NameInfo* info = table_.find(name);
            if (!info || info->cls != NameClass::Table)
                throw CompileError{"Fill of undeclared table " + name};
            TableFill f;
            f.funId = info->id;
            for (const std::string& ix : splitTop(lhs.substr(par + 1, close - par - 1), ',')) {
                try {
                    f.key.push_back(std::stol(ix));
                } catch (...) {
                    throw CompileError{"Table index must be an integer: " + ix};
                }
            }
            if (static_cast<int>(f.key.size()) != info->tableDim)
                throw CompileError{"Table " + name + " takes " +
                                   std::to_string(info->tableDim) + " indices"};
            f.value = parseAlgebra(trim(rest.substr(eq + 1)), table_);
            f.file = file;
            f.line = line;
            module_.fills.push_back(std::move(f));
            return;
        }

        // expression status directives
        auto nameList = [&](const std::string& what) {
            std::vector<int> ids;
            for (const std::string& n : splitTop(rest, ',')) {
                const NameInfo* info = table_.find(n);
                if (!info || info->cls != NameClass::Expression)
                    throw CompileError{what + " of unknown expression " + n};
                ids.push_back(info->id);
            }
            return ids;
        };
        if (word == "hide") {
            if (rest.empty())
                module_.hideAll = true;
            else
                for (int id : nameList("Hide"))
                    module_.hide.push_back(id);
            return;
        }
        if (word == "unhide") {
            if (rest.empty())
                module_.unhideAll = true;
            else
                for (int id : nameList("Unhide"))
                    module_.unhide.push_back(id);
            return;
        }
        if (word == "skip") {
            if (rest.empty())
                module_.skipAll = true;
            else
                for (int id : nameList("Skip"))
                    module_.skips.push_back(id);
            return;
        }
        if (word == "drop") {
            if (rest.empty())
                module_.dropAll = true;
            else
                for (int id : nameList("Drop"))
                    module_.drops.push_back(id);
            return;
        }

        if (word == "bracket" || word == "b") {
            module_.bracketSyms.clear();
            for (const std::string& n : splitTop(rest, ',')) {
                const NameInfo* info = table_.find(n);
                if (!info || info->cls != NameClass::Symbol)
                    throw CompileError{"Bracket needs symbols, got " + n};
                module_.bracketSyms.push_back(info->id);
            }
            std::sort(module_.bracketSyms.begin(), module_.bracketSyms.end());
            module_.bracketPlus = plus;
            return;
        }

        if (word == "on" || word == "off") {
            std::string flag = lower(trim(rest));
            if (flag == "statistics")
                module_.statsToggle = word == "on";
            // other switches are accepted and have no effect here
            return;
        }

        if (word == "moduleoption") {
            auto parts = splitTop(rest, ',');
            if (parts.empty())
                throw CompileError{"Empty moduleoption"};
            std::string modeWord = lower(parts[0]);
            MergeMode m;
            if (modeWord == "sum")
                m = MergeMode::Sum;
            else if (modeWord == "maximum" || modeWord == "max")
                m = MergeMode::Maximum;
            else if (modeWord == "minimum" || modeWord == "min")
                m = MergeMode::Minimum;
            else if (modeWord == "local")
                m = MergeMode::Local;
            else
                throw CompileError{"Unknown moduleoption " + parts[0]};
            for (size_t k = 1; k < parts.size(); ++k) {
                std::string n = parts[k];
                if (n.empty() || n[0] != '$')
                    throw CompileError{"moduleoption needs $-variables"};
                module_.dollarModes.emplace_back(n.substr(1), m);
            }
            return;
        }
        if (word == "inparallel" || word == "notinparallel" || word == "processbucketsize") {
            return; // parallel hints: accepted, no effect in a sequential kernel
        }

        if (word == "print") {
            // termwise when a format string is present, end-of-module otherwise
            std::string r = rest;
            size_t q = r.find('"');
            if (q != std::string::npos) {
                size_t q2 = r.rfind('"');
                if (q2 == q)
                    throw CompileError{"Unbalanced format string in print"};
                auto s = std::make_shared<Statement>();
                s->op = Statement::PrintTerm;
                s->format = r.substr(q + 1, q2 - q - 1);
                s->file = file;
                s->line = line;
                s->source = t;
                append(std::move(s));
                return;
            }
            EndPrint ep;
            for (const std::string& tok : splitTop(r, ' ')) {
                if (tok.empty())
                    continue;
                if (tok == "+f")
                    continue; // also-log flag; output already mirrored when logging
                if (tok == "+s") {
                    ep.perLine = true;
                    continue;
                }
                for (const std::string& n : splitTop(tok, ',')) {
                    if (n.empty())
                        continue;
                    const NameInfo* info = table_.find(n);
                    if (!info || info->cls != NameClass::Expression)
                        throw CompileError{"print of unknown expression " + n};
                    ep.all = false;
                    ep.names.push_back(info->id);
                }
            }
            module_.endPrint = ep;
            return;
        }

        // block openers
        if (word == "repeat" && rest.empty()) {
            auto s = std::make_shared<Statement>();
            s->op = Statement::Repeat;
            s->file = file;
            s->line = line;
            s->source = t;
            sawExecutable_ = true;
            blocks_.push_back({std::move(s)});
            return;
        }
        if (word == "term") {
            if (!rest.empty())
                throw CompileError{"term takes no arguments"};
            if (inTermEnv_)
                throw CompileError{"Nested term environments are not allowed"};
            auto s = std::make_shared<Statement>();
            s->op = Statement::TermEnv;
            s->file = file;
            s->line = line;
            s->source = t;
            inTermEnv_ = true;
            sawExecutable_ = true;
            blocks_.push_back({std::move(s)});
            return;
        }
        if (word == "if") {
            size_t open = rest.find('(');
            if (open == std::string::npos)
                throw CompileError{"if needs a parenthesized condition"};
            int depth = 0;
            size_t close = std::string::npos;
            for (size_t k = open; k < rest.size(); ++k) {
                if (rest[k] == '(')
                    ++depth;
                else if (rest[k] == ')' && --depth == 0) {
                    close = k;
                    break;
                }
            }
            if (close == std::string::npos)
                throw CompileError{"Unbalanced condition in if"};
            auto s = std::make_shared<Statement>();
            s->op = Statement::If;
            s->file = file;
            s->line = line;
            s->source = t;
            Statement::Branch br;
            br.cond = parseCond(rest.substr(open + 1, close - open - 1));
            s->branches.push_back(std::move(br));
            std::string tail = trim(rest.substr(close + 1));
            if (!tail.empty() && tail[0] == ',')
                tail = trim(tail.substr(1));
            if (tail.empty()) {
                sawExecutable_ = true;
                blocks_.push_back({std::move(s)});
                return;
            }
            // inline one-liner: if ( cond ) statement;
            if (tail[0] == '$') {
                size_t eq = findTop(tail, '=');
                if (eq == std::string::npos)
                    throw CompileError{"Missing = in $-assignment"};
                auto ds = std::make_shared<Statement>();
                ds->op = Statement::DollarAssign;
                ds->dollarName = trim(tail.substr(1, eq - 1));
                ds->rhs = parsePattern(trim(tail.substr(eq + 1)), table_);
                ds->file = file;
                ds->line = line;
                ds->source = tail;
                s->branches.back().body.push_back(std::move(ds));
            } else {
                size_t j = 0;
                while (j < tail.size() && std::isalpha(static_cast<unsigned char>(tail[j])))
                    ++j;
                std::string w2 = lower(tail.substr(0, j));
                std::string r2 = trim(tail.substr(j));
                if (!r2.empty() && r2[0] == ',')
                    r2 = trim(r2.substr(1));
                s->branches.back().body.push_back(parseExecutable(tail, w2, r2, file, line));
            }
            append(std::move(s));
            return;
        }

        // block closers
        if (word == "endrepeat" || word == "endif" || word == "endterm") {
            if (blocks_.empty())
                throw CompileError{word + " without matching block opener"};
            Statement& s = *blocks_.back().stmt;
            bool ok = (word == "endrepeat" && s.op == Statement::Repeat) ||
                      (word == "endif" && s.op == Statement::If) ||
                      (word == "endterm" && s.op == Statement::TermEnv);
            if (!ok)
                throw CompileError{word + " does not match the open block"};
            StmtPtr done = blocks_.back().stmt;
            blocks_.pop_back();
            if (s.op == Statement::TermEnv)
                inTermEnv_ = false;
            currentSink().push_back(std::move(done));
            sawExecutable_ = true;
            return;
        }
        if (word == "elseif" || word == "else") {
            if (blocks_.empty() || blocks_.back().stmt->op != Statement::If)
                throw CompileError{word + " outside an if block"};
            Statement& s = *blocks_.back().stmt;
            if (!s.branches.empty() && s.branches.back().isElse)
                throw CompileError{word + " after else"};
            Statement::Branch br;
            if (word == "elseif") {
                size_t open = rest.find('(');
                size_t close = rest.rfind(')');
                if (open == std::string::npos || close == std::string::npos)
                    throw CompileError{"elseif needs a condition"};
                br.cond = parseCond(rest.substr(open + 1, close - open - 1));
            } else {
                br.isElse = true;
            }
            s.branches.push_back(std::move(br));
            return;
        }

        append(parseExecutable(t, word, rest, file, line));
    } catch (const ParseError& e) {
        throw CompileError{e.message};
    } catch (const PatternError& e) {
        throw CompileError{e.message};
    } catch (const NameError& e) {
        throw CompileError{e.message};
    }
}

StmtPtr Compiler::parseExecutable(const std::string& t, const std::string& word,
                                  const std::string& rest, const std::string& file, int line) {
    auto s = std::make_shared<Statement>();
    s->file = file;
    s->line = line;
    s->source = t;

    if (word == "id" || word == "identify") {
        size_t eq = findTop(rest, '=');
        if (eq == std::string::npos)
            throw CompileError{"Missing = in id statement"};
        s->op = Statement::Id;
        s->lhsTree = parsePattern(trim(rest.substr(0, eq)), table_);
        s->pattern = compilePattern(s->lhsTree, table_, limits_);
        s->rhs = parsePattern(trim(rest.substr(eq + 1)), table_);
        return s;
    }
    if (word == "repeat") {
        s->op = Statement::Repeat;
        if (!rest.empty()) {
            // single-statement form: repeat id ... ;
            std::string inner = rest;
            size_t j = 0;
            while (j < inner.size() && std::isalpha(static_cast<unsigned char>(inner[j])))
                ++j;
            std::string w2 = lower(inner.substr(0, j));
            std::string r2 = trim(inner.substr(j));
            if (!r2.empty() && r2[0] == ',')
                r2 = trim(r2.substr(1));
            StmtPtr innerStmt = parseExecutable(inner, w2, r2, file, line);
            s->body.push_back(std::move(innerStmt));
            s->source = t;
        } else {
            s->source = "repeat";
        }
        return s;
    }
    if (word == "sort") {
        if (!inTermEnv_ || blocks_.empty() || blocks_.back().stmt->op != Statement::TermEnv)
            throw CompileError{"sort must appear directly inside a term environment"};
        s->op = Statement::InnerSort;
        return s;
    }
    if (word == "multiply") {
        s->op = Statement::Multiply;
        std::string r = rest;
        std::string head = lower(r.substr(0, r.find(',')));
        if (head == "left" || head == "right")
            r = trim(r.substr(r.find(',') + 1));
        s->rhs = parseAlgebra(r, table_);
        return s;
    }
    if (word == "splitarg") {
        s->op = Statement::SplitArgOp;
        std::string r = rest;
        if (!r.empty() && r[0] == '(') {
            if (r.size() < 2 || r[1] != '(')
                throw CompileError{"SplitArg marker needs double parentheses"};
            size_t close = r.find("))");
            if (close == std::string::npos)
                throw CompileError{"Unbalanced SplitArg marker"};
            std::string inner = r.substr(2, close - 2);
            TreePtr markerTree = parsePattern(inner, table_);
            s->splitMarker = compilePattern(markerTree, table_, limits_);
            r = trim(r.substr(close + 2));
            if (!r.empty() && r[0] == ',')
                r = trim(r.substr(1));
        }
        for (const std::string& n : splitTop(r, ',')) {
            const NameInfo* info = table_.find(n);
            if (!info || !table_.isFunction(info->id))
                throw CompileError{"SplitArg needs function names, got " + n};
            s->splitFuns.push_back(info->id);
        }
        if (s->splitFuns.empty())
            throw CompileError{"SplitArg needs at least one function"};
        return s;
    }
    if (word == "replaceloop") {
        s->op = Statement::ReplaceLoopOp;
        auto parts = splitTop(rest, ',');
        if (parts.empty())
            throw CompileError{"ReplaceLoop needs a function"};
        const NameInfo* fun = table_.find(parts[0]);
        if (!fun || !table_.isFunction(fun->id))
            throw CompileError{"ReplaceLoop of unknown function " + parts[0]};
        s->rlFun = fun->id;
        for (size_t k = 1; k < parts.size(); ++k) {
            size_t eq = parts[k].find('=');
            if (eq == std::string::npos)
                throw CompileError{"Bad ReplaceLoop option " + parts[k]};
            std::string key = lower(trim(parts[k].substr(0, eq)));
            std::string val = trim(parts[k].substr(eq + 1));
            if (key == "arguments") {
                s->rlArgCount = std::atoi(val.c_str());
            } else if (key == "loopsize") {
                if (lower(val) == "all") {
                    s->rlLoopSize = -1;
                } else {
                    s->rlLoopSize = std::atol(val.c_str());
                    if (s->rlLoopSize < 2)
                        throw CompileError{"loopsize must be at least 2"};
                }
            } else if (key == "outfun") {
                const NameInfo* out = table_.find(val);
                if (!out || !table_.isFunction(out->id))
                    throw CompileError{"ReplaceLoop outfun " + val + " is not a function"};
                if (out->sym != Symmetry::Cyclic && out->sym != Symmetry::ReverseCyclic)
                    throw CompileError{
                        "ReplaceLoop output function must be at least cyclesymmetric"};
                s->rlOutFun = out->id;
            } else {
                throw CompileError{"Unknown ReplaceLoop option " + key};
            }
        }
        if (s->rlArgCount <= 0 || s->rlOutFun < 0)
            throw CompileError{"ReplaceLoop needs arguments= and outfun="};
        return s;
    }
    if (word == "collect") {
        s->op = Statement::CollectOp;
        const NameInfo* info = table_.find(rest);
        if (!info || !table_.isFunction(info->id))
            throw CompileError{"Collect needs a function name, got " + rest};
        s->collectFun = info->id;
        if (sawExecutable_ || !blocks_.empty())
            throw CompileError{"Collect must be the first statement of a module"};
        return s;
    }

    throw CompileError{"Unknown statement " + word};
}

CondValue Compiler::parseCondValue(const std::string& textIn) {
    std::string t = trim(textIn);
    CondValue v;
    if (t.empty())
        throw CompileError{"Empty value in condition"};
    if (t[0] == '$') {
        v.kind = CondValue::DollarRef;
        v.dollar = t.substr(1);
        return v;
    }
    if (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '+') {
        auto r = Rational::parse(t);
        if (!r)
            throw CompileError{"Bad number in condition: " + t};
        v.kind = CondValue::Number;
        v.number = *r;
        return v;
    }
    size_t j = 0;
    while (j < t.size() && std::isalpha(static_cast<unsigned char>(t[j])))
        ++j;
    std::string w = lower(t.substr(0, j));
    std::string inner;
    size_t open = t.find('(', j);
    if (open != std::string::npos) {
        size_t close = t.rfind(')');
        if (close == std::string::npos || close < open)
            throw CompileError{"Unbalanced parentheses in condition"};
        inner = t.substr(open + 1, close - open - 1);
    }
    if (w == "count") {
        v.kind = CondValue::CountOf;
        auto parts = splitTop(inner, ',');
        if (parts.empty() || parts.size() % 2 != 0)
            throw CompileError{"count() needs symbol,weight pairs"};
        for (size_t k = 0; k < parts.size(); k += 2) {
            const NameInfo* sym = table_.find(parts[k]);
            if (!sym || sym->cls != NameClass::Symbol)
                throw CompileError{"count() of non-symbol " + parts[k]};
            auto wgt = Rational::parse(parts[k + 1]);
            if (!wgt)
                throw CompileError{"Bad weight in count(): " + parts[k + 1]};
            v.countPairs.emplace_back(sym->id, *wgt);
        }
        return v;
    }
    if (w == "expression") {
        v.kind = CondValue::ExprMember;
        const NameInfo* e = table_.find(trim(inner));
        if (!e || e->cls != NameClass::Expression)
            throw CompileError{"expression() of unknown expression " + inner};
        v.exprNameId = e->id;
        return v;
    }
    throw CompileError{"Cannot use " + t + " in a condition"};
}

Cond Compiler::parseCond(const std::string& text) {
    std::string t = trim(text);
    // strip one redundant outer parenthesis pair
    while (t.size() >= 2 && t.front() == '(' && t.back() == ')') {
        int depth = 0;
        bool wraps = true;
        for (size_t k = 0; k < t.size(); ++k) {
            if (t[k] == '(')
                ++depth;
            else if (t[k] == ')') {
                --depth;
                if (depth == 0 && k + 1 != t.size()) {
                    wraps = false;
                    break;
                }
            }
        }
        if (!wraps)
            break;
        t = trim(t.substr(1, t.size() - 2));
    }

    auto splitLogical = [&](const char* opTok) -> std::vector<std::string> {
        std::vector<std::string> parts;
        int depth = 0;
        size_t start = 0;
        for (size_t k = 0; k + 1 < t.size(); ++k) {
            char c = t[k];
            if (c == '(')
                ++depth;
            else if (c == ')')
                --depth;
            else if (depth == 0 && c == opTok[0] && t[k + 1] == opTok[1]) {
                parts.push_back(t.substr(start, k - start));
                start = k + 2;
                ++k;
            }
        }
        parts.push_back(t.substr(start));
        return parts;
    };

    auto orParts = splitLogical("||");
    if (orParts.size() > 1) {
        Cond c;
        c.kind = Cond::Or;
        for (const std::string& p : orParts)
            c.children.push_back(parseCond(p));
        return c;
    }
    auto andParts = splitLogical("&&");
    if (andParts.size() > 1) {
        Cond c;
        c.kind = Cond::And;
        for (const std::string& p : andParts)
            c.children.push_back(parseCond(p));
        return c;
    }

    static const std::pair<const char*, Cond::Op> ops[] = {
        {"==", Cond::EQ}, {"!=", Cond::NE}, {">=", Cond::GE},
        {"<=", Cond::LE}, {">", Cond::GT},  {"<", Cond::LT},
    };
    int depth = 0;
    for (size_t k = 0; k < t.size(); ++k) {
        char ch = t[k];
        if (ch == '(')
            ++depth;
        else if (ch == ')')
            --depth;
        if (depth != 0)
            continue;
        for (const auto& [tok, op] : ops) {
            size_t len = std::strlen(tok);
            if (t.compare(k, len, tok) == 0) {
                Cond c;
                c.kind = Cond::Cmp;
                c.op = op;
                c.lhs = parseCondValue(t.substr(0, k));
                c.rhs = parseCondValue(t.substr(k + len));
                return c;
            }
        }
    }
    throw CompileError{"Cannot parse condition: " + t};
}

CompiledModule Compiler::takeModule() {
    if (!blocks_.empty()) {
        Statement::Op op = blocks_.back().stmt->op;
        blocks_.clear();
        inTermEnv_ = false;
        module_ = CompiledModule{};
        sawExecutable_ = false;
        const char* what = op == Statement::Repeat ? "endrepeat"
                          : op == Statement::If    ? "endif"
                                                   : "endterm";
        throw CompileError{std::string("Missing ") + what + " at end of module"};
    }
    CompiledModule m = std::move(module_);
    module_ = CompiledModule{};
    sawExecutable_ = false;
    inTermEnv_ = false;
    return m;
}

// --- listings ---------------------------------------------------------------

std::string statementListing(const Statement& s, const SymbolTable& table) {
    switch (s.op) {
    case Statement::Id:
        return "id " + renderTree(s.lhsTree, table) + " = " + renderTree(s.rhs, table) + ";";
    case Statement::Multiply:
        return "multiply " + renderTree(s.rhs, table) + ";";
    case Statement::DollarAssign:
        return "$" + s.dollarName + " = " + renderTree(s.rhs, table) + ";";
    case Statement::PrintTerm:
        return "print \"" + s.format + "\";";
    case Statement::InnerSort:
        return "sort;";
    case Statement::Repeat: {
        std::string out = "repeat;";
        for (const StmtPtr& c : s.body)
            out += " " + statementListing(*c, table);
        out += " endrepeat;";
        return out;
    }
    case Statement::TermEnv: {
        std::string out = "term;";
        for (const StmtPtr& c : s.body)
            out += " " + statementListing(*c, table);
        out += " endterm;";
        return out;
    }
    default:
        return s.source + ";";
    }
}

} // namespace miniform

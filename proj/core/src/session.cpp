#include "miniform/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include "miniform/bracket.hpp"
#include "miniform/engine.hpp"
#include "miniform/parser.hpp"
#include "miniform/print.hpp"

namespace miniform {

namespace {

std::string lower(std::string_view s) {
    std::string r;
    for (char c : s)
        r += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

} // namespace

void RunConfig::applySetupLine(const std::string& line) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '*' || t[0] == '#')
        return;
    size_t sp = t.find_first_of(" \t");
    std::string key = lower(t.substr(0, sp));
    std::string value = sp == std::string::npos ? "" : trim(t.substr(sp));
    auto positive = [&](const char* what) {
        long v = std::atol(value.c_str());
        if (v <= 0)
            throw NameError{std::string("Setup value for ") + what + " must be positive"};
        return v;
    };
    if (key == "maxtermsize")
        maxTermSize = positive("MaxTermSize");
    else if (key == "maxrepeat")
        maxRepeat = positive("MaxRepeat");
    else if (key == "sortbuffersize")
        sortBufferCapacity = static_cast<size_t>(positive("SortBufferSize"));
    else if (key == "bracketindexsize")
        bracketIndexCap = static_cast<size_t>(positive("BracketIndexSize"));
    else if (key == "tempdir")
        tempDir = value;
    else if (key == "includepath")
        includePath.push_back(value);
    else
        throw NameError{"Unknown setup key " + key};
}

void RunConfig::loadSetupFile(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw NameError{"Cannot open setup file " + path};
    std::string line;
    while (std::getline(in, line))
        applySetupLine(line);
}

Session::Session(RunConfig cfg, std::ostream& out, std::ostream& err)
    : cfg_(std::move(cfg)), out_(out), err_(err) {
    limits_.maxTermSize = cfg_.maxTermSize;
    limits_.maxRepeat = cfg_.maxRepeat;
}

Session::~Session() = default;

void Session::diagnose(const std::string& file, int line, const std::string& message) {
    err_ << file << " Line " << line << " --> " << message << "\n";
    hadErrors_ = true;
}

const Expression* Session::exprById(int nameId) const {
    auto it = exprIndex_.find(nameId);
    return it == exprIndex_.end() ? nullptr : it->second;
}

const Expression* Session::expressionByName(std::string_view name) const {
    const NameInfo* info = table_.find(name);
    if (!info)
        return nullptr;
    return exprById(info->id);
}

const SortStats* Session::lastStats(std::string_view exprName) const {
    const Expression* e = expressionByName(exprName);
    return e ? &e->stats : nullptr;
}

std::string Session::dollarAsText(const std::string& name) const {
    const DollarVar* v = activeDollars_->find(name);
    if (!v)
        throw RuntimeError{"Undefined $-variable $" + name};
    return renderSmallCompact(v->value, table_);
}

int Session::runFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        err_ << "miniform: cannot open " << path << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // resolve includes relative to the program's directory as well
    RunConfig saved = cfg_;
    size_t slash = path.find_last_of('/');
    if (slash != std::string::npos)
        cfg_.includePath.push_back(path.substr(0, slash));
    int rc = runText(text, slash == std::string::npos ? path : path.substr(slash + 1));
    cfg_ = saved;
    return rc;
}

int Session::runText(const std::string& text, const std::string& filename) {
    PPEnv env;
    for (const auto& [k, v] : cfg_.predefine)
        env.definitions[k] = v;
    env.includePath = cfg_.includePath;

    Compiler compiler(table_, tables_, limits_);

    Preprocessor::Hooks hooks;
    hooks.dollarText = [this](const std::string& name) -> std::optional<std::string> {
        if (!activeDollars_->has(name))
            return std::nullopt;
        return dollarAsText(name);
    };
    hooks.dollarAssign = [this](const std::string& name, const std::string& rhs,
                                const std::string& file, int line) {
        try {
            TreePtr tree = parseAlgebra(rhs, table_);
            EvalCtx ctx{table_, limits_};
            ctx.dollars = activeDollars_;
            ctx.tables = &tables_;
            ctx.expressions = [this](int id) { return exprById(id); };
            SmallExpr v = evalTree(tree, ctx);
            v = evalBuiltinsPost(std::move(v), ctx);
            activeDollars_->set(name, std::move(v));
        } catch (const ParseError& e) {
            throw PPError{e.message, file, line};
        } catch (const RuntimeError& e) {
            throw PPError{e.message, file, line};
        }
    };
    hooks.writeFile = [this](const std::string& target, const std::string& textOut) {
        if (target.empty()) {
            out_ << textOut;
            return;
        }
        std::ofstream f(target, std::ios::app);
        if (!f)
            throw PPError{"Cannot open #write file " + target};
        f << textOut;
    };

    Preprocessor pp(text, filename, std::move(env), hooks);

    int lineCount = 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    bool finishedClean = false;

    while (true) {
        std::optional<PPItem> item;
        try {
            item = pp.next();
        } catch (const PPError& e) {
            diagnose(e.file.empty() ? filename : e.file, e.line, e.message);
            break;
        }
        if (!item) {
            diagnose(filename, lineCount, "Missing .end instruction");
            break;
        }
        if (item->kind == PPItem::Stmt) {
            try {
                compiler.compileStatement(item->text, item->file, item->line);
            } catch (const CompileError& e) {
                diagnose(item->file, item->line, e.message);
                if (item->loopDepth > 0) {
                    errorInLoop_ = true;
                    pp.abortInnermostLoop();
                }
            }
            continue;
        }
        // module terminator
        CompiledModule m;
        try {
            m = compiler.takeModule();
        } catch (const CompileError& e) {
            diagnose(item->file, item->line, e.message);
        }
        if (!hadErrors_) {
            try {
                executeModule(m);
            } catch (const RuntimeError& e) {
                diagnose(item->file, item->line, e.message);
                break;
            } catch (const TermError& e) {
                diagnose(item->file, item->line, e.message);
                break;
            }
        }
        if (item->kind == PPItem::EndProgram) {
            finishedClean = true;
            break;
        }
    }

    if (hadErrors_) {
        err_ << (errorInLoop_ ? "++++Errors in Loop" : "++++Errors") << "\n";
        return 1;
    }
    return finishedClean ? 0 : 1;
}

// --- module execution ---------------------------------------------------

namespace {

struct ChunkValue {
    bool assigned = false;
    SmallExpr value;
};

} // namespace

void Session::processExpression(Expression& e, CompiledModule& m) {
    auto started = std::chrono::steady_clock::now();

    SorterConfig scfg;
    scfg.bufferCapacity = cfg_.sortBufferCapacity;
    scfg.spillDir = cfg_.tempDir;
    Sorter sorter(scfg, m.bracketSyms);

    ExecHost host{table_, limits_};
    host.dollars = activeDollars_;
    host.tables = &tables_;
    host.exprById = [this](int id) { return exprById(id); };
    host.out = &out_;
    host.currentExpr = &e;

    size_t startIdx = 0;
    bool collect = !m.program.empty() && m.program[0]->op == Statement::CollectOp;
    if (collect)
        startIdx = 1;

    auto emit = [&sorter](Term t) { sorter.add(std::move(t)); };

    auto streamTerms = [&](size_t beginTerm, size_t endTerm) {
        if (collect) {
            const Statement& c = *m.program[0];
            if (e.bracketSyms.empty())
                throw RuntimeError{"Collect needs a bracketed expression from the previous module"};
            const NameInfo& funInfo = table_.info(c.collectFun);
            size_t pos = beginTerm;
            while (pos < endTerm) {
                Term key, content;
                splitBracket(e.terms[pos], e.bracketSyms, key, content);
                key.coeff = Rational(1);
                SmallExpr inside{content};
                size_t q = pos + 1;
                for (; q < endTerm; ++q) {
                    Term k2, c2;
                    splitBracket(e.terms[q], e.bracketSyms, k2, c2);
                    if (compareIdentity(k2, key) != 0)
                        break;
                    inside.push_back(c2);
                }
                canonicalize(inside);
                if (termSize(Term{Rational(1)}) + static_cast<long>(inside.size()) >
                    limits_.maxTermSize)
                    throw RuntimeError{"Collect contents exceed MaxTermSize"};
                Term out = key;
                out.parts.push_back(SubTerm::func(c.collectFun, {std::move(inside)},
                                                  funInfo.cls != NameClass::NFunction,
                                                  funInfo.sym));
                auto n = normalize(std::move(out), limits_);
                if (n)
                    execProgram(host, m.program, startIdx, std::move(*n), emit);
                pos = q;
            }
        } else {
            for (size_t i = beginTerm; i < endTerm; ++i)
                execProgram(host, m.program, startIdx, e.terms[i], emit);
        }
    };

    int chunks = chunking_;
    if (chunks <= 1 || e.terms.empty()) {
        streamTerms(0, e.terms.size());
    } else {
        // chunked processing with per-chunk $ copies, merged by module option
        std::vector<std::string> assigned;
        collectDollarAssigns(m.program, assigned);
        for (const std::string& name : assigned) {
            const DollarVar* v = dollars_.find(name);
            if (!v || v->mode == MergeMode::None)
                throw RuntimeError{"$-variable $" + name +
                                   " needs a moduleoption for chunked execution"};
        }
        DollarStore base = dollars_;
        std::map<std::string, std::vector<SmallExpr>> finals;
        size_t n = e.terms.size();
        size_t per = (n + static_cast<size_t>(chunks) - 1) / static_cast<size_t>(chunks);
        for (size_t begin = 0; begin < n; begin += per) {
            DollarStore chunkStore = base;
            activeDollars_ = &chunkStore;
            host.dollars = &chunkStore;
            streamTerms(begin, std::min(n, begin + per));
            for (const std::string& name : assigned)
                finals[name].push_back(chunkStore.at(name).value);
        }
        activeDollars_ = &dollars_;
        host.dollars = &dollars_;
        for (auto& [name, values] : finals) {
            MergeMode mode = dollars_.at(name).mode;
            if (mode == MergeMode::Local)
                continue; // value reverts to its pre-module contents
            SmallExpr merged = values[0];
            for (size_t k = 1; k < values.size(); ++k) {
                if (mode == MergeMode::Sum) {
                    merged = addSmall(merged, values[k]);
                } else {
                    auto a = asRational(merged), b = asRational(values[k]);
                    if (!a || !b)
                        throw RuntimeError{"maximum/minimum merge needs numeric $-values"};
                    bool take = mode == MergeMode::Maximum ? (*b > *a) : (*b < *a);
                    if (take)
                        merged = values[k];
                }
            }
            dollars_.set(name, merged);
        }
    }

    SortStats stats;
    e.terms = sorter.finish(stats);
    e.bracketSyms = m.bracketSyms;
    e.bracketIndexed = m.bracketPlus;
    e.index.reset();
    if (m.bracketPlus && !m.bracketSyms.empty()) {
        auto ix = std::make_shared<BracketIndex>(
            buildBracketIndex(e.terms, m.bracketSyms, cfg_.bracketIndexCap));
        e.index = std::move(ix);
    }
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    e.stats = stats;
    if (statsOn_)
        out_ << renderStats(e.name, stats);
}

void Session::executeModule(CompiledModule& m) {
    if (m.statsToggle)
        statsOn_ = *m.statsToggle;

    // status directives
    auto setStatus = [this](const std::vector<int>& ids, bool all, Expression::Status st) {
        for (auto& e : exprs_) {
            bool hit = all;
            if (!hit)
                hit = std::find(ids.begin(), ids.end(), e->id) != ids.end();
            if (hit && e->status != Expression::Status::Dropped)
                e->status = st;
        }
    };
    if (m.unhideAll || !m.unhide.empty())
        setStatus(m.unhide, m.unhideAll, Expression::Status::Active);
    if (m.hideAll || !m.hide.empty())
        setStatus(m.hide, m.hideAll, Expression::Status::Hidden);

    // dollar merge modes for this module
    for (auto& [name, mode] : m.dollarModes) {
        if (!dollars_.has(name))
            dollars_.set(name, exprNumber(Rational(0)));
        dollars_.setMode(name, mode);
    }

    // table fills
    for (const TableFill& f : m.fills) {
        EvalCtx ctx{table_, limits_};
        ctx.dollars = activeDollars_;
        ctx.tables = &tables_;
        ctx.expressions = [this](int id) { return exprById(id); };
        TableDef* def = tables_.find(f.funId);
        SmallExpr v = evalTree(f.value, ctx);
        def->fills[f.key] = evalBuiltinsPost(std::move(v), ctx);
    }

    // new definitions
    for (const Definition& d : m.defs) {
        EvalCtx ctx{table_, limits_};
        ctx.dollars = activeDollars_;
        ctx.tables = &tables_;
        ctx.expressions = [this](int id) { return exprById(id); };
        SmallExpr terms = evalTree(d.rhs, ctx);
        terms = evalBuiltinsPost(std::move(terms), ctx);
        Expression* e = nullptr;
        auto it = exprIndex_.find(d.nameId);
        if (it != exprIndex_.end()) {
            e = it->second;
        } else {
            exprs_.push_back(std::make_unique<Expression>());
            e = exprs_.back().get();
            exprIndex_[d.nameId] = e;
        }
        e->name = d.name;
        e->id = d.nameId;
        e->status = Expression::Status::Active;
        e->terms = std::move(terms);
        e->bracketSyms.clear();
        e->index.reset();
    }

    // skip marks (this module only)
    std::vector<int> skipped = m.skips;

    for (auto& e : exprs_) {
        if (e->status != Expression::Status::Active)
            continue;
        bool skip = m.skipAll ||
                    std::find(skipped.begin(), skipped.end(), e->id) != skipped.end();
        if (skip)
            continue;
        processExpression(*e, m);
    }

    // end-of-module prints
    if (m.endPrint) {
        PrintOptions opt;
        opt.oneTermPerLine = m.endPrint->perLine;
        for (auto& e : exprs_) {
            if (e->status != Expression::Status::Active)
                continue;
            if (!m.endPrint->all &&
                std::find(m.endPrint->names.begin(), m.endPrint->names.end(), e->id) ==
                    m.endPrint->names.end())
                continue;
            out_ << renderExpression(*e, table_, opt);
        }
    }

    // drops
    if (m.dropAll || !m.drops.empty()) {
        for (auto& e : exprs_) {
            bool hit = m.dropAll && e->status == Expression::Status::Active;
            if (!hit)
                hit = std::find(m.drops.begin(), m.drops.end(), e->id) != m.drops.end();
            if (hit)
                e->status = Expression::Status::Dropped;
        }
    }

    // merge modes are per module
    for (auto& [name, var] : dollars_.all())
        var.mode = MergeMode::None;
}

} // namespace miniform

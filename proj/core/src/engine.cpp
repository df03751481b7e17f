#include "miniform/engine.hpp"

#include <algorithm>

#include "miniform/print.hpp"
#include "miniform/topology.hpp"

namespace miniform {

namespace {

EvalCtx makeCtx(ExecHost& host, const Term* current) {
    EvalCtx ctx{host.table, host.limits};
    ctx.dollars = host.dollars;
    ctx.tables = host.tables;
    ctx.expressions = host.exprById;
    ctx.currentTerm = current;
    return ctx;
}

Rational condValue(ExecHost& host, const CondValue& v, const Term& term) {
    switch (v.kind) {
    case CondValue::Number:
        return v.number;
    case CondValue::DollarRef: {
        if (!host.dollars)
            throw RuntimeError{"$-variable in condition without a dollar store"};
        const DollarVar* d = host.dollars->find(v.dollar);
        if (!d)
            throw RuntimeError{"Undefined $-variable $" + v.dollar};
        auto r = asRational(d->value);
        if (!r)
            throw RuntimeError{"$" + v.dollar + " is not numeric in a comparison"};
        return *r;
    }
    case CondValue::CountOf: {
        Rational total(0);
        for (const auto& [symId, weight] : v.countPairs)
            for (const SubTerm& p : term.parts)
                if (p.kind == PartKind::Sym && p.id == symId)
                    total += weight * Rational(p.exp);
        return total;
    }
    case CondValue::ExprMember: {
        bool in = host.currentExpr && host.currentExpr->id == v.exprNameId;
        return Rational(in ? 1 : 0);
    }
    }
    return Rational(0);
}

} // namespace

bool evalCondition(ExecHost& host, const Cond& c, const Term& term) {
    switch (c.kind) {
    case Cond::And:
        for (const Cond& ch : c.children)
            if (!evalCondition(host, ch, term))
                return false;
        return true;
    case Cond::Or:
        for (const Cond& ch : c.children)
            if (evalCondition(host, ch, term))
                return true;
        return false;
    case Cond::Cmp: {
        Rational l = condValue(host, c.lhs, term);
        Rational r = condValue(host, c.rhs, term);
        switch (c.op) {
        case Cond::LT: return l < r;
        case Cond::LE: return l <= r;
        case Cond::GT: return l > r;
        case Cond::GE: return l >= r;
        case Cond::EQ: return l == r;
        case Cond::NE: return l != r;
        }
    }
    }
    return false;
}

namespace {

using Sink = std::function<void(Term, bool)>; // (term, matchedOnPath)

void execSeq(ExecHost& host, const std::vector<StmtPtr>& stmts, size_t idx, Term t,
             bool matched, const Sink& done);

// one repeat pass per term path; re-enters while a statement matched
void execRepeat(ExecHost& host, const Statement& rep, Term t, long depth, const Sink& out) {
    if (depth > host.limits.maxRepeat)
        throw RuntimeError{"repeat exceeds the iteration limit (non-terminating rule set?)"};
    execSeq(host, rep.body, 0, std::move(t), false,
            [&host, &rep, depth, &out](Term r, bool m) {
                if (m)
                    execRepeat(host, rep, std::move(r), depth + 1, out);
                else
                    out(std::move(r), depth > 0); // whether the repeat changed anything
            });
}

void runTermEnvironment(ExecHost& host, const Statement& envStmt, Term t,
                        std::vector<Term>& result) {
    // split body into segments at inner sort statements
    std::vector<std::pair<size_t, size_t>> segments;
    size_t start = 0;
    for (size_t i = 0; i < envStmt.body.size(); ++i) {
        if (envStmt.body[i]->op == Statement::InnerSort) {
            segments.emplace_back(start, i);
            start = i + 1;
        }
    }
    segments.emplace_back(start, envStmt.body.size());

    std::vector<Term> priv{std::move(t)};
    for (size_t sgi = 0; sgi < segments.size(); ++sgi) {
        auto [b, e] = segments[sgi];
        std::vector<StmtPtr> segment(envStmt.body.begin() + static_cast<long>(b),
                                     envStmt.body.begin() + static_cast<long>(e));
        std::vector<Term> next;
        for (Term& pt : priv) {
            execSeq(host, segment, 0, std::move(pt), false,
                    [&next](Term r, bool) { next.push_back(std::move(r)); });
        }
        bool sortNow = sgi + 1 < segments.size();
        if (sortNow)
            canonicalize(next);
        priv = std::move(next);
    }
    result = std::move(priv);
}

Term splitArguments(ExecHost& host, const Statement& s, const Term& t) {
    Term out(t.coeff);
    bool changed = false;
    for (const SubTerm& p : t.parts) {
        if (p.kind != PartKind::Fun ||
            std::find(s.splitFuns.begin(), s.splitFuns.end(), p.id) == s.splitFuns.end()) {
            out.parts.push_back(p);
            continue;
        }
        SubTerm f = p;
        std::vector<SmallExpr> args;
        for (const SmallExpr& a : f.args) {
            if (a.size() <= 1) {
                args.push_back(a); // a single term does not get split
                continue;
            }
            if (s.splitMarker) {
                SmallExpr without, with;
                for (const Term& at : a) {
                    if (containsMatch(*s.splitMarker, at, host.table))
                        with.push_back(at);
                    else
                        without.push_back(at);
                }
                if (without.empty() || with.empty()) {
                    args.push_back(a);
                    continue;
                }
                args.push_back(std::move(without));
                args.push_back(std::move(with));
                changed = true;
            } else {
                for (const Term& at : a)
                    args.push_back(SmallExpr{at});
                changed = true;
            }
        }
        f.args = std::move(args);
        out.parts.push_back(std::move(f));
    }
    if (!changed)
        return t;
    auto n = normalize(std::move(out), host.limits);
    if (!n)
        return Term{}; // vanished via antisymmetry after the split
    return *n;
}

void execSeq(ExecHost& host, const std::vector<StmtPtr>& stmts, size_t idx, Term t,
             bool matched, const Sink& done) {
    if (t.coeff.isZero())
        return;
    if (idx >= stmts.size()) {
        done(std::move(t), matched);
        return;
    }
    const Statement& s = *stmts[idx];
    host.currentStmt = &s;

    switch (s.op) {
    case Statement::Id: {
        EvalCtx ctx = makeCtx(host, &t);
        IdApplyResult r = applyId(s.pattern, s.rhs, t, ctx);
        for (Term& o : r.out)
            execSeq(host, stmts, idx + 1, std::move(o), matched || r.matched, done);
        return;
    }
    case Statement::Multiply: {
        EvalCtx ctx = makeCtx(host, &t);
        SmallExpr v = evalTree(s.rhs, ctx);
        v = evalBuiltinsPost(std::move(v), ctx);
        for (const Term& f : v) {
            auto n = normalize(mulRaw(t, f), host.limits);
            if (n)
                execSeq(host, stmts, idx + 1, std::move(*n), matched, done);
        }
        return;
    }
    case Statement::DollarAssign: {
        EvalCtx ctx = makeCtx(host, &t);
        SmallExpr v = evalTree(s.rhs, ctx);
        v = evalBuiltinsPost(std::move(v), ctx);
        if (!host.dollars)
            throw RuntimeError{"$-assignment without a dollar store"};
        host.dollars->set(s.dollarName, std::move(v));
        execSeq(host, stmts, idx + 1, std::move(t), matched, done);
        return;
    }
    case Statement::PrintTerm: {
        if (host.out) {
            std::string line;
            const std::string& f = s.format;
            for (size_t i = 0; i < f.size(); ++i) {
                if (f[i] == '%' && i + 1 < f.size() && f[i + 1] == 't') {
                    line += renderTermSigned(t, host.table);
                    ++i;
                } else if (f[i] == '%' && i + 1 < f.size() && f[i + 1] == '%') {
                    line += '%';
                    ++i;
                } else if (f[i] == '\\' && i + 1 < f.size() && f[i + 1] == 'n') {
                    line += '\n';
                    ++i;
                } else {
                    line += f[i];
                }
            }
            *host.out << line << "\n";
        }
        execSeq(host, stmts, idx + 1, std::move(t), matched, done);
        return;
    }
    case Statement::If: {
        for (const Statement::Branch& br : s.branches) {
            if (br.isElse || evalCondition(host, br.cond, t)) {
                if (br.body.empty()) {
                    execSeq(host, stmts, idx + 1, std::move(t), matched, done);
                } else {
                    execSeq(host, br.body, 0, std::move(t), matched,
                            [&host, &stmts, idx, &done](Term r, bool m) {
                                execSeq(host, stmts, idx + 1, std::move(r), m, done);
                            });
                }
                return;
            }
        }
        execSeq(host, stmts, idx + 1, std::move(t), matched, done);
        return;
    }
    case Statement::Repeat: {
        execRepeat(host, s, std::move(t), 0,
                   [&host, &stmts, idx, matched, &done](Term r, bool m) {
                       execSeq(host, stmts, idx + 1, std::move(r), matched || m, done);
                   });
        return;
    }
    case Statement::TermEnv: {
        std::vector<Term> result;
        runTermEnvironment(host, s, std::move(t), result);
        for (Term& r : result)
            execSeq(host, stmts, idx + 1, std::move(r), matched, done);
        return;
    }
    case Statement::InnerSort:
        // segmentation consumes these; reaching one here means it was nested
        throw RuntimeError{"sort statement must appear directly inside a term environment"};
    case Statement::SplitArgOp: {
        Term r = splitArguments(host, s, t);
        if (!r.coeff.isZero())
            execSeq(host, stmts, idx + 1, std::move(r), matched, done);
        return;
    }
    case Statement::ReplaceLoopOp: {
        auto r = replaceLoop(t, s.rlFun, s.rlArgCount, s.rlLoopSize, s.rlOutFun, host.table,
                             host.limits);
        if (!r) {
            execSeq(host, stmts, idx + 1, std::move(t), matched, done);
        } else if (!r->coeff.isZero()) {
            execSeq(host, stmts, idx + 1, std::move(*r), true, done);
        }
        return;
    }
    case Statement::CollectOp:
        throw RuntimeError{"Collect must be the first statement of a module"};
    }
}

} // namespace

void execProgram(ExecHost& host, const std::vector<StmtPtr>& program, size_t startIdx, Term t,
                 const std::function<void(Term)>& emit) {
    try {
        execSeq(host, program, startIdx, std::move(t), false,
                [&emit](Term r, bool) { emit(std::move(r)); });
    } catch (const TermError& e) {
        throw RuntimeError{e.message};
    } catch (const std::domain_error&) {
        throw RuntimeError{"Division by zero"};
    }
}

void collectDollarAssigns(const std::vector<StmtPtr>& program, std::vector<std::string>& names) {
    for (const StmtPtr& s : program) {
        if (s->op == Statement::DollarAssign)
            names.push_back(s->dollarName);
        collectDollarAssigns(s->body, names);
        for (const Statement::Branch& br : s->branches)
            collectDollarAssigns(br.body, names);
    }
}

} // namespace miniform

#include "miniform/eval.hpp"

#include <stdexcept>

#include "miniform/bracket.hpp"

namespace miniform {

const DollarVar* DollarStore::find(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second;
}

void DollarStore::set(const std::string& name, SmallExpr value) {
    map_[name].value = std::move(value);
}

void DollarStore::setMode(const std::string& name, MergeMode m) {
    map_[name].mode = m;
}

TableDef& TableStore::define(int funId, int dim) {
    TableDef& d = map_[funId];
    d.dim = dim;
    return d;
}

const TableDef* TableStore::find(int funId) const {
    auto it = map_.find(funId);
    return it == map_.end() ? nullptr : &it->second;
}

TableDef* TableStore::find(int funId) {
    auto it = map_.find(funId);
    return it == map_.end() ? nullptr : &it->second;
}

namespace {

SmallExpr substituteIdInSmall(const SmallExpr& e, int id, long v, EvalCtx& ctx, int depth);

Term substituteIdInTerm(const Term& t, int id, long v, EvalCtx& ctx, int depth, bool& vanished) {
    Term out(t.coeff);
    vanished = false;
    for (const SubTerm& p : t.parts) {
        switch (p.kind) {
        case PartKind::Sym:
            if (p.id == id) {
                out.coeff *= Rational(v).pow(p.exp);
                if (out.coeff.isZero()) {
                    vanished = true;
                    return out;
                }
            } else {
                out.parts.push_back(p);
            }
            break;
        case PartKind::Idx:
            if (p.id == id)
                throw RuntimeError{"Cannot substitute a loose index by a number"};
            out.parts.push_back(p);
            break;
        case PartKind::Fun: {
            SubTerm f = p;
            for (SmallExpr& a : f.args)
                a = substituteIdInSmall(a, id, v, ctx, depth);
            out.parts.push_back(std::move(f));
            break;
        }
        }
    }
    return out;
}

SmallExpr substituteIdInSmall(const SmallExpr& e, int id, long v, EvalCtx& ctx, int depth) {
    SmallExpr out;
    out.reserve(e.size());
    for (const Term& t : e) {
        // an argument that is just the index/symbol becomes the number
        if (t.parts.size() == 1 && t.parts[0].kind == PartKind::Idx && t.parts[0].id == id) {
            Term n(t.coeff * Rational(v));
            if (!n.coeff.isZero())
                out.push_back(std::move(n));
            continue;
        }
        bool vanished = false;
        Term s = substituteIdInTerm(t, id, v, ctx, depth, vanished);
        if (!vanished) {
            auto n = normalize(std::move(s), ctx.limits);
            if (n)
                out.push_back(std::move(*n));
        }
    }
    canonicalize(out);
    return out;
}

std::optional<std::vector<long>> allIntegerArgs(const std::vector<SmallExpr>& args) {
    std::vector<long> vals;
    vals.reserve(args.size());
    for (const SmallExpr& a : args) {
        auto r = asRational(a);
        if (!r || !r->isInteger())
            return std::nullopt;
        auto l = r->toLong();
        if (!l)
            return std::nullopt;
        vals.push_back(*l);
    }
    return vals;
}

SmallExpr negSmall(SmallExpr e) {
    for (Term& t : e)
        t.coeff = -t.coeff;
    return e;
}

SmallExpr divideSmall(const SmallExpr& num, const SmallExpr& den, const TermLimits& limits) {
    if (den.empty())
        throw RuntimeError{"Division by zero"};
    if (den.size() != 1)
        throw RuntimeError{"Division by a multi-term expression"};
    SmallExpr inv{invertTerm(den[0])};
    return mulSmall(num, inv, limits);
}

} // namespace

SmallExpr evalBuiltinsPost(SmallExpr e, EvalCtx& ctx, int depth) {
    if (depth > 64)
        throw RuntimeError{"Table substitution recursion too deep"};
    bool any = false;
    SmallExpr result;
    for (Term& t : e) {
        const Builtins& b = ctx.table.builtins();
        size_t hit = t.parts.size();
        SmallExpr value;
        for (size_t i = 0; i < t.parts.size(); ++i) {
            const SubTerm& p = t.parts[i];
            if (p.kind != PartKind::Fun)
                continue;
            if (p.id == b.sig && p.args.size() == 1) {
                auto r = asRational(p.args[0]);
                if (r) {
                    hit = i;
                    value = exprNumber(Rational(r->sign()));
                    break;
                }
            }
            const NameInfo& info = ctx.table.info(p.id);
            if (info.cls == NameClass::Table && ctx.tables) {
                const TableDef* def = ctx.tables->find(p.id);
                if (def && static_cast<int>(p.args.size()) == def->dim) {
                    auto vals = allIntegerArgs(p.args);
                    if (vals) {
                        auto it = def->fills.find(*vals);
                        if (it != def->fills.end()) {
                            hit = i;
                            value = it->second;
                            break;
                        }
                    }
                }
            }
        }
        if (hit == t.parts.size()) {
            result.push_back(std::move(t));
            continue;
        }
        any = true;
        Term rest(t.coeff);
        for (size_t i = 0; i < t.parts.size(); ++i)
            if (i != hit)
                rest.parts.push_back(t.parts[i]);
        for (const Term& vt : value) {
            auto n = normalize(mulRaw(rest, vt), ctx.limits);
            if (n)
                result.push_back(std::move(*n));
        }
    }
    canonicalize(result);
    if (any)
        return evalBuiltinsPost(std::move(result), ctx, depth + 1);
    return result;
}

namespace {

SmallExpr evalNode(const TreePtr& tree, EvalCtx& ctx);

long evalIntegerOperand(const TreePtr& tree, EvalCtx& ctx, const char* what) {
    SmallExpr e = evalNode(tree, ctx);
    auto r = asRational(e);
    if (!r || !r->isInteger())
        throw RuntimeError{std::string(what) + " must be an integer"};
    auto l = r->toLong();
    if (!l)
        throw RuntimeError{std::string(what) + " out of range"};
    return *l;
}

SmallExpr evalCall(const TreePtr& tree, EvalCtx& ctx) {
    const Builtins& b = ctx.table.builtins();
    const NameInfo& info = ctx.table.info(tree->id);

    // argument list; ?a splices its bound list
    std::vector<SmallExpr> args;
    for (const TreePtr& c : tree->children) {
        if (c->kind == TreeNode::ArgField) {
            if (!ctx.bindings)
                throw RuntimeError{"Argument field wildcard outside a substitution"};
            auto it = ctx.bindings->find(c->id);
            if (it == ctx.bindings->end() || it->second.kind != Bound::ArgList)
                throw RuntimeError{"Unbound argument field wildcard in replacement"};
            for (const SmallExpr& a : it->second.list)
                args.push_back(a);
        } else {
            args.push_back(evalNode(c, ctx));
        }
    }

    if (tree->id == b.sum) {
        if (args.size() != 4)
            throw RuntimeError{"sum_ needs 4 arguments"};
        const SmallExpr& idx = args[0];
        if (idx.size() != 1 || idx[0].parts.size() != 1 || !(idx[0].coeff == Rational(1)))
            throw RuntimeError{"sum_: first argument must be a symbol or an index"};
        int id = idx[0].parts[0].id;
        auto lo = asRational(args[1]);
        auto hi = asRational(args[2]);
        if (!lo || !hi || !lo->isInteger() || !hi->isInteger())
            throw RuntimeError{"sum_ bounds must be integers"};
        long l = *lo->toLong(), h = *hi->toLong();
        SmallExpr acc;
        for (long v = l; v <= h; ++v) {
            SmallExpr s = substituteIdInSmall(args[3], id, v, ctx, 0);
            s = evalBuiltinsPost(std::move(s), ctx);
            acc = addSmall(acc, s);
        }
        return acc;
    }
    if (tree->id == b.sig) {
        if (args.size() != 1)
            throw RuntimeError{"sig_ needs 1 argument"};
        auto r = asRational(args[0]);
        if (r)
            return exprNumber(Rational(r->sign()));
        // stays symbolic
    }
    if (tree->id == b.count) {
        if (!ctx.currentTerm)
            throw RuntimeError{"count_ used outside a term context"};
        if (args.size() % 2 != 0 || args.empty())
            throw RuntimeError{"count_ needs symbol,weight pairs"};
        Rational total(0);
        for (size_t i = 0; i < args.size(); i += 2) {
            const SmallExpr& s = args[i];
            if (s.size() != 1 || s[0].parts.size() != 1 ||
                s[0].parts[0].kind != PartKind::Sym)
                throw RuntimeError{"count_: expected a symbol"};
            int id = s[0].parts[0].id;
            auto w = asRational(args[i + 1]);
            if (!w)
                throw RuntimeError{"count_: expected a numeric weight"};
            for (const SubTerm& p : ctx.currentTerm->parts)
                if (p.kind == PartKind::Sym && p.id == id)
                    total += *w * Rational(p.exp);
        }
        return exprNumber(total);
    }
    if (info.cls == NameClass::Table && ctx.tables) {
        const TableDef* def = ctx.tables->find(tree->id);
        if (def && static_cast<int>(args.size()) == def->dim) {
            auto vals = allIntegerArgs(args);
            if (vals) {
                auto it = def->fills.find(*vals);
                if (it != def->fills.end())
                    return it->second;
            }
        }
    }

    Term t{Rational(1)};
    t.parts.push_back(SubTerm::func(tree->id, std::move(args),
                                    info.cls != NameClass::NFunction, info.sym));
    auto n = normalize(std::move(t), ctx.limits);
    if (!n)
        return {};
    return SmallExpr{std::move(*n)};
}

SmallExpr evalNode(const TreePtr& tree, EvalCtx& ctx) {
    switch (tree->kind) {
    case TreeNode::Number:
        return exprNumber(tree->number);
    case TreeNode::Symbol:
    case TreeNode::Index: {
        // inside a replacement, a name bound as a wildcard refers to its match
        if (ctx.bindings) {
            auto it = ctx.bindings->find(tree->id);
            if (it != ctx.bindings->end() && it->second.kind == Bound::Value)
                return it->second.value;
        }
        return tree->kind == TreeNode::Symbol ? exprSymbol(tree->id) : exprIndex(tree->id);
    }
    case TreeNode::Add: {
        SmallExpr acc;
        for (size_t i = 0; i < tree->children.size(); ++i) {
            SmallExpr c = evalNode(tree->children[i], ctx);
            if (tree->signs[i] < 0)
                c = negSmall(std::move(c));
            acc = addSmall(acc, c);
        }
        return acc;
    }
    case TreeNode::Mul: {
        SmallExpr acc = exprNumber(Rational(1));
        for (size_t i = 0; i < tree->children.size(); ++i) {
            SmallExpr c = evalNode(tree->children[i], ctx);
            if (tree->inverted[i])
                acc = divideSmall(acc, c, ctx.limits);
            else
                acc = mulSmall(acc, c, ctx.limits);
        }
        return acc;
    }
    case TreeNode::Pow: {
        long e = evalIntegerOperand(tree->children[1], ctx, "Exponent");
        SmallExpr base = evalNode(tree->children[0], ctx);
        return powSmall(base, e, ctx.limits);
    }
    case TreeNode::Dollar: {
        if (!ctx.dollars)
            throw RuntimeError{"$-variable " + tree->name + " not available here"};
        const DollarVar* v = ctx.dollars->find(tree->name);
        if (!v)
            throw RuntimeError{"Undefined $-variable $" + tree->name};
        return v->value;
    }
    case TreeNode::ExprRef: {
        if (!ctx.expressions)
            throw RuntimeError{"Expression reference not available here"};
        const Expression* e = ctx.expressions(tree->id);
        if (!e)
            throw RuntimeError{"Expression " + ctx.table.info(tree->id).name + " has no contents"};
        if (tree->children.empty())
            return e->terms;
        // bracket lookup
        SmallExpr keyExpr = evalNode(tree->children[0], ctx);
        auto key = [&]() -> Term {
            if (keyExpr.empty())
                throw RuntimeError{"Bracket key cannot be zero"};
            if (keyExpr.size() != 1)
                throw RuntimeError{"Bracket key must be a single term"};
            Term k = keyExpr[0];
            k.coeff = Rational(1);
            return k;
        }();
        if (e->bracketSyms.empty())
            throw RuntimeError{"Expression " + e->name + " has no brackets"};
        return lookupBracket(*e, key);
    }
    case TreeNode::Wildcard: {
        if (!ctx.bindings)
            throw RuntimeError{"Wildcard outside a substitution"};
        auto it = ctx.bindings->find(tree->id);
        if (it == ctx.bindings->end() || it->second.kind != Bound::Value)
            throw RuntimeError{"Unbound wildcard " + ctx.table.info(tree->id).name +
                               "? in replacement"};
        return it->second.value;
    }
    case TreeNode::ArgField:
        throw RuntimeError{"Argument field wildcard is only valid as a function argument"};
    case TreeNode::Call:
        return evalCall(tree, ctx);
    }
    throw RuntimeError{"Unhandled expression node"};
}

} // namespace

SmallExpr evalTree(const TreePtr& tree, EvalCtx& ctx) {
    try {
        return evalNode(tree, ctx);
    } catch (const std::domain_error&) {
        throw RuntimeError{"Division by zero"};
    } catch (const TermError& e) {
        throw RuntimeError{e.message};
    }
}

SmallExpr evalStatic(const TreePtr& tree, SymbolTable& table, const TermLimits& limits) {
    EvalCtx ctx{table, limits};
    return evalTree(tree, ctx);
}

IdApplyResult applyId(const Pattern& p, const TreePtr& replacement, const Term& term,
                      EvalCtx& ctx) {
    IdApplyResult res;
    Term work = term;
    SmallExpr factor = exprNumber(Rational(1));
    long guard = 0;
    bool matchedAny = false;
    while (true) {
        if (++guard > ctx.limits.maxRepeat)
            throw RuntimeError{"Substitution does not terminate"};
        auto m = matchPattern(p, work, ctx.table);
        if (!m)
            break;
        matchedAny = true;
        // multiplicity: symbol-only patterns consume all factors
        long q = 1;
        bool hasRigid = false;
        for (const PatternPart& part : p.parts)
            if (part.kind == PatternPart::FunPart || part.kind == PatternPart::IdxPart)
                hasRigid = true;
        if (!hasRigid && !m->symConsume.empty()) {
            q = 0;
            for (auto [pos, k] : m->symConsume) {
                long n = work.parts[pos].exp;
                long fit = n / k; // same sign, |k| <= |n|
                q = q == 0 ? fit : std::min(q, fit);
            }
            if (q < 1)
                q = 1;
        }
        // consume matched parts
        std::vector<bool> remove(work.parts.size(), false);
        for (size_t pos : m->funParts)
            remove[pos] = true;
        Term next(work.coeff);
        for (size_t i = 0; i < work.parts.size(); ++i) {
            if (remove[i])
                continue;
            SubTerm part = work.parts[i];
            for (auto [pos, k] : m->symConsume) {
                if (pos == i) {
                    part.exp -= k * q;
                    break;
                }
            }
            if (part.kind == PartKind::Sym && part.exp == 0)
                continue;
            next.parts.push_back(std::move(part));
        }
        work = std::move(next);

        EvalCtx sub = ctx;
        sub.bindings = &m->bindings;
        SmallExpr rep = evalTree(replacement, sub);
        rep = evalBuiltinsPost(std::move(rep), sub);
        if (q != 1)
            rep = powSmall(rep, q, ctx.limits);
        if (p.signFactor < 0)
            rep = negSmall(std::move(rep));
        try {
            factor = mulSmall(factor, rep, ctx.limits);
        } catch (const TermError& e) {
            throw RuntimeError{e.message};
        }
    }
    if (!matchedAny) {
        res.out.push_back(term);
        res.matched = false;
        return res;
    }
    for (const Term& f : factor) {
        auto n = normalize(mulRaw(work, f), ctx.limits);
        if (n)
            res.out.push_back(std::move(*n));
    }
    res.matched = true;
    return res;
}

} // namespace miniform

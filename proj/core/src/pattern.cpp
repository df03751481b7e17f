#include "miniform/pattern.hpp"

#include <algorithm>

#include "miniform/eval.hpp"

namespace miniform {

namespace {

struct PatternCompiler {
    SymbolTable& table;
    const TermLimits& limits;

    CompiledRestrict compileRestrict(const WildRestrict& r) {
        CompiledRestrict c;
        switch (r.kind) {
        case WildRestrict::None: c.kind = CompiledRestrict::None; break;
        case WildRestrict::Number: c.kind = CompiledRestrict::Number; break;
        case WildRestrict::InSet: c.kind = CompiledRestrict::InSet; break;
        case WildRestrict::NotInSet: c.kind = CompiledRestrict::NotInSet; break;
        }
        for (const TreePtr& lit : r.literals)
            c.literals.push_back(evalStatic(lit, table, limits));
        c.wildRefs = r.wildRefs;
        return c;
    }

    PatternArg compileArg(const TreePtr& t, bool insideRigid) {
        PatternArg a;
        switch (t->kind) {
        case TreeNode::Wildcard:
            a.kind = PatternArg::Wild;
            a.wildId = t->id;
            a.restr = compileRestrict(t->restrict_);
            return a;
        case TreeNode::ArgField:
            if (insideRigid)
                throw PatternError{
                    "Argument field wildcard inside a (anti)symmetric function"};
            a.kind = PatternArg::ArgField;
            a.wildId = t->id;
            return a;
        case TreeNode::Call: {
            if (treeHasWildcards(t)) {
                const NameInfo& f = table.info(t->id);
                bool rigid = f.sym == Symmetry::Symmetric || f.sym == Symmetry::Antisymmetric;
                a.kind = PatternArg::FunPat;
                a.funId = t->id;
                for (const TreePtr& c : t->children)
                    a.args.push_back(compileArg(c, rigid));
                return a;
            }
            break;
        }
        default:
            break;
        }
        if (treeHasWildcards(t))
            throw PatternError{"Pattern argument too complicated"};
        a.kind = PatternArg::Lit;
        a.lit = evalStatic(t, table, limits);
        return a;
    }

    static bool treeHasWildcards(const TreePtr& t) {
        if (t->kind == TreeNode::Wildcard || t->kind == TreeNode::ArgField)
            return true;
        for (const TreePtr& c : t->children)
            if (treeHasWildcards(c))
                return true;
        return false;
    }

    void compileFactor(const TreePtr& t, long exp, Pattern& out) {
        switch (t->kind) {
        case TreeNode::Symbol: {
            PatternPart p;
            p.kind = PatternPart::SymPow;
            p.id = t->id;
            p.exp = exp;
            out.parts.push_back(std::move(p));
            return;
        }
        case TreeNode::Index: {
            if (exp != 1)
                throw PatternError{"Cannot raise an index to a power"};
            PatternPart p;
            p.kind = PatternPart::IdxPart;
            p.id = t->id;
            out.parts.push_back(std::move(p));
            return;
        }
        case TreeNode::Wildcard: {
            PatternPart p;
            p.kind = PatternPart::WildSym;
            p.id = t->id;
            p.exp = exp;
            p.restr = compileRestrict(t->restrict_);
            out.parts.push_back(std::move(p));
            return;
        }
        case TreeNode::Call: {
            if (exp != 1)
                throw PatternError{"Cannot raise a function to a power in a pattern"};
            const NameInfo& f = table.info(t->id);
            bool rigid = f.sym == Symmetry::Symmetric || f.sym == Symmetry::Antisymmetric;
            PatternPart p;
            p.kind = PatternPart::FunPart;
            p.id = t->id;
            p.commuting = f.cls != NameClass::NFunction;
            p.sym = f.sym;
            bool wild = false;
            for (const TreePtr& c : t->children) {
                p.args.push_back(compileArg(c, rigid));
                if (p.args.back().kind != PatternArg::Lit)
                    wild = true;
            }
            // wildcard-free arguments of a symmetric function: canonical form
            // matching suffices, so canonicalize once here
            if (!wild && f.sym != Symmetry::None) {
                SubTerm st = SubTerm::func(t->id, {}, p.commuting, f.sym);
                for (PatternArg& a : p.args)
                    st.args.push_back(a.lit);
                int s = symmetrize(st);
                if (s == 0)
                    throw PatternError{"Pattern is identically zero"};
                if (s < 0)
                    out.signFactor = -out.signFactor;
                for (size_t i = 0; i < p.args.size(); ++i)
                    p.args[i].lit = st.args[i];
            }
            out.parts.push_back(std::move(p));
            return;
        }
        case TreeNode::Pow: {
            const TreePtr& e = t->children[1];
            if (e->kind != TreeNode::Number || !e->number.isInteger())
                throw PatternError{"Pattern exponent must be an integer literal"};
            auto n = e->number.toLong();
            if (!n || *n == 0)
                throw PatternError{"Bad pattern exponent"};
            compileFactor(t->children[0], exp * *n, out);
            return;
        }
        case TreeNode::Number:
            if (e_isOne(t->number) && exp > 0)
                return; // multiplying by one
            throw PatternError{"Numeric coefficients are not allowed in patterns"};
        default:
            throw PatternError{"Pattern too complicated"};
        }
    }

    static bool e_isOne(const Rational& r) { return r == Rational(1); }

    Pattern run(const TreePtr& tree) {
        Pattern out;
        if (tree->kind == TreeNode::Mul) {
            for (size_t i = 0; i < tree->children.size(); ++i) {
                if (tree->inverted[i])
                    throw PatternError{"Division is not allowed in patterns"};
                compileFactor(tree->children[i], 1, out);
            }
        } else {
            compileFactor(tree, 1, out);
        }
        return out;
    }
};

} // namespace

Pattern compilePattern(const TreePtr& tree, SymbolTable& table, const TermLimits& limits) {
    PatternCompiler pc{table, limits};
    return pc.run(tree);
}

// --- matching ---------------------------------------------------------------

namespace {

struct Matcher {
    const Pattern& pat;
    const Term& term;
    const SymbolTable& table;
    std::vector<bool> used;
    Bindings bind;
    std::vector<size_t> funParts;
    std::vector<std::pair<size_t, long>> symConsume;
    // exclusion checks deferred until the referenced wildcard binds
    struct Pending {
        SmallExpr candidate;
        int refWild;
        bool mustDiffer;
    };
    std::vector<Pending> pending;

    explicit Matcher(const Pattern& p, const Term& t, const SymbolTable& tab)
        : pat(p), term(t), table(tab), used(t.parts.size(), false) {}

    bool bindValue(int wildId, const SmallExpr& v) {
        auto it = bind.find(wildId);
        if (it != bind.end())
            return it->second.kind == Bound::Value && equalSmallExpr(it->second.value, v);
        Bound b;
        b.kind = Bound::Value;
        b.value = v;
        bind.emplace(wildId, std::move(b));
        return true;
    }

    bool bindList(int wildId, std::vector<SmallExpr> list) {
        auto it = bind.find(wildId);
        if (it != bind.end()) {
            if (it->second.kind != Bound::ArgList || it->second.list.size() != list.size())
                return false;
            for (size_t i = 0; i < list.size(); ++i)
                if (!equalSmallExpr(it->second.list[i], list[i]))
                    return false;
            return true;
        }
        Bound b;
        b.kind = Bound::ArgList;
        b.list = std::move(list);
        bind.emplace(wildId, std::move(b));
        return true;
    }

    bool checkRestrict(const CompiledRestrict& r, const SmallExpr& v) {
        switch (r.kind) {
        case CompiledRestrict::None:
            return true;
        case CompiledRestrict::Number:
            return asRational(v).has_value();
        case CompiledRestrict::InSet: {
            for (const SmallExpr& lit : r.literals)
                if (equalSmallExpr(lit, v))
                    return true;
            for (int ref : r.wildRefs) {
                auto it = bind.find(ref);
                if (it != bind.end() && it->second.kind == Bound::Value &&
                    equalSmallExpr(it->second.value, v))
                    return true;
            }
            return r.literals.empty() && r.wildRefs.empty();
        }
        case CompiledRestrict::NotInSet: {
            for (const SmallExpr& lit : r.literals)
                if (equalSmallExpr(lit, v))
                    return false;
            for (int ref : r.wildRefs) {
                auto it = bind.find(ref);
                if (it == bind.end()) {
                    pending.push_back({v, ref, true});
                } else if (it->second.kind == Bound::Value &&
                           equalSmallExpr(it->second.value, v)) {
                    return false;
                }
            }
            return true;
        }
        }
        return true;
    }

    bool resolvePending() {
        for (const Pending& p : pending) {
            auto it = bind.find(p.refWild);
            if (it == bind.end())
                continue; // referenced wildcard never bound; vacuously satisfied
            if (it->second.kind == Bound::Value &&
                equalSmallExpr(it->second.value, p.candidate) == p.mustDiffer)
                return false;
        }
        return true;
    }

    bool matchArg(const PatternArg& a, const SmallExpr& v) {
        switch (a.kind) {
        case PatternArg::Lit:
            return equalSmallExpr(a.lit, v);
        case PatternArg::Wild:
            if (!checkRestrict(a.restr, v))
                return false;
            return bindValue(a.wildId, v);
        case PatternArg::FunPat: {
            if (v.size() != 1)
                return false;
            const Term& t = v[0];
            if (!(t.coeff == Rational(1)) || t.parts.size() != 1)
                return false;
            const SubTerm& p = t.parts[0];
            if (p.kind != PartKind::Fun || p.id != a.funId)
                return false;
            return matchArgList(a.args, p.args, 0, 0);
        }
        case PatternArg::ArgField:
            return false; // handled by matchArgList
        }
        return false;
    }

    bool matchArgList(const std::vector<PatternArg>& pargs, const std::vector<SmallExpr>& targs,
                      size_t pi, size_t ti) {
        if (pi == pargs.size())
            return ti == targs.size();
        const PatternArg& a = pargs[pi];
        if (a.kind == PatternArg::ArgField) {
            size_t remaining = targs.size() - ti;
            // minimum arguments the rest of the pattern needs
            size_t needed = 0;
            for (size_t k = pi + 1; k < pargs.size(); ++k)
                if (pargs[k].kind != PatternArg::ArgField)
                    ++needed;
            if (needed > remaining)
                return false;
            for (size_t len = 0; len <= remaining - needed; ++len) {
                Bindings savedB = bind;
                auto savedP = pending.size();
                std::vector<SmallExpr> slice(targs.begin() + static_cast<long>(ti),
                                             targs.begin() + static_cast<long>(ti + len));
                if (bindList(a.wildId, std::move(slice)) &&
                    matchArgList(pargs, targs, pi + 1, ti + len))
                    return true;
                bind = std::move(savedB);
                pending.resize(savedP);
            }
            return false;
        }
        if (ti >= targs.size())
            return false;
        Bindings savedB = bind;
        auto savedP = pending.size();
        if (matchArg(a, targs[ti]) && matchArgList(pargs, targs, pi + 1, ti + 1))
            return true;
        bind = std::move(savedB);
        pending.resize(savedP);
        return false;
    }

    static bool sameSignFits(long termExp, long patExp) {
        if (patExp > 0)
            return termExp >= patExp;
        return termExp <= patExp;
    }

    bool matchParts(size_t pi) {
        if (pi == pat.parts.size())
            return resolvePending();
        const PatternPart& p = pat.parts[pi];
        switch (p.kind) {
        case PatternPart::SymPow: {
            for (size_t i = 0; i < term.parts.size(); ++i) {
                const SubTerm& s = term.parts[i];
                if (used[i] || s.kind != PartKind::Sym || s.id != p.id)
                    continue;
                if (!sameSignFits(s.exp, p.exp))
                    return false;
                used[i] = true;
                symConsume.emplace_back(i, p.exp);
                if (matchParts(pi + 1))
                    return true;
                used[i] = false;
                symConsume.pop_back();
                return false; // only one power group per symbol
            }
            return false;
        }
        case PatternPart::WildSym: {
            for (size_t i = 0; i < term.parts.size(); ++i) {
                const SubTerm& s = term.parts[i];
                if (used[i] || s.kind != PartKind::Sym)
                    continue;
                if (!sameSignFits(s.exp, p.exp))
                    continue;
                SmallExpr v = exprSymbol(s.id);
                if (!checkRestrict(p.restr, v))
                    continue;
                Bindings savedB = bind;
                auto savedP = pending.size();
                if (bindValue(p.id, v)) {
                    used[i] = true;
                    symConsume.emplace_back(i, p.exp);
                    if (matchParts(pi + 1))
                        return true;
                    used[i] = false;
                    symConsume.pop_back();
                }
                bind = std::move(savedB);
                pending.resize(savedP);
            }
            return false;
        }
        case PatternPart::IdxPart: {
            for (size_t i = 0; i < term.parts.size(); ++i) {
                const SubTerm& s = term.parts[i];
                if (used[i] || s.kind != PartKind::Idx || s.id != p.id)
                    continue;
                used[i] = true;
                if (matchParts(pi + 1))
                    return true;
                used[i] = false;
                return false;
            }
            return false;
        }
        case PatternPart::FunPart: {
            for (size_t i = 0; i < term.parts.size(); ++i) {
                const SubTerm& s = term.parts[i];
                if (used[i] || s.kind != PartKind::Fun || s.id != p.id)
                    continue;
                Bindings savedB = bind;
                auto savedP = pending.size();
                if (matchArgList(p.args, s.args, 0, 0)) {
                    used[i] = true;
                    funParts.push_back(i);
                    if (matchParts(pi + 1))
                        return true;
                    used[i] = false;
                    funParts.pop_back();
                }
                bind = std::move(savedB);
                pending.resize(savedP);
            }
            return false;
        }
        }
        return false;
    }
};

} // namespace

std::optional<MatchInfo> matchPattern(const Pattern& p, const Term& term,
                                      const SymbolTable& table) {
    Matcher m(p, term, table);
    if (!m.matchParts(0))
        return std::nullopt;
    MatchInfo info;
    info.bindings = std::move(m.bind);
    info.funParts = std::move(m.funParts);
    info.symConsume = std::move(m.symConsume);
    return info;
}

bool containsMatch(const Pattern& p, const Term& term, const SymbolTable& table) {
    return matchPattern(p, term, table).has_value();
}

} // namespace miniform

#include "miniform/print.hpp"

#include <cstdio>

namespace miniform {

namespace {

std::string renderArg(const SmallExpr& e, const SymbolTable& table) {
    return renderSmallInline(e, table);
}

std::string renderPart(const SubTerm& p, const SymbolTable& table) {
    const std::string& name = table.info(p.id).name;
    switch (p.kind) {
    case PartKind::Sym:
        if (p.exp == 1)
            return name;
        return name + "^" + std::to_string(p.exp);
    case PartKind::Idx:
        return name;
    case PartKind::Fun: {
        std::string s = name + "(";
        for (size_t i = 0; i < p.args.size(); ++i) {
            if (i)
                s += ",";
            s += renderArg(p.args[i], table);
        }
        s += ")";
        return s;
    }
    }
    return name;
}

} // namespace

std::string renderTermBody(const Term& t, const SymbolTable& table) {
    Rational c = t.coeff.isNegative() ? -t.coeff : t.coeff;
    std::string s;
    bool needCoeff = t.parts.empty() || !(c == Rational(1));
    if (needCoeff)
        s = c.str();
    for (const SubTerm& p : t.parts) {
        if (!s.empty())
            s += "*";
        s += renderPart(p, table);
    }
    return s;
}

std::string renderTermSigned(const Term& t, const SymbolTable& table) {
    return (t.coeff.isNegative() ? " - " : " + ") + renderTermBody(t, table);
}

std::string renderSmallInline(const SmallExpr& e, const SymbolTable& table) {
    if (e.empty())
        return "0";
    std::string s;
    for (size_t i = e.size(); i-- > 0;) {
        const Term& t = e[i];
        bool first = i + 1 == e.size();
        if (first)
            s += t.coeff.isNegative() ? " - " : "";
        else
            s += t.coeff.isNegative() ? " - " : " + ";
        s += renderTermBody(t, table);
    }
    return s;
}

std::string renderSmallCompact(const SmallExpr& e, const SymbolTable& table) {
    if (e.empty())
        return "0";
    std::string s;
    for (size_t i = e.size(); i-- > 0;) {
        const Term& t = e[i];
        bool first = i + 1 == e.size();
        if (first)
            s += t.coeff.isNegative() ? "-" : "";
        else
            s += t.coeff.isNegative() ? "-" : "+";
        s += renderTermBody(t, table);
    }
    return s;
}

namespace {

constexpr size_t kWrapColumn = 79;

void appendWrapped(std::string& out, std::string& line, const std::string& chunk,
                   const std::string& indent) {
    if (line.size() + chunk.size() > kWrapColumn && line.size() > indent.size()) {
        out += line;
        out += "\n";
        line = indent;
    }
    line += chunk;
}

} // namespace

std::string renderExpression(const Expression& e, const SymbolTable& table,
                             const PrintOptions& opt) {
    std::string out = "\n   " + e.name + " =";
    if (e.terms.empty()) {
        out += " 0;\n";
        return out;
    }

    if (!e.bracketSyms.empty()) {
        // group per bracket, one line each: "+ key * ( contents )"
        out += "\n";
        size_t pos = 0;
        std::vector<std::pair<Term, SmallExpr>> groups;
        while (pos < e.terms.size()) {
            Term key, content;
            splitBracket(e.terms[pos], e.bracketSyms, key, content);
            key.coeff = Rational(1);
            SmallExpr inside{content};
            size_t q = pos + 1;
            for (; q < e.terms.size(); ++q) {
                Term k2, c2;
                splitBracket(e.terms[q], e.bracketSyms, k2, c2);
                if (compareIdentity(k2, key) != 0)
                    break;
                inside.push_back(c2);
            }
            canonicalize(inside);
            groups.emplace_back(std::move(key), std::move(inside));
            pos = q;
        }
        for (size_t g = groups.size(); g-- > 0;) {
            const auto& [key, inside] = groups[g];
            std::string line = "       + ";
            if (key.parts.empty()) {
                line += renderSmallInline(inside, table).substr(0);
            } else {
                line += renderTermBody(key, table);
                line += " * (" + renderSmallInline(inside, table) + " )";
            }
            out += line;
            out += g == 0 ? ";\n" : "\n";
        }
        return out;
    }

    if (opt.oneTermPerLine) {
        out += "\n";
        for (size_t i = e.terms.size(); i-- > 0;) {
            const Term& t = e.terms[i];
            out += "      " + renderTermSigned(t, table) + "\n";
        }
        out += "      ;\n";
        return out;
    }

    out += "\n";
    std::string indent = "      ";
    std::string line = indent;
    for (size_t i = e.terms.size(); i-- > 0;) {
        const Term& t = e.terms[i];
        std::string chunk;
        bool first = i + 1 == e.terms.size();
        if (first)
            chunk = (t.coeff.isNegative() ? " - " : " ") + renderTermBody(t, table);
        else
            chunk = (t.coeff.isNegative() ? " - " : " + ") + renderTermBody(t, table);
        appendWrapped(out, line, chunk, indent);
    }
    line += ";";
    out += line;
    out += "\n";
    return out;
}

std::string renderStats(const std::string& exprName, const SortStats& stats) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "Time = %11.2f sec    Generated terms = %10ld\n"
                  "%17s        Terms in output = %10ld\n"
                  "                         Bytes used      = %10ld\n\n",
                  stats.seconds, stats.generated, exprName.c_str(), stats.inOutput,
                  stats.bytesUsed);
    return buf;
}

// --- tree rendering ---------------------------------------------------------

namespace {

int precedence(TreeNode::Kind k) {
    switch (k) {
    case TreeNode::Add: return 1;
    case TreeNode::Mul: return 2;
    case TreeNode::Pow: return 3;
    default: return 4;
    }
}

std::string renderTreeP(const TreePtr& t, const SymbolTable& table, int parent);

std::string wrapIf(bool cond, const std::string& s) {
    return cond ? "(" + s + ")" : s;
}

std::string renderRestrict(const WildRestrict& r, const SymbolTable& table) {
    std::string s;
    switch (r.kind) {
    case WildRestrict::None:
        return "";
    case WildRestrict::Number:
        return "number_";
    case WildRestrict::NotInSet:
        s = "!";
        [[fallthrough]];
    case WildRestrict::InSet: {
        s += "{";
        bool first = true;
        for (const TreePtr& lit : r.literals) {
            if (!first)
                s += ",";
            first = false;
            s += renderTreeP(lit, table, 0);
        }
        for (int ref : r.wildRefs) {
            if (!first)
                s += ",";
            first = false;
            s += table.info(ref).name + "?";
        }
        s += "}";
        return s;
    }
    }
    return s;
}

std::string renderTreeP(const TreePtr& t, const SymbolTable& table, int parent) {
    switch (t->kind) {
    case TreeNode::Number:
        if (t->number.isNegative())
            return wrapIf(parent >= 2, t->number.str());
        return t->number.str();
    case TreeNode::Symbol:
    case TreeNode::Index:
        return table.info(t->id).name;
    case TreeNode::Dollar:
        return "$" + t->name;
    case TreeNode::Wildcard:
        return table.info(t->id).name + "?" + renderRestrict(t->restrict_, table);
    case TreeNode::ArgField:
        return table.info(t->id).name; // stored with leading '?'
    case TreeNode::Call: {
        std::string s = table.info(t->id).name + "(";
        for (size_t i = 0; i < t->children.size(); ++i) {
            if (i)
                s += ",";
            s += renderTreeP(t->children[i], table, 0);
        }
        return s + ")";
    }
    case TreeNode::ExprRef: {
        std::string s = table.info(t->id).name;
        if (!t->children.empty())
            s += "[" + renderTreeP(t->children[0], table, 0) + "]";
        return s;
    }
    case TreeNode::Pow: {
        std::string e = renderTreeP(t->children[1], table, 3);
        return wrapIf(parent > 3, renderTreeP(t->children[0], table, 3) + "^" + e);
    }
    case TreeNode::Mul: {
        std::string s;
        for (size_t i = 0; i < t->children.size(); ++i) {
            if (i)
                s += t->inverted[i] ? "/" : "*";
            s += renderTreeP(t->children[i], table, 2);
        }
        return wrapIf(parent > 2, s);
    }
    case TreeNode::Add: {
        std::string s;
        for (size_t i = 0; i < t->children.size(); ++i) {
            if (i || t->signs[i] < 0)
                s += t->signs[i] < 0 ? "-" : "+";
            s += renderTreeP(t->children[i], table, 1);
        }
        return wrapIf(parent > 1, s);
    }
    }
    return "?";
}

} // namespace

std::string renderTree(const TreePtr& tree, const SymbolTable& table) {
    return renderTreeP(tree, table, 0);
}

} // namespace miniform

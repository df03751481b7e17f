#include "miniform/term.hpp"

#include <algorithm>
#include <cstring>

namespace miniform {

SubTerm SubTerm::symbol(int id, long exp) {
    SubTerm s;
    s.kind = PartKind::Sym;
    s.id = id;
    s.exp = exp;
    return s;
}

SubTerm SubTerm::index(int id) {
    SubTerm s;
    s.kind = PartKind::Idx;
    s.id = id;
    return s;
}

SubTerm SubTerm::func(int id, std::vector<SmallExpr> args, bool commuting, Symmetry sym) {
    SubTerm s;
    s.kind = PartKind::Fun;
    s.id = id;
    s.args = std::move(args);
    s.commuting = commuting;
    s.sym = sym;
    return s;
}

static int classRank(PartKind k) {
    switch (k) {
    case PartKind::Sym: return 0;
    case PartKind::Idx: return 1;
    case PartKind::Fun: return 2;
    }
    return 3;
}

static int comparePart(const SubTerm& a, const SubTerm& b) {
    int ra = classRank(a.kind), rb = classRank(b.kind);
    if (ra != rb)
        return ra < rb ? -1 : 1;
    if (a.id != b.id)
        return a.id < b.id ? -1 : 1;
    if (a.kind == PartKind::Sym) {
        if (a.exp != b.exp)
            return a.exp > b.exp ? -1 : 1; // higher exponent first
        return 0;
    }
    if (a.kind == PartKind::Fun) {
        size_t n = std::min(a.args.size(), b.args.size());
        for (size_t i = 0; i < n; ++i) {
            int c = compareSmallExpr(a.args[i], b.args[i]);
            if (c)
                return c;
        }
        if (a.args.size() != b.args.size())
            return a.args.size() < b.args.size() ? -1 : 1; // fewer args first
    }
    return 0;
}

static int compareParts(const std::vector<SubTerm>& a, const std::vector<SubTerm>& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int c = comparePart(a[i], b[i]);
        if (c)
            return c;
    }
    if (a.size() != b.size())
        return a.size() > b.size() ? -1 : 1; // longer term first; constants sort last
    return 0;
}

int compareIdentity(const Term& a, const Term& b) {
    return compareParts(a.parts, b.parts);
}

int compareFull(const Term& a, const Term& b) {
    int c = compareParts(a.parts, b.parts);
    if (c)
        return c;
    return Rational::cmpCanonical(a.coeff, b.coeff);
}

int compareSmallExpr(const SmallExpr& a, const SmallExpr& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int c = compareFull(a[i], b[i]);
        if (c)
            return c;
    }
    if (a.size() != b.size())
        return a.size() < b.size() ? -1 : 1; // shorter argument first
    return 0;
}

void splitBracket(const Term& t, const std::vector<int>& bracketSyms, Term& bracket, Term& rest) {
    bracket = Term(Rational(1));
    rest = Term(t.coeff);
    for (const SubTerm& p : t.parts) {
        if (p.kind == PartKind::Sym &&
            std::binary_search(bracketSyms.begin(), bracketSyms.end(), p.id))
            bracket.parts.push_back(p);
        else
            rest.parts.push_back(p);
    }
}

int compareBracketMajor(const Term& a, const Term& b, const std::vector<int>& bracketSyms) {
    Term ab, ar, bb, br;
    splitBracket(a, bracketSyms, ab, ar);
    splitBracket(b, bracketSyms, bb, br);
    int c = compareParts(ab.parts, bb.parts);
    if (c)
        return c;
    return compareParts(ar.parts, br.parts);
}

bool sameBracketPart(const Term& a, const Term& b, const std::vector<int>& bracketSyms) {
    Term ab, ar, bb, br;
    splitBracket(a, bracketSyms, ab, ar);
    splitBracket(b, bracketSyms, bb, br);
    return compareParts(ab.parts, bb.parts) == 0;
}

// --- symmetry -------------------------------------------------------------

static int sortAntisymmetric(std::vector<SmallExpr>& args) {
    // insertion sort counting transpositions; duplicate arguments kill the term
    int sign = 1;
    for (size_t i = 1; i < args.size(); ++i) {
        for (size_t j = i; j > 0; --j) {
            int c = compareSmallExpr(args[j - 1], args[j]);
            if (c > 0) {
                std::swap(args[j - 1], args[j]);
                sign = -sign;
            } else if (c == 0) {
                return 0;
            } else {
                break;
            }
        }
    }
    for (size_t i = 1; i < args.size(); ++i)
        if (compareSmallExpr(args[i - 1], args[i]) == 0)
            return 0;
    return sign;
}

static bool rotationLess(const std::vector<SmallExpr>& v, size_t ra,
                         const std::vector<SmallExpr>& w, size_t rb) {
    size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        int c = compareSmallExpr(v[(ra + i) % n], w[(rb + i) % n]);
        if (c)
            return c < 0;
    }
    return false;
}

static void leastRotation(std::vector<SmallExpr>& args) {
    size_t n = args.size();
    if (n < 2)
        return;
    size_t best = 0;
    for (size_t r = 1; r < n; ++r)
        if (rotationLess(args, r, args, best))
            best = r;
    if (best) {
        std::rotate(args.begin(), args.begin() + static_cast<long>(best), args.end());
    }
}

int symmetrize(SubTerm& f) {
    if (f.args.size() < 2)
        return 1;
    switch (f.sym) {
    case Symmetry::None:
        return 1;
    case Symmetry::Symmetric:
        std::stable_sort(f.args.begin(), f.args.end(),
                         [](const SmallExpr& a, const SmallExpr& b) {
                             return compareSmallExpr(a, b) < 0;
                         });
        return 1;
    case Symmetry::Antisymmetric:
        return sortAntisymmetric(f.args);
    case Symmetry::Cyclic:
        leastRotation(f.args);
        return 1;
    case Symmetry::ReverseCyclic: {
        std::vector<SmallExpr> rev(f.args.rbegin(), f.args.rend());
        leastRotation(f.args);
        leastRotation(rev);
        size_t n = f.args.size();
        for (size_t i = 0; i < n; ++i) {
            int c = compareSmallExpr(rev[i], f.args[i]);
            if (c < 0) {
                f.args = std::move(rev);
                break;
            }
            if (c > 0)
                break;
        }
        return 1;
    }
    }
    return 1;
}

// --- normalization --------------------------------------------------------

long termSize(const Term& t) {
    long n = 1;
    for (const SubTerm& p : t.parts) {
        switch (p.kind) {
        case PartKind::Sym: n += 2; break;
        case PartKind::Idx: n += 1; break;
        case PartKind::Fun:
            n += 2;
            for (const SmallExpr& a : p.args) {
                n += 1;
                for (const Term& at : a)
                    n += termSize(at);
            }
            break;
        }
    }
    return n;
}

std::optional<Term> normalize(Term raw, const TermLimits& limits) {
    if (raw.coeff.isZero())
        return std::nullopt;
    Term out(raw.coeff);
    std::vector<SubTerm> syms, idxs, cfuns, nfuns;
    for (SubTerm& p : raw.parts) {
        switch (p.kind) {
        case PartKind::Sym:
            if (p.exp != 0)
                syms.push_back(std::move(p));
            break;
        case PartKind::Idx:
            idxs.push_back(std::move(p));
            break;
        case PartKind::Fun: {
            int s = symmetrize(p);
            if (s == 0)
                return std::nullopt;
            if (s < 0)
                out.coeff = -out.coeff;
            (p.commuting ? cfuns : nfuns).push_back(std::move(p));
            break;
        }
        }
    }
    std::stable_sort(syms.begin(), syms.end(),
                     [](const SubTerm& a, const SubTerm& b) { return a.id < b.id; });
    // merge equal symbols
    std::vector<SubTerm> merged;
    for (SubTerm& s : syms) {
        if (!merged.empty() && merged.back().id == s.id) {
            merged.back().exp += s.exp;
            if (std::abs(merged.back().exp) > (1L << 40))
                throw TermError{"Exponent overflow"};
        } else {
            merged.push_back(std::move(s));
        }
    }
    std::erase_if(merged, [](const SubTerm& s) { return s.exp == 0; });

    std::stable_sort(idxs.begin(), idxs.end(),
                     [](const SubTerm& a, const SubTerm& b) { return a.id < b.id; });
    std::stable_sort(cfuns.begin(), cfuns.end(),
                     [](const SubTerm& a, const SubTerm& b) { return comparePart(a, b) < 0; });

    out.parts = std::move(merged);
    out.parts.insert(out.parts.end(), std::make_move_iterator(idxs.begin()),
                     std::make_move_iterator(idxs.end()));
    out.parts.insert(out.parts.end(), std::make_move_iterator(cfuns.begin()),
                     std::make_move_iterator(cfuns.end()));
    out.parts.insert(out.parts.end(), std::make_move_iterator(nfuns.begin()),
                     std::make_move_iterator(nfuns.end()));
    if (out.coeff.isZero())
        return std::nullopt;
    if (termSize(out) > limits.maxTermSize)
        throw TermError{"Term too large (MaxTermSize)"};
    return out;
}

Term mulRaw(const Term& a, const Term& b) {
    Term r(a.coeff * b.coeff);
    r.parts = a.parts;
    r.parts.insert(r.parts.end(), b.parts.begin(), b.parts.end());
    return r;
}

void canonicalize(SmallExpr& e) {
    std::sort(e.begin(), e.end(), [](const Term& a, const Term& b) {
        return compareFull(a, b) < 0;
    });
    SmallExpr out;
    out.reserve(e.size());
    for (Term& t : e) {
        if (!out.empty() && compareIdentity(out.back(), t) == 0) {
            out.back().coeff += t.coeff;
            if (out.back().coeff.isZero())
                out.pop_back();
        } else if (!t.coeff.isZero()) {
            out.push_back(std::move(t));
        }
    }
    e = std::move(out);
}

SmallExpr addSmall(const SmallExpr& a, const SmallExpr& b) {
    SmallExpr r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        int c = compareIdentity(a[i], b[j]);
        if (c < 0) {
            r.push_back(a[i++]);
        } else if (c > 0) {
            r.push_back(b[j++]);
        } else {
            Term t = a[i++];
            t.coeff += b[j++].coeff;
            if (!t.coeff.isZero())
                r.push_back(std::move(t));
        }
    }
    for (; i < a.size(); ++i)
        r.push_back(a[i]);
    for (; j < b.size(); ++j)
        r.push_back(b[j]);
    return r;
}

SmallExpr mulSmall(const SmallExpr& a, const SmallExpr& b, const TermLimits& limits) {
    SmallExpr r;
    r.reserve(a.size() * b.size());
    for (const Term& x : a)
        for (const Term& y : b) {
            auto t = normalize(mulRaw(x, y), limits);
            if (t)
                r.push_back(std::move(*t));
        }
    canonicalize(r);
    return r;
}

Term invertTerm(const Term& t) {
    Term r(t.coeff.inverse());
    for (const SubTerm& p : t.parts) {
        if (p.kind != PartKind::Sym)
            throw TermError{"Cannot invert a term containing " +
                            std::string(p.kind == PartKind::Fun ? "a function" : "an index")};
        r.parts.push_back(SubTerm::symbol(p.id, -p.exp));
    }
    return r;
}

SmallExpr powSmall(const SmallExpr& e, long n, const TermLimits& limits) {
    if (n == 0)
        return exprNumber(Rational(1));
    if (n < 0) {
        if (e.size() != 1)
            throw TermError{"Negative power of a multi-term expression"};
        SmallExpr inv{invertTerm(e[0])};
        return powSmall(inv, -n, limits);
    }
    SmallExpr acc = exprNumber(Rational(1));
    SmallExpr base = e;
    unsigned long k = static_cast<unsigned long>(n);
    while (k) {
        if (k & 1)
            acc = mulSmall(acc, base, limits);
        k >>= 1;
        if (k)
            base = mulSmall(base, base, limits);
    }
    return acc;
}

std::optional<Rational> asRational(const SmallExpr& e) {
    if (e.empty())
        return Rational(0);
    if (e.size() == 1 && e[0].parts.empty())
        return e[0].coeff;
    return std::nullopt;
}

SmallExpr exprSymbol(int id) {
    Term t{Rational(1)};
    t.parts.push_back(SubTerm::symbol(id, 1));
    return SmallExpr{std::move(t)};
}

SmallExpr exprIndex(int id) {
    Term t{Rational(1)};
    t.parts.push_back(SubTerm::index(id));
    return SmallExpr{std::move(t)};
}

SmallExpr exprNumber(const Rational& r) {
    if (r.isZero())
        return SmallExpr{};
    return SmallExpr{Term{r}};
}

bool equalSmallExpr(const SmallExpr& a, const SmallExpr& b) {
    return compareSmallExpr(a, b) == 0;
}

// --- serialization --------------------------------------------------------

namespace {

void putU32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t getU32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void putString(std::vector<uint8_t>& out, const std::string& s) {
    putU32(out, static_cast<uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void encodeSub(const SubTerm& p, std::vector<uint8_t>& out);

void encodeSmall(const SmallExpr& e, std::vector<uint8_t>& out) {
    putU32(out, static_cast<uint32_t>(e.size()));
    for (const Term& t : e)
        encodeTerm(t, out);
}

void encodeSub(const SubTerm& p, std::vector<uint8_t>& out) {
    out.push_back(static_cast<uint8_t>(p.kind));
    putU32(out, static_cast<uint32_t>(p.id));
    if (p.kind == PartKind::Sym) {
        putU32(out, static_cast<uint32_t>(static_cast<int32_t>(p.exp)));
    } else if (p.kind == PartKind::Fun) {
        out.push_back(p.commuting ? 1 : 0);
        out.push_back(static_cast<uint8_t>(p.sym));
        putU32(out, static_cast<uint32_t>(p.args.size()));
        for (const SmallExpr& a : p.args)
            encodeSmall(a, out);
    }
}

struct Reader {
    const uint8_t* p;
    size_t n;
    size_t pos = 0;
    uint8_t u8() { return p[pos++]; }
    uint32_t u32() {
        uint32_t v = getU32(p + pos);
        pos += 4;
        return v;
    }
    std::string str() {
        uint32_t len = u32();
        std::string s(reinterpret_cast<const char*>(p + pos), len);
        pos += len;
        return s;
    }
};

Term decodeTermR(Reader& r);

SmallExpr decodeSmall(Reader& r) {
    uint32_t n = r.u32();
    SmallExpr e;
    e.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        e.push_back(decodeTermR(r));
    return e;
}

SubTerm decodeSub(Reader& r) {
    SubTerm p;
    p.kind = static_cast<PartKind>(r.u8());
    p.id = static_cast<int>(r.u32());
    if (p.kind == PartKind::Sym) {
        p.exp = static_cast<int32_t>(r.u32());
    } else if (p.kind == PartKind::Fun) {
        p.commuting = r.u8() != 0;
        p.sym = static_cast<Symmetry>(r.u8());
        uint32_t n = r.u32();
        p.args.reserve(n);
        for (uint32_t i = 0; i < n; ++i)
            p.args.push_back(decodeSmall(r));
    }
    return p;
}

Term decodeTermR(Reader& r) {
    Term t;
    std::string num = r.str();
    std::string den = r.str();
    t.coeff = Rational(BigInt(num), BigInt(den));
    uint32_t n = r.u32();
    t.parts.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        t.parts.push_back(decodeSub(r));
    return t;
}

} // namespace

void encodeTerm(const Term& t, std::vector<uint8_t>& out) {
    putString(out, t.coeff.numerator().str());
    putString(out, t.coeff.denominator().str());
    putU32(out, static_cast<uint32_t>(t.parts.size()));
    for (const SubTerm& p : t.parts)
        encodeSub(p, out);
}

size_t decodeTerm(const uint8_t* data, size_t size, Term& out) {
    Reader r{data, size};
    out = decodeTermR(r);
    return r.pos;
}

long encodedSize(const Term& t) {
    std::vector<uint8_t> buf;
    encodeTerm(t, buf);
    return static_cast<long>(buf.size());
}

} // namespace miniform

#include "miniform/parser.hpp"

#include <cctype>

namespace miniform {

TreePtr makeNumber(Rational r) {
    auto n = std::make_shared<TreeNode>(TreeNode::Number);
    n->number = std::move(r);
    return n;
}

TreePtr makeName(TreeNode::Kind k, int id) {
    auto n = std::make_shared<TreeNode>(k);
    n->id = id;
    return n;
}

TreePtr makeCall(int id, std::vector<TreePtr> args) {
    auto n = std::make_shared<TreeNode>(TreeNode::Call);
    n->id = id;
    n->children = std::move(args);
    return n;
}

TreePtr makeDollar(std::string name) {
    auto n = std::make_shared<TreeNode>(TreeNode::Dollar);
    n->name = std::move(name);
    return n;
}

AlgebraParser::AlgebraParser(std::string_view text, SymbolTable& table, bool patternMode)
    : text_(text), table_(table), patternMode_(patternMode) {}

static bool nameStart(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

static bool nameChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

AlgebraParser::Token AlgebraParser::next() {
    if (havePeek_) {
        havePeek_ = false;
        return peek_;
    }
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= text_.size())
        return t;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        t.kind = Token::NumberTok;
        t.text = std::string(text_.substr(start, pos_ - start));
        return t;
    }
    if (nameStart(c)) {
        size_t start = pos_;
        while (pos_ < text_.size() && nameChar(text_[pos_]))
            ++pos_;
        t.kind = Token::Name;
        t.text = std::string(text_.substr(start, pos_ - start));
        return t;
    }
    if (c == '[') {
        size_t end = text_.find(']', pos_);
        if (end == std::string_view::npos)
            fail("Unmatched [ in name");
        t.kind = Token::Name;
        t.text = std::string(text_.substr(pos_, end - pos_ + 1));
        pos_ = end + 1;
        return t;
    }
    if (c == '$') {
        ++pos_;
        size_t start = pos_;
        while (pos_ < text_.size() && nameChar(text_[pos_]))
            ++pos_;
        if (start == pos_)
            fail("Empty $-variable name");
        t.kind = Token::DollarTok;
        t.text = std::string(text_.substr(start, pos_ - start));
        return t;
    }
    t.kind = Token::Op;
    t.op = c;
    ++pos_;
    return t;
}

AlgebraParser::Token AlgebraParser::peek() {
    if (!havePeek_) {
        peek_ = next();
        havePeek_ = true;
    }
    return peek_;
}

void AlgebraParser::fail(const std::string& msg) {
    throw ParseError{msg};
}

void AlgebraParser::illegalOperator(const Token& t) {
    std::string shown(1, t.op);
    size_t p = t.pos + 1;
    while (p < text_.size() && std::isalnum(static_cast<unsigned char>(text_[p])))
        shown += text_[p++];
    fail("Illegal position for operator: " + shown);
}

void AlgebraParser::expectOp(char c, const char* what) {
    Token t = next();
    if (t.kind != Token::Op || t.op != c)
        fail(std::string("Expected ") + what);
}

TreePtr AlgebraParser::parse() {
    TreePtr r = parseSum();
    Token t = peek();
    if (t.kind != Token::End) {
        if (t.kind == Token::Op)
            illegalOperator(t);
        fail("Irregular syntax near " + (t.text.empty() ? std::string(1, t.op) : t.text));
    }
    return r;
}

TreePtr AlgebraParser::parseSum() {
    auto sum = std::make_shared<TreeNode>(TreeNode::Add);
    int sign = 1;
    Token t = peek();
    if (t.kind == Token::Op && (t.op == '+' || t.op == '-')) {
        next();
        sign = t.op == '-' ? -1 : 1;
        // allow strings of signs like - - x
        while (true) {
            Token u = peek();
            if (u.kind == Token::Op && (u.op == '+' || u.op == '-')) {
                next();
                if (u.op == '-')
                    sign = -sign;
            } else {
                break;
            }
        }
    }
    sum->children.push_back(parseProduct());
    sum->signs.push_back(sign);
    while (true) {
        Token u = peek();
        if (u.kind == Token::Op && (u.op == '+' || u.op == '-')) {
            next();
            int s = u.op == '-' ? -1 : 1;
            while (true) {
                Token v = peek();
                if (v.kind == Token::Op && (v.op == '+' || v.op == '-')) {
                    next();
                    if (v.op == '-')
                        s = -s;
                } else {
                    break;
                }
            }
            sum->children.push_back(parseProduct());
            sum->signs.push_back(s);
        } else {
            break;
        }
    }
    if (sum->children.size() == 1 && sum->signs[0] == 1)
        return sum->children[0];
    return sum;
}

TreePtr AlgebraParser::parseProduct() {
    auto mul = std::make_shared<TreeNode>(TreeNode::Mul);
    mul->children.push_back(parsePower());
    mul->inverted.push_back(false);
    while (true) {
        Token t = peek();
        if (t.kind == Token::Op && (t.op == '*' || t.op == '/')) {
            next();
            mul->children.push_back(parsePower());
            mul->inverted.push_back(t.op == '/');
        } else {
            break;
        }
    }
    if (mul->children.size() == 1)
        return mul->children[0];
    return mul;
}

TreePtr AlgebraParser::parsePower() {
    TreePtr base = parsePrimary();
    Token t = peek();
    if (t.kind == Token::Op && t.op == '^') {
        next();
        auto p = std::make_shared<TreeNode>(TreeNode::Pow);
        p->children.push_back(base);
        p->children.push_back(parseExponent());
        return p;
    }
    return base;
}

TreePtr AlgebraParser::parseExponent() {
    // sign, then a primary; right-associative chain
    int sign = 1;
    while (true) {
        Token t = peek();
        if (t.kind == Token::Op && (t.op == '+' || t.op == '-')) {
            next();
            if (t.op == '-')
                sign = -sign;
        } else {
            break;
        }
    }
    Token t = peek();
    if (t.kind == Token::Op && t.op != '(')
        illegalOperator(t);
    TreePtr e = parsePrimary();
    Token u = peek();
    if (u.kind == Token::Op && u.op == '^') {
        next();
        auto p = std::make_shared<TreeNode>(TreeNode::Pow);
        p->children.push_back(e);
        p->children.push_back(parseExponent());
        e = p;
    }
    if (sign < 0) {
        auto neg = std::make_shared<TreeNode>(TreeNode::Add);
        neg->children.push_back(e);
        neg->signs.push_back(-1);
        return neg;
    }
    return e;
}

TreePtr AlgebraParser::parsePrimary() {
    Token t = next();
    switch (t.kind) {
    case Token::End:
        fail("Unexpected end of expression");
    case Token::NumberTok: {
        auto r = Rational::parse(t.text);
        if (!r)
            fail("Bad number " + t.text);
        return makeNumber(*r);
    }
    case Token::Op:
        if (t.op == '(') {
            TreePtr inner = parseSum();
            expectOp(')', ")");
            return inner;
        }
        if (t.op == '?') {
            Token n = next();
            if (n.kind != Token::Name)
                fail("Missing name after ?");
            if (!patternMode_)
                fail("Argument field wildcard ?" + n.text + " outside a pattern context");
            int id = table_.declare("?" + n.text, NameClass::ArgWild);
            return makeName(TreeNode::ArgField, id);
        }
        illegalOperator(t);
    case Token::DollarTok:
        return makeDollar(t.text);
    case Token::ArgFieldTok:
        fail("Irregular syntax");
    case Token::Name:
        return parseNameRef(t);
    }
    fail("Irregular syntax");
}

WildRestrict AlgebraParser::parseRestriction() {
    WildRestrict r;
    Token t = peek();
    if (t.kind == Token::Name && t.text == "number_") {
        next();
        r.kind = WildRestrict::Number;
        return r;
    }
    if (t.kind == Token::Name) {
        const NameInfo* info = table_.find(t.text);
        if (info && info->cls == NameClass::Set) {
            next();
            r.kind = WildRestrict::InSet;
            for (const std::string& el : table_.setElements(info->id)) {
                AlgebraParser sub(el, table_, false);
                r.literals.push_back(sub.parse());
            }
            return r;
        }
        return r; // plain wildcard; name belongs to what follows
    }
    bool exclude = false;
    if (t.kind == Token::Op && t.op == '!') {
        next();
        exclude = true;
        t = peek();
    }
    if (t.kind == Token::Op && t.op == '{') {
        next();
        r.kind = exclude ? WildRestrict::NotInSet : WildRestrict::InSet;
        while (true) {
            Token u = peek();
            if (u.kind == Token::Op && u.op == '}') {
                next();
                break;
            }
            int sign = 1;
            while (u.kind == Token::Op && (u.op == '+' || u.op == '-')) {
                next();
                if (u.op == '-')
                    sign = -sign;
                u = peek();
            }
            if (u.kind == Token::NumberTok) {
                next();
                auto v = Rational::parse(u.text);
                if (!v)
                    fail("Bad number in set");
                r.literals.push_back(makeNumber(sign < 0 ? -*v : *v));
            } else if (u.kind == Token::Name) {
                next();
                const NameInfo* info = table_.find(u.text);
                if (!info)
                    fail("Undeclared variable " + u.text);
                Token q = peek();
                if (q.kind == Token::Op && q.op == '?') {
                    next();
                    r.wildRefs.push_back(info->id);
                } else if (info->cls == NameClass::Symbol) {
                    r.literals.push_back(makeName(TreeNode::Symbol, info->id));
                } else if (info->cls == NameClass::Index) {
                    r.literals.push_back(makeName(TreeNode::Index, info->id));
                } else {
                    fail("Bad set element " + u.text);
                }
            } else {
                fail("Bad set element");
            }
            Token sep = peek();
            if (sep.kind == Token::Op && sep.op == ',')
                next();
        }
        if (exclude && r.kind != WildRestrict::NotInSet)
            fail("Expected { after !");
        return r;
    }
    if (exclude)
        fail("Expected { after !");
    return r;
}

TreePtr AlgebraParser::parseNameRef(const Token& t) {
    const NameInfo* info = table_.find(t.text);
    if (!info)
        fail("Undeclared variable " + t.text);

    if (table_.isFunction(info->id)) {
        // wildcard suffix on a function name is not supported
        std::vector<TreePtr> args;
        Token u = peek();
        if (u.kind == Token::Op && u.op == '(') {
            next();
            Token v = peek();
            if (v.kind == Token::Op && v.op == ')') {
                next();
            } else {
                while (true) {
                    args.push_back(parseSum());
                    Token w = next();
                    if (w.kind == Token::Op && w.op == ')')
                        break;
                    if (!(w.kind == Token::Op && w.op == ','))
                        fail("Expected , or ) in argument list of " + t.text);
                }
            }
        } else {
            fail("Function " + t.text + " used without arguments");
        }
        return makeCall(info->id, std::move(args));
    }

    if (info->cls == NameClass::Expression) {
        Token u = peek();
        if (u.kind == Token::Name && !u.text.empty() && u.text[0] == '[') {
            next();
            std::string inner = u.text.substr(1, u.text.size() - 2);
            AlgebraParser sub(inner, table_, false);
            auto n = std::make_shared<TreeNode>(TreeNode::ExprRef);
            n->id = info->id;
            n->children.push_back(sub.parse());
            return n;
        }
        auto n = std::make_shared<TreeNode>(TreeNode::ExprRef);
        n->id = info->id;
        return n;
    }

    if (info->cls == NameClass::Symbol || info->cls == NameClass::Index) {
        Token u = peek();
        if (u.kind == Token::Op && u.op == '?') {
            if (!patternMode_)
                fail("Wildcard " + t.text + "? outside a pattern context");
            next();
            auto n = std::make_shared<TreeNode>(TreeNode::Wildcard);
            n->id = info->id;
            n->restrict_ = parseRestriction();
            return n;
        }
        return makeName(info->cls == NameClass::Symbol ? TreeNode::Symbol : TreeNode::Index,
                        info->id);
    }

    if (info->cls == NameClass::Dollar)
        return makeDollar(t.text);

    fail("Name " + t.text + " cannot appear in an expression");
}

TreePtr parseAlgebra(std::string_view text, SymbolTable& table) {
    AlgebraParser p(text, table, false);
    return p.parse();
}

TreePtr parsePattern(std::string_view text, SymbolTable& table) {
    AlgebraParser p(text, table, true);
    return p.parse();
}

} // namespace miniform

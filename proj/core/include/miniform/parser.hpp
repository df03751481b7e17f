#pragma once

#include <string>
#include <string_view>

#include "miniform/expr_tree.hpp"
#include "miniform/names.hpp"

namespace miniform {

struct ParseError {
    std::string message;
};

// Algebra parser. Strong typing: every non-numeric name must be declared.
// In pattern mode `x?`, `n?{...}`, `x?!{...}`, `x?number_` and `?a` are legal.
class AlgebraParser {
public:
    AlgebraParser(std::string_view text, SymbolTable& table, bool patternMode = false);

    TreePtr parse(); // whole input; error if trailing tokens

private:
    struct Token {
        enum Kind { End, Name, NumberTok, Op, DollarTok, ArgFieldTok } kind = End;
        std::string text;
        char op = 0;
        size_t pos = 0;
    };

    Token next();
    Token peek();
    void expectOp(char c, const char* what);
    [[noreturn]] void fail(const std::string& msg);
    [[noreturn]] void illegalOperator(const Token& t);

    TreePtr parseSum();
    TreePtr parseProduct();
    TreePtr parsePower();
    TreePtr parsePrimary();
    TreePtr parseExponent();
    TreePtr parseNameRef(const Token& t);
    WildRestrict parseRestriction();

    std::string_view text_;
    size_t pos_ = 0;
    SymbolTable& table_;
    bool patternMode_;
    bool havePeek_ = false;
    Token peek_;
};

// Convenience: parse algebra text (no wildcards).
TreePtr parseAlgebra(std::string_view text, SymbolTable& table);
// Parse pattern text (wildcards allowed).
TreePtr parsePattern(std::string_view text, SymbolTable& table);

} // namespace miniform

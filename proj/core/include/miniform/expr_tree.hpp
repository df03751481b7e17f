#pragma once

#include <memory>
#include <string>
#include <vector>

#include "miniform/rational.hpp"

namespace miniform {

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

// Wildcard restriction attached to `x?{...}` / `x?!{...}` / `x?number_`.
struct WildRestrict {
    enum Kind { None, Number, InSet, NotInSet } kind = None;
    // Elements are either literal trees or wildcard references (ids of names).
    std::vector<TreePtr> literals;
    std::vector<int> wildRefs;
};

struct TreeNode {
    enum Kind {
        Number,   // rational literal
        Symbol,   // declared symbol reference
        Index,    // declared index reference
        Call,     // function application (includes tensors, tables, builtins)
        Pow,      // children[0] ^ children[1]
        Mul,      // product; inverted[i] marks division
        Add,      // sum; each child carries its sign in `signs`
        Dollar,   // $-variable reference
        ExprRef,  // named expression, optional bracket key in children[0]
        Wildcard, // x? with optional restriction
        ArgField, // ?a (valid only directly inside Call argument lists)
    };

    Kind kind;
    Rational number{0};
    int id = 0;             // Symbol/Index/Call/Wildcard ids; ExprRef: expression name id
    std::string name;       // Dollar name; diagnostics
    std::vector<TreePtr> children;
    std::vector<bool> inverted; // Mul
    std::vector<int> signs;     // Add: +1/-1
    WildRestrict restrict_;     // Wildcard

    explicit TreeNode(Kind k) : kind(k) {}
};

TreePtr makeNumber(Rational r);
TreePtr makeName(TreeNode::Kind k, int id);
TreePtr makeCall(int id, std::vector<TreePtr> args);
TreePtr makeDollar(std::string name);

} // namespace miniform

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace miniform {

enum class NameClass {
    Symbol,
    Index,
    CFunction,   // commuting
    NFunction,   // noncommuting
    Tensor,      // commuting, index/integer slots
    Table,
    Expression,
    Dollar,
    Set,
    ArgWild,     // ?a argument-field wildcard names, interned on first use
};

enum class Symmetry { None, Symmetric, Antisymmetric, Cyclic, ReverseCyclic };

struct NameInfo {
    std::string name;
    NameClass cls = NameClass::Symbol;
    int id = 0; // == declaration ordinal; canonical order follows it
    Symmetry sym = Symmetry::None;
    int tableDim = 0;
    bool builtin = false;
};

// Ids of the built-in names, fixed at table construction.
struct Builtins {
    int e = -1;     // e_ : antisymmetric tensor (Levi-Civita)
    int sum = -1;   // sum_(i,lo,hi,body)
    int sig = -1;   // sig_(n) -> -1/0/+1
    int count = -1; // count_(sym,w,...)
};

class SymbolTable {
public:
    SymbolTable();

    // Declares a name; error (returns nullopt + sets err) when the name exists
    // with a different class. Redeclaring identically is a no-op.
    int declare(std::string_view name, NameClass cls, Symmetry sym = Symmetry::None,
                int tableDim = 0);

    const NameInfo* find(std::string_view name) const;
    const NameInfo& info(int id) const { return entries_[static_cast<size_t>(id)]; }
    int size() const { return static_cast<int>(entries_.size()); }

    bool isFunction(int id) const;
    const Builtins& builtins() const { return b_; }

    // Set contents (class Set); empty for other classes.
    const std::vector<std::string>& setElements(int id) const;
    void setSetElements(int id, std::vector<std::string> elems);

private:
    std::vector<NameInfo> entries_;
    std::unordered_map<std::string, int> byName_;
    std::unordered_map<int, std::vector<std::string>> sets_;
    Builtins b_;
};

// Thrown by declare() and the statement parsers.
struct NameError {
    std::string message;
};

} // namespace miniform

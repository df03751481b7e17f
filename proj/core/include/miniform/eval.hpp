#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_map>

#include "miniform/expr_tree.hpp"
#include "miniform/expression.hpp"
#include "miniform/pattern.hpp"
#include "miniform/term.hpp"

namespace miniform {

enum class MergeMode { None, Sum, Maximum, Minimum, Local };

struct DollarVar {
    SmallExpr value;
    MergeMode mode = MergeMode::None; // set per module by moduleoption
};

class DollarStore {
public:
    bool has(const std::string& name) const { return map_.count(name) != 0; }
    const DollarVar* find(const std::string& name) const;
    DollarVar& at(const std::string& name) { return map_.at(name); }
    void set(const std::string& name, SmallExpr value);
    void setMode(const std::string& name, MergeMode m);
    std::unordered_map<std::string, DollarVar>& all() { return map_; }
    const std::unordered_map<std::string, DollarVar>& all() const { return map_; }

private:
    std::unordered_map<std::string, DollarVar> map_;
};

struct TableDef {
    int dim = 0;
    std::map<std::vector<long>, SmallExpr> fills;
};

class TableStore {
public:
    TableDef& define(int funId, int dim);
    const TableDef* find(int funId) const;
    TableDef* find(int funId);

private:
    std::unordered_map<int, TableDef> map_;
};

struct RuntimeError {
    std::string message;
};

struct EvalCtx {
    SymbolTable& table;
    const TermLimits& limits;
    const Bindings* bindings = nullptr;
    DollarStore* dollars = nullptr;
    TableStore* tables = nullptr;
    std::function<const Expression*(int)> expressions; // by name id; may be empty
    const Term* currentTerm = nullptr;                 // for count_
};

// Evaluates a parse tree to a canonical small expression. Builtins (sum_,
// sig_, count_, table lookups) are evaluated where their arguments permit.
SmallExpr evalTree(const TreePtr& tree, EvalCtx& ctx);

// Evaluation without runtime state; literal pattern arguments and fills.
SmallExpr evalStatic(const TreePtr& tree, SymbolTable& table, const TermLimits& limits);

// Re-runs builtin evaluation (tables, sig_) on terms produced by substitution.
SmallExpr evalBuiltinsPost(SmallExpr e, EvalCtx& ctx, int depth = 0);

// One full left-to-right pass of `id pattern = replacement` over a term:
// every non-overlapping match replaced; symbol powers consume all factors via
// powers of the replacement.
struct IdApplyResult {
    std::vector<Term> out;
    bool matched = false;
};
IdApplyResult applyId(const Pattern& p, const TreePtr& replacement, const Term& term,
                      EvalCtx& ctx);

} // namespace miniform

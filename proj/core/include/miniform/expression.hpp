#pragma once

#include <memory>
#include <string>
#include <vector>

#include "miniform/term.hpp"

namespace miniform {

struct BracketIndex;

struct SortStats {
    long generated = 0;
    long inOutput = 0;
    long bytesUsed = 0;
    double seconds = 0.0;
};

struct Expression {
    enum class Status { Active, Hidden, Dropped };

    std::string name;
    int id = 0; // symbol table id
    Status status = Status::Active;
    std::vector<Term> terms;              // canonical (bracket-major when bracketed)
    std::vector<int> bracketSyms;         // sorted symbol ids; empty = unbracketed
    bool bracketIndexed = false;
    std::shared_ptr<const BracketIndex> index;
    SortStats stats;
};

} // namespace miniform

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "miniform/expression.hpp"
#include "miniform/term.hpp"

namespace miniform {

struct SorterConfig {
    size_t bufferCapacity = 0; // terms held in memory; 0 = unbounded
    std::string spillDir;      // empty = system temp directory
    int mergeWidth = 16;
};

// Streaming sorter: collects generated terms, keeps the buffer within its
// capacity by spilling sorted runs to disk, and k-way merges the runs into a
// canonical, coefficient-merged, zero-free output sequence.
class Sorter {
public:
    Sorter(SorterConfig cfg, std::vector<int> bracketSyms);
    ~Sorter();

    Sorter(const Sorter&) = delete;
    Sorter& operator=(const Sorter&) = delete;

    void add(Term t);
    std::vector<Term> finish(SortStats& stats);

    long generated() const { return generated_; }

private:
    struct Run {
        std::string path;
        long count;
    };

    bool less(const Term& a, const Term& b) const;
    void sortAndMergeBuffer();
    void flushRun();
    std::vector<Term> mergeRuns(std::vector<Run> runs);
    std::string newRunPath();

    SorterConfig cfg_;
    std::vector<int> bracketSyms_;
    std::vector<Term> buffer_;
    std::vector<Run> runs_;
    long generated_ = 0;
    int runCounter_ = 0;
    std::string dir_;
};

} // namespace miniform

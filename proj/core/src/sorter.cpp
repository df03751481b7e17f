#include "miniform/sorter.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace miniform {

namespace fs = std::filesystem;

Sorter::Sorter(SorterConfig cfg, std::vector<int> bracketSyms)
    : cfg_(std::move(cfg)), bracketSyms_(std::move(bracketSyms)) {
    dir_ = cfg_.spillDir.empty() ? fs::temp_directory_path().string() : cfg_.spillDir;
    if (cfg_.mergeWidth < 2)
        cfg_.mergeWidth = 2;
}

Sorter::~Sorter() {
    for (const Run& r : runs_)
        std::remove(r.path.c_str());
}

bool Sorter::less(const Term& a, const Term& b) const {
    if (!bracketSyms_.empty()) {
        int c = compareBracketMajor(a, b, bracketSyms_);
        if (c)
            return c < 0;
    }
    int c = compareIdentity(a, b);
    if (c)
        return c < 0;
    return Rational::cmpCanonical(a.coeff, b.coeff) < 0;
}

void Sorter::add(Term t) {
    ++generated_;
    buffer_.push_back(std::move(t));
    if (cfg_.bufferCapacity && buffer_.size() >= cfg_.bufferCapacity)
        flushRun();
}

void Sorter::sortAndMergeBuffer() {
    std::sort(buffer_.begin(), buffer_.end(),
              [this](const Term& a, const Term& b) { return less(a, b); });
    std::vector<Term> merged;
    merged.reserve(buffer_.size());
    for (Term& t : buffer_) {
        if (!merged.empty() && compareIdentity(merged.back(), t) == 0) {
            merged.back().coeff += t.coeff;
            if (merged.back().coeff.isZero())
                merged.pop_back();
        } else if (!t.coeff.isZero()) {
            merged.push_back(std::move(t));
        }
    }
    buffer_ = std::move(merged);
}

std::string Sorter::newRunPath() {
    return (fs::path(dir_) /
            ("mf_sort_" + std::to_string(reinterpret_cast<uintptr_t>(this)) + "_" +
             std::to_string(runCounter_++) + ".run"))
        .string();
}

namespace {

void writeTerm(std::ofstream& out, const Term& t) {
    std::vector<uint8_t> buf;
    encodeTerm(t, buf);
    uint32_t len = static_cast<uint32_t>(buf.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<long>(buf.size()));
}

struct RunReader {
    std::ifstream in;
    long remaining = 0;
    Term current;
    bool ok = false;
    std::vector<uint8_t> buf;

    void advance() {
        if (remaining <= 0) {
            ok = false;
            return;
        }
        uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        buf.resize(len);
        in.read(reinterpret_cast<char*>(buf.data()), len);
        decodeTerm(buf.data(), buf.size(), current);
        --remaining;
        ok = true;
    }
};

} // namespace

void Sorter::flushRun() {
    sortAndMergeBuffer();
    if (buffer_.empty())
        return;
    Run r;
    r.path = newRunPath();
    std::ofstream out(r.path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw TermError{"Cannot create sort spill file " + r.path};
    for (const Term& t : buffer_)
        writeTerm(out, t);
    r.count = static_cast<long>(buffer_.size());
    if (!out.good())
        throw TermError{"Write failure on sort spill file " + r.path};
    runs_.push_back(std::move(r));
    buffer_.clear();
}

std::vector<Term> Sorter::mergeRuns(std::vector<Run> runs) {
    // multi-pass k-way merge until a single in-memory sequence remains
    while (runs.size() > 1) {
        std::vector<Run> nextRuns;
        for (size_t group = 0; group < runs.size();
             group += static_cast<size_t>(cfg_.mergeWidth)) {
            size_t end = std::min(runs.size(), group + static_cast<size_t>(cfg_.mergeWidth));
            std::vector<RunReader> readers(end - group);
            for (size_t i = group; i < end; ++i) {
                RunReader& rd = readers[i - group];
                rd.in.open(runs[i].path, std::ios::binary);
                rd.remaining = runs[i].count;
                rd.advance();
            }
            bool lastGroup = group == 0 && end == runs.size();
            std::ofstream out;
            Run merged;
            std::vector<Term> memory;
            if (!lastGroup) {
                merged.path = newRunPath();
                merged.count = 0;
                out.open(merged.path, std::ios::binary | std::ios::trunc);
            }
            Term pendingTerm;
            bool havePending = false;
            auto emit = [&](Term t) {
                if (havePending && compareIdentity(pendingTerm, t) == 0) {
                    pendingTerm.coeff += t.coeff;
                    if (pendingTerm.coeff.isZero())
                        havePending = false;
                    return;
                }
                if (havePending) {
                    if (lastGroup) {
                        memory.push_back(std::move(pendingTerm));
                    } else {
                        writeTerm(out, pendingTerm);
                        ++merged.count;
                    }
                }
                pendingTerm = std::move(t);
                havePending = true;
            };
            while (true) {
                int best = -1;
                for (size_t i = 0; i < readers.size(); ++i) {
                    if (!readers[i].ok)
                        continue;
                    if (best < 0 || less(readers[i].current, readers[static_cast<size_t>(best)].current))
                        best = static_cast<int>(i);
                }
                if (best < 0)
                    break;
                emit(std::move(readers[static_cast<size_t>(best)].current));
                readers[static_cast<size_t>(best)].advance();
            }
            if (havePending) {
                if (lastGroup)
                    memory.push_back(std::move(pendingTerm));
                else {
                    writeTerm(out, pendingTerm);
                    ++merged.count;
                }
            }
            for (size_t i = group; i < end; ++i)
                std::remove(runs[i].path.c_str());
            if (lastGroup)
                return memory;
            nextRuns.push_back(std::move(merged));
        }
        runs = std::move(nextRuns);
    }
    // zero or one run left
    std::vector<Term> memory;
    if (!runs.empty()) {
        RunReader rd;
        rd.in.open(runs[0].path, std::ios::binary);
        rd.remaining = runs[0].count;
        rd.advance();
        while (rd.ok) {
            memory.push_back(std::move(rd.current));
            rd.advance();
        }
        std::remove(runs[0].path.c_str());
    }
    return memory;
}

std::vector<Term> Sorter::finish(SortStats& stats) {
    stats.generated = generated_;
    std::vector<Term> result;
    if (runs_.empty()) {
        sortAndMergeBuffer();
        result = std::move(buffer_);
        buffer_.clear();
    } else {
        flushRun();
        std::vector<Run> runs = std::move(runs_);
        runs_.clear();
        result = mergeRuns(std::move(runs));
    }
    stats.inOutput = static_cast<long>(result.size());
    long bytes = 0;
    for (const Term& t : result)
        bytes += encodedSize(t);
    stats.bytesUsed = bytes;
    return result;
}

} // namespace miniform

#include "miniform/topology.hpp"

#include <algorithm>
#include <map>

#include "miniform/eval.hpp"

namespace miniform {

namespace {

struct Graph {
    // vertex = occurrence of fun in term part order
    std::vector<size_t> vertexParts; // term part positions
    // adjacency per vertex in argument position order: (index id, arg pos, other vertex)
    struct Edge {
        int indexId;
        size_t argPos;
        size_t other;
    };
    std::vector<std::vector<Edge>> adj;
};

std::optional<int> argAsIndex(const SmallExpr& a) {
    if (a.size() != 1)
        return std::nullopt;
    const Term& t = a[0];
    if (!(t.coeff == Rational(1)) || t.parts.size() != 1 || t.parts[0].kind != PartKind::Idx)
        return std::nullopt;
    return t.parts[0].id;
}

// Depth-first search for the first cycle of exactly `len` vertices through
// root; neighbors explored in argument position order.
bool findCycle(const Graph& g, size_t root, size_t len, std::vector<size_t>& path,
               std::vector<int>& edges, std::vector<bool>& onPath) {
    size_t v = path.back();
    for (const Graph::Edge& e : g.adj[v]) {
        if (path.size() == len) {
            if (e.other == root) {
                // closing edge must differ from the edge we entered through
                if (edges.empty() || edges.back() != e.indexId) {
                    edges.push_back(e.indexId);
                    return true;
                }
            }
            continue;
        }
        if (e.other == root && path.size() == 2 && len == 2) {
            // double edge between two vertices
            if (edges.back() != e.indexId) {
                edges.push_back(e.indexId);
                return true;
            }
            continue;
        }
        if (onPath[e.other])
            continue;
        path.push_back(e.other);
        onPath[e.other] = true;
        edges.push_back(e.indexId);
        if (findCycle(g, root, len, path, edges, onPath))
            return true;
        path.pop_back();
        onPath[e.other] = false;
        edges.pop_back();
    }
    return false;
}

} // namespace

std::optional<Term> replaceLoop(const Term& term, int funId, int argCount, long loopSize,
                                int outFunId, const SymbolTable& table,
                                const TermLimits& limits) {
    Graph g;
    for (size_t i = 0; i < term.parts.size(); ++i) {
        const SubTerm& p = term.parts[i];
        if (p.kind == PartKind::Fun && p.id == funId) {
            if (static_cast<int>(p.args.size()) != argCount)
                throw RuntimeError{"ReplaceLoop: occurrence of " + table.info(funId).name +
                                   " with wrong number of arguments"};
            g.vertexParts.push_back(i);
        }
    }
    size_t n = g.vertexParts.size();
    if (n == 0)
        return std::nullopt;

    // index id -> list of (vertex, argPos)
    std::map<int, std::vector<std::pair<size_t, size_t>>> slots;
    for (size_t v = 0; v < n; ++v) {
        const SubTerm& p = term.parts[g.vertexParts[v]];
        for (size_t a = 0; a < p.args.size(); ++a) {
            auto idx = argAsIndex(p.args[a]);
            if (idx)
                slots[*idx].push_back({v, a});
        }
    }
    g.adj.assign(n, {});
    for (const auto& [indexId, occ] : slots) {
        if (occ.size() != 2)
            continue; // not a contraction
        if (occ[0].first == occ[1].first)
            continue; // both slots in one vertex
        g.adj[occ[0].first].push_back({indexId, occ[0].second, occ[1].first});
        g.adj[occ[1].first].push_back({indexId, occ[1].second, occ[0].first});
    }
    for (auto& edges : g.adj)
        std::stable_sort(edges.begin(), edges.end(),
                         [](const Graph::Edge& a, const Graph::Edge& b) {
                             return a.argPos < b.argPos;
                         });

    // girth by breadth-first search from every root
    size_t girth = 0;
    if (loopSize < 0) {
        size_t best = 0;
        for (size_t r = 0; r < n; ++r) {
            std::vector<long> dist(n, -1);
            std::vector<int> parentEdge(n, -1);
            std::vector<size_t> queue{r};
            dist[r] = 0;
            for (size_t q = 0; q < queue.size(); ++q) {
                size_t v = queue[q];
                for (const Graph::Edge& e : g.adj[v]) {
                    if (e.indexId == parentEdge[v])
                        continue;
                    if (dist[e.other] < 0) {
                        dist[e.other] = dist[v] + 1;
                        parentEdge[e.other] = e.indexId;
                        queue.push_back(e.other);
                    } else {
                        size_t cand = static_cast<size_t>(dist[v] + dist[e.other] + 1);
                        if (best == 0 || cand < best)
                            best = cand;
                    }
                }
            }
        }
        if (best < 2)
            return std::nullopt;
        girth = best;
    } else {
        girth = static_cast<size_t>(loopSize);
    }

    // first cycle of that exact length, roots in canonical order
    std::vector<size_t> path;
    std::vector<int> edges;
    bool found = false;
    for (size_t r = 0; r < n && !found; ++r) {
        path.assign(1, r);
        edges.clear();
        std::vector<bool> onPath(n, false);
        onPath[r] = true;
        found = findCycle(g, r, girth, path, edges, onPath);
    }
    if (!found)
        return std::nullopt;

    size_t len = path.size();
    // per-vertex positions of the two loop indices (stored argument order)
    auto posOf = [&](size_t v, int indexId) -> size_t {
        const SubTerm& p = term.parts[g.vertexParts[v]];
        for (size_t a = 0; a < p.args.size(); ++a) {
            auto idx = argAsIndex(p.args[a]);
            if (idx && *idx == indexId)
                return a + 1; // 1-based
        }
        throw RuntimeError{"ReplaceLoop: internal index bookkeeping error"};
    };

    long posSum = 0;
    for (size_t k = 0; k < len; ++k) {
        int inEdge = edges[(k + len - 1) % len];
        int outEdge = edges[k];
        posSum += static_cast<long>(posOf(path[k], inEdge)) +
                  static_cast<long>(posOf(path[k], outEdge));
    }

    const NameInfo& funInfo = table.info(funId);
    int sign = 1;
    if (funInfo.sym == Symmetry::Antisymmetric && (posSum % 2 != 0))
        sign = -1;

    // walk orientation: as discovered when the position sum is odd, reversed
    // otherwise (keeps both traversal conventions reachable)
    std::vector<size_t> walk = path;
    if (posSum % 2 == 0) {
        std::reverse(walk.begin() + 1, walk.end());
    }

    std::vector<int> loopEdgeSet = edges;
    std::sort(loopEdgeSet.begin(), loopEdgeSet.end());
    auto isLoopEdge = [&](int id) {
        return std::binary_search(loopEdgeSet.begin(), loopEdgeSet.end(), id);
    };

    std::vector<SmallExpr> outArgs;
    for (size_t v : walk) {
        const SubTerm& p = term.parts[g.vertexParts[v]];
        for (const SmallExpr& a : p.args) {
            auto idx = argAsIndex(a);
            if (idx && isLoopEdge(*idx))
                continue;
            outArgs.push_back(a);
        }
    }

    const NameInfo& outInfo = table.info(outFunId);
    Term out(term.coeff * Rational(sign));
    std::vector<bool> drop(term.parts.size(), false);
    for (size_t v : walk)
        drop[g.vertexParts[v]] = true;
    for (size_t i = 0; i < term.parts.size(); ++i)
        if (!drop[i])
            out.parts.push_back(term.parts[i]);
    out.parts.push_back(SubTerm::func(outFunId, std::move(outArgs),
                                      outInfo.cls != NameClass::NFunction, outInfo.sym));
    auto norm = normalize(std::move(out), limits);
    if (!norm)
        return Term{}; // vanished (zero coefficient)
    return *norm;
}

} // namespace miniform

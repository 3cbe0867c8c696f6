#pragma once

// Brute-force oracles used by the test suites. These deliberately avoid the
// library's algorithmic paths: searches are plain enumerations.

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "walloid/graph.hpp"
#include "walloid/rng.hpp"

namespace oracle {

using walloid::Edge;
using walloid::Graph;
using walloid::Vertex;

inline Graph random_graph(walloid::Rng& rng, int n, double p) {
    std::vector<Vertex> vs;
    for (int i = 0; i < n; ++i) vs.push_back(i + 1);
    std::vector<Edge> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.chance(p)) es.push_back({vs[i], vs[j]});
    return Graph(vs, es);
}

// Minimum number of vertices whose removal leaves no A-B path, allowing
// removal of A/B vertices themselves (which matches the linkage count:
// a vertex in A ∩ B forms a trivial path and must be cut at itself).
inline int min_vertex_cut(const Graph& g, const std::set<Vertex>& a,
                          const std::set<Vertex>& b) {
    const auto& vs = g.vertices();
    int n = g.num_vertices();
    auto separated = [&](uint64_t mask) {
        std::set<Vertex> removed;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) removed.insert(vs[i]);
        // BFS from surviving A vertices.
        std::set<Vertex> frontier;
        for (Vertex v : a)
            if (!removed.count(v)) frontier.insert(v);
        for (Vertex v : frontier)
            if (b.count(v)) return false;
        std::set<Vertex> seen = frontier;
        while (!frontier.empty()) {
            std::set<Vertex> next;
            for (Vertex v : frontier)
                for (Vertex w : g.neighbors(v)) {
                    if (removed.count(w) || seen.count(w)) continue;
                    if (b.count(w)) return false;
                    seen.insert(w);
                    next.insert(w);
                }
            frontier = std::move(next);
        }
        return true;
    };
    for (int size = 0; size <= n; ++size) {
        // All subsets of that size.
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            uint64_t mask = 0;
            for (int i : idx) mask |= 1ULL << i;
            if (separated(mask)) return size;
            int i = size - 1;
            while (i >= 0 && idx[i] == n - size + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return n;
}

// All ordered separations of order < k by direct assignment enumeration
// (three-way per vertex). Only usable for very small graphs.
inline std::vector<walloid::Separation> all_separations_brute(const Graph& g, int k) {
    const auto& vs = g.vertices();
    int n = g.num_vertices();
    std::vector<walloid::Separation> out;
    std::vector<int> assign(n, 0);  // 0 = A only, 1 = B only, 2 = both
    while (true) {
        walloid::Separation s;
        for (int i = 0; i < n; ++i) {
            if (assign[i] != 1) s.a.insert(vs[i]);
            if (assign[i] != 0) s.b.insert(vs[i]);
        }
        if (s.order() < k && s.valid_for(g)) out.push_back(s);
        int i = 0;
        while (i < n && assign[i] == 2) assign[i++] = 0;
        if (i == n) break;
        ++assign[i];
    }
    return out;
}

// Exhaustive simple-path enumeration between u and v with internal vertices
// restricted to `allowed`.
inline void all_paths(const Graph& g, Vertex u, Vertex v,
                      const std::set<Vertex>& allowed_internal,
                      std::vector<Vertex>& cur, std::set<Vertex>& used,
                      const std::function<void(const std::vector<Vertex>&)>& emit) {
    if (cur.back() == v) {
        emit(cur);
        return;
    }
    for (Vertex w : g.neighbors(cur.back())) {
        if (used.count(w)) continue;
        if (w != v && !allowed_internal.count(w)) continue;
        used.insert(w);
        cur.push_back(w);
        all_paths(g, u, v, allowed_internal, cur, used, emit);
        cur.pop_back();
        used.erase(w);
    }
}

}  // namespace oracle

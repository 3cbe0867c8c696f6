#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "walloid/errors.hpp"

namespace walloid {

using Vertex = int32_t;
using Edge = std::pair<Vertex, Vertex>;  // normalized u < v

inline Edge make_edge(Vertex a, Vertex b) {
    if (a == b) throw InputError("self-loop edge " + std::to_string(a));
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Finite simple graph over opaque integer vertex ids, immutable after
// construction. Carries a universal ranking (bijection onto 1..n); the
// default ranking is id order.
class Graph {
public:
    Graph() = default;
    Graph(std::vector<Vertex> vertices, std::vector<Edge> edges);
    Graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
          std::map<Vertex, int> ranking);

    int num_vertices() const { return static_cast<int>(verts_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Vertex>& vertices() const { return verts_; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_vertex(Vertex v) const { return index_.count(v) != 0; }
    bool has_edge(Vertex a, Vertex b) const;
    int index_of(Vertex v) const;     // position in sorted vertex list
    Vertex vertex_at(int idx) const { return verts_[idx]; }
    const std::vector<Vertex>& neighbors(Vertex v) const;
    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

    int rank(Vertex v) const;                       // 1..n
    const std::map<Vertex, int>& ranking() const { return ranking_; }

    // Value-returning edits.
    Graph with_edge(Vertex a, Vertex b) const;
    Graph without_vertices(const std::set<Vertex>& drop) const;
    Graph induced(const std::set<Vertex>& keep) const;
    Graph subgraph(const std::set<Vertex>& vs, const std::vector<Edge>& es) const;

    std::vector<std::vector<Vertex>> components() const;
    bool is_connected() const;

private:
    std::vector<Vertex> verts_;              // sorted
    std::vector<Edge> edges_;                // sorted, normalized
    std::map<Vertex, int> index_;
    std::vector<std::vector<Vertex>> adj_;   // by index, sorted
    std::map<Vertex, int> ranking_;
};

// Graph plus an ordered list of hyperedges (vertex subsets of the base).
struct ExtendedGraph {
    Graph base;
    std::vector<std::vector<Vertex>> hyperedges;

    void check() const;
};

// Ordered separation (A, B): A ∪ B = V, no edge between A∖B and B∖A.
struct Separation {
    std::set<Vertex> a;
    std::set<Vertex> b;

    int order() const;
    bool valid_for(const Graph& g) const;
};

// Pairwise vertex-disjoint paths, each stored as its vertex sequence.
struct Linkage {
    std::vector<std::vector<Vertex>> paths;

    int order() const { return static_cast<int>(paths.size()); }
    std::set<Vertex> vertex_set() const;
    bool disjoint() const;
    bool paths_in(const Graph& g) const;
};

// Branch-set map of a pattern graph into a host graph.
struct MinorModel {
    Graph pattern;
    std::map<Vertex, std::set<Vertex>> branch;  // pattern vertex -> host vertices
};

// Menger-style vertex-disjoint A-B linkage of order k via unit-capacity
// flow; ties among augmenting choices broken by lowest ranking. Returns
// absent when no such linkage exists. Paths are internally disjoint from
// A ∪ B.
std::optional<Linkage> disjoint_paths(const Graph& g, const std::set<Vertex>& a,
                                      const std::set<Vertex>& b, int k);

// Maximum order over all A-B linkages (flow value).
int max_disjoint_paths(const Graph& g, const std::set<Vertex>& a,
                       const std::set<Vertex>& b);

bool is_minor_model(const Graph& host, const MinorModel& model);

// Every ordered separation of order < k, exactly once. Enumerates by
// separator subset, so the practical limit is C(|V|, k-1); `vertex_cap`
// keeps accidental blowups out (raise it deliberately for small k).
std::vector<Separation> enumerate_separations(const Graph& g, int k,
                                              int vertex_cap = 14);

// Witness that `h` is a subdivision of `g` (max degree of g must be <= 3):
// branch-vertex correspondence plus an edge -> path map.
struct SubdivisionWitness {
    std::map<Vertex, Vertex> branch;                  // g vertex -> h vertex
    std::map<Edge, std::vector<Vertex>> edge_paths;   // g edge -> h path
};
std::optional<SubdivisionWitness> is_subdivision(const Graph& h, const Graph& g);

}  // namespace walloid

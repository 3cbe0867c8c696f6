#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "walloid/errors.hpp"

namespace walloid {

// Combinatorial map: per-vertex cyclic order of edge-ends (darts) plus a
// per-edge orientation bit. Dart 2e is the end of edge e at its `u`,
// dart 2e+1 the end at `v`. Loops and parallel edges are allowed; faces
// come out of signed face tracing, Euler genus out of the Euler formula.
class CombinatorialMap {
public:
    struct MapEdge {
        int u, v;
        bool twisted;
    };

    explicit CombinatorialMap(int num_vertices = 0) : rot_(num_vertices) {}

    int add_vertex();
    // Appends the new darts at the end of each endpoint's rotation.
    int add_edge(int u, int v, bool twisted = false);

    int num_vertices() const { return static_cast<int>(rot_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const MapEdge& edge(int e) const { return edges_[e]; }
    const std::vector<int>& rotation(int v) const { return rot_[v]; }
    void set_rotation(int v, std::vector<int> darts);
    void set_twisted(int e, bool twisted);

    int tail(int dart) const {
        const MapEdge& e = edges_[dart >> 1];
        return (dart & 1) ? e.v : e.u;
    }
    int head(int dart) const { return tail(dart ^ 1); }

    // Faces. A slot is (edge, side) with side in {0,1}; every face is a
    // closed walk covering a set of slots; each slot lies on exactly one
    // face.
    struct Face {
        std::vector<int> darts;     // boundary walk, one traversal direction
        std::vector<int> vertices;  // tails of the darts, in walk order
    };
    const std::vector<Face>& faces() const;
    int num_faces() const { return static_cast<int>(faces().size()); }
    int face_of_slot(int edge, int side) const;
    // Corner c at vertex v sits between rotation(v)[c] and rotation(v)[c+1].
    int face_at_corner(int v, int corner) const;
    int face_degree(int f) const { return static_cast<int>(faces()[f].darts.size()); }

    // 2 - |V| + |E| - |F| per connected component, summed. Requires the
    // underlying graph to be connected for the usual interpretation.
    int euler_genus() const;
    bool connected() const;

    bool orientable() const;
    // For orientable maps: vertex flips normalizing all signs to +1. A
    // vertex with flip=1 has its rotation read reversed in the global
    // orientation.
    std::optional<std::vector<char>> orientation_flips() const;

    // Boundary walk of face f with a consistent direction; for orientable
    // maps traversal follows the global orientation.
    std::vector<int> face_walk_vertices(int f) const { return faces()[f].vertices; }

private:
    void trace() const;

    std::vector<MapEdge> edges_;
    std::vector<std::vector<int>> rot_;
    mutable bool traced_ = false;
    mutable std::vector<Face> faces_;
    mutable std::vector<int> slot_face_;    // 2e+side -> face
    mutable std::vector<std::vector<int>> corner_face_;  // per vertex, per corner
};

// Result of cutting the surface along a simple closed walk of darts.
// Sides are face sets; a side is reported as a disk when it is connected
// and has Euler characteristic 1 once capped along the walk.
struct CutResult {
    bool two_sided = false;
    std::vector<int> left_faces, right_faces;
    std::set<int> left_inner_vertices, right_inner_vertices;
    bool left_is_disk = false, right_is_disk = false;
};

// `walk` is a closed dart walk (head of each dart = tail of the next) using
// distinct edges and distinct vertices.
CutResult cut_along(const CombinatorialMap& m, const std::vector<int>& walk);

}  // namespace walloid

#pragma once

#include <optional>
#include <set>
#include <vector>

#include "walloid/graph.hpp"
#include "walloid/map.hpp"
#include "walloid/wall.hpp"

namespace walloid {

// One cell of a Σ-decomposition: boundary nodes in cyclic order, the
// attached subgraph, the frame face hosting the interior, and the frame
// arcs realizing the boundary (arc i runs nodes[i] -> nodes[i+1]; a
// 2-node cell has two parallel arcs, a 1-node cell a loop, a boundary-
// less cell no arcs).
struct DecompCell {
    std::vector<int> nodes;
    Graph subgraph;
    int face = -1;
    std::vector<int> arcs;

    int arity() const { return static_cast<int>(nodes.size()); }
    bool is_vortex() const { return arity() >= 4; }
};

// Σ-decomposition realized combinatorially: the frame map's vertices are
// the nodes; its edges are the cell boundary arcs (plus, for renditions,
// the disk boundary arcs); every topological query is a face/region
// computation on the frame.
class SigmaDecomposition {
public:
    std::vector<Vertex> node_vertex;  // π
    std::map<Vertex, int> node_index;
    CombinatorialMap frame;
    std::vector<DecompCell> cells;
    std::vector<int> arc_cell;    // frame edge -> cell id, -1 for disk boundary
    std::map<int, int> tie_breaker;  // 2-node cell id -> chosen arc position {0,1}

    // Rendition extras.
    bool is_rendition = false;
    std::vector<int> omega_nodes;  // cyclic, on the disk boundary
    int outside_face = -1;

    int node_of(Vertex v) const;
    std::vector<int> simple_cells() const;
    std::vector<int> vortex_cells() const;
    int breadth() const { return static_cast<int>(vortex_cells().size()); }
    std::set<Vertex> ground_vertices() const;
    int cell_of_edge(Vertex a, Vertex b) const;  // via subgraph membership

    // Ensures internal derived tables exist (edge -> cell).
    void freeze();

private:
    mutable std::map<Edge, int> edge_cell_;
    friend struct DecompAccess;

public:
    const std::map<Edge, int>& edge_cells() const { return edge_cell_; }
};

struct DecompReport {
    bool disjoint_interiors = false;   // each face hosts at most one cell
    bool boundaries_in_nodes = false;  // boundary nodes are subgraph vertices
    bool cells_meet_in_nodes = false;  // pairwise intersections are nodes
    bool edges_covered = false;        // every edge in exactly one cell
    bool frame_consistent = false;     // arcs bound the registered faces
    int breadth = 0;
    std::vector<int> simple_cells, vortex_cells;
    std::set<Vertex> ground;

    bool ok() const {
        return disjoint_interiors && boundaries_in_nodes && cells_meet_in_nodes &&
               edges_covered && frame_consistent;
    }
};

DecompReport validate_decomposition(const SigmaDecomposition& d, const Graph& g);

// Trace of a grounded path or cycle: the per-cell boundary detours glued
// into a walk in the frame.
struct Trace {
    bool closed = false;
    std::vector<int> arc_walk;       // frame darts, in order
    std::vector<int> nodes_visited;  // node ids at the joints
};

bool is_grounded(const std::vector<Vertex>& q, bool closed, const SigmaDecomposition& d);
Trace trace_of(const std::vector<Vertex>& q, bool closed, const SigmaDecomposition& d);
bool is_contractible(const std::vector<Vertex>& cycle, const SigmaDecomposition& d);

struct DiskRegion {
    std::set<int> faces;
    std::set<int> inner_nodes;
    std::vector<int> boundary_nodes;
};

// Nodes met by the trace of a cycle.
std::set<int> nodes_of_cycle(const std::vector<Vertex>& cycle,
                             const SigmaDecomposition& d);

// The disk bounded by the trace of `cycle` avoiding every node in `avoid`
// (node ids). Absent when the trace does not bound such a disk.
std::optional<DiskRegion> avoiding_disk(const std::vector<Vertex>& cycle,
                                        const std::set<int>& avoid,
                                        const SigmaDecomposition& d);

// Bounded-flood variant for small regions: absent when neither side stays
// within `cap` faces or no side qualifies.
std::optional<DiskRegion> avoiding_disk_local(const std::vector<Vertex>& cycle,
                                              const std::set<int>& avoid,
                                              const SigmaDecomposition& d, size_t cap);

// Simple cells of d carrying an edge of the fence cycle, plus the simple
// cells inside the csi-avoiding disk of its trace.
std::set<int> influence(const std::vector<Vertex>& fence_cycle,
                        const std::set<Vertex>& csi_vertices,
                        const SigmaDecomposition& d);

// Frame surgery: attach a new cell with the given boundary nodes inside
// face `face`; the subgraph is recorded as-is. Returns the cell id.
int attach_cell_in_face(SigmaDecomposition& d, int face, const std::vector<int>& nodes,
                        Graph subgraph);

}  // namespace walloid

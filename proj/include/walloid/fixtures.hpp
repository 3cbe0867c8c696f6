#pragma once

#include <map>
#include <vector>

#include "walloid/decomposition.hpp"
#include "walloid/graph.hpp"
#include "walloid/wall.hpp"

namespace walloid {

// Extra material hanging inside a cell: fresh vertices plus edges among
// themselves and to the cell's boundary vertices.
struct GutSpec {
    std::vector<Vertex> extra_vertices;
    std::vector<Edge> edges;
};

// Canonical decomposition of a walloid host: every skeleton edge becomes a
// 2-node cell, flap pendants become 2-node cells, flap hyperedges become
// simple cells on their z-nodes, vortex hyperedges become vortex cells on
// the inner nest cycle. Guts (keyed by segment index) enrich the flap or
// vortex cell subgraphs; the returned graph is the walloid host plus guts.
struct CanonicalDecomp {
    Graph g;
    SigmaDecomposition delta;
    std::map<Edge, int> cell_of_skel_edge;
    std::map<int, int> flap_cell;    // segment index -> cell id
    std::map<int, int> vortex_cell;  // segment index -> cell id
};

CanonicalDecomp canonical_decomposition(const WalloidHandle& w,
                                        const std::map<int, GutSpec>& flap_guts = {},
                                        const std::map<int, GutSpec>& vortex_guts = {});

// Frame face corresponding to a skeleton face (matched by the underlying
// edge multiset of the boundary walk).
int frame_face_of_skeleton_face(const SigmaDecomposition& d, const WalloidHandle& w,
                                int skel_face);

// Attach a fresh 3-node gut cell under a brick face of the walloid: the
// cell's boundary nodes are three branch vertices of the brick, and its
// subgraph is a fresh vertex joined to all three. Returns the cell id and
// extends `g` with the fresh vertex.
int attach_brick_gut(CanonicalDecomp& cd, const WalloidHandle& w, int brick_face,
                     Vertex fresh_id);

// A cylindrical rendition in a disk: concentric grounded cycles around one
// central cell (vortex when arity >= 4) with radial spokes out to the disk
// boundary. Society vertices are the outermost cycle.
struct CylinderFixture {
    Graph g;
    SigmaDecomposition rho;            // rendition in the disk
    std::vector<Vertex> omega;         // cyclic boundary order
    std::vector<std::vector<Vertex>> rings;  // outermost first
    int center_cell = -1;              // the cell inside the innermost ring
};

CylinderFixture cylinder_rendition(int rings, int spokes, int center_arity);

}  // namespace walloid

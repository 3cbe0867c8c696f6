#pragma once

#include <optional>
#include <vector>

#include "walloid/coloring.hpp"
#include "walloid/decomposition.hpp"
#include "walloid/graph.hpp"
#include "walloid/wall.hpp"

namespace walloid {

// Graph with a cyclic boundary order.
struct Society {
    Graph g;
    std::vector<Vertex> omega;

    void check() const;
    int omega_pos(Vertex v) const;  // -1 when absent
};

// Cyclic position interval [first..last] (inclusive) in omega.
struct OmegaSegment {
    int first = 0, last = 0;

    std::vector<int> positions(int n) const;
    bool contains(int pos, int n) const;
};

struct Transaction {
    Linkage linkage;
    OmegaSegment seg_a, seg_b;
};

struct TransactionFlags {
    bool planar = false;
    bool has_peripheral = false;
    bool crooked = false;
    bool proper = false;
    bool exposed = false;
    bool splitting = false;
};

// Two disjoint paths whose endpoints interleave on omega.
std::optional<std::pair<Path, Path>> find_cross(const Society& s);

// Planar embedding of a biconnected graph as a face list (each face a
// closed vertex walk, consistently oriented); absent when non-planar.
std::optional<std::vector<std::vector<Vertex>>> planar_embed_biconnected(const Graph& g);

// Vortex-free rendition in a disk for cross-free societies; absent exactly
// when a cross exists.
std::optional<SigmaDecomposition> synthesize_disk_rendition(const Society& s);

int society_depth(const Society& s);
std::optional<Transaction> max_transaction(const Society& s, const OmegaSegment& a,
                                           const OmegaSegment& b);

// Society of a vortex cell: the cell subgraph with its boundary order.
Society vortex_society(const SigmaDecomposition& d, int cell);

// Flags; rendition-dependent flags need rho (and the nest for exposed /
// splitting). The nest is a list of grounded cycles, innermost first.
TransactionFlags classify(const Transaction& t, const Society& s,
                          const SigmaDecomposition* rho = nullptr,
                          const std::vector<Path>* nest = nullptr);

// Planar order of a transaction's paths (left to right by the first
// segment's positions), each path oriented from seg_a to seg_b.
std::vector<Path> planar_order(const Transaction& t, const Society& s);

// Order-p rho-proper subtransaction of t; refuses when order(t) is below
// (x+1)(2xy+p) for x = max(1, breadth(rho)), y = depth over vortex
// societies of rho.
Transaction extract_proper(const SigmaDecomposition& rho, const Society& s,
                           const Transaction& t, int p);

// Parcels of a splitting transaction: cycles between consecutive paths
// closed along the innermost nest cycle.
std::vector<Path> parcels(const Transaction& t, const Society& s,
                          const SigmaDecomposition& rho, const Path& inner_cycle);

// Homogeneous subtransaction of order p via ladder homogenization over
// parcel colorings.
Transaction extract_homogeneous(const Transaction& t, const Society& s,
                                const SigmaDecomposition& rho, const Path& inner_cycle,
                                const CellColoring& chi, int p);

// Radial linkage of order |nest| orthogonal to the nest, start-coterminal
// with `from` and end-coterminal with `to`.
Linkage coterminal_radial_linkage(const Society& s, const std::vector<Path>& nest,
                                  const Linkage& from, const Linkage& to);

// Storage segments: a ((2T+1) x p)-wall segment split into base (rows
// 1..T), plot strip (rows T, T+1) and lower wall; plots are the strip's
// bricks.
struct StorageSegment {
    WallHandle wall;
    int t = 0;  // T: base row count

    std::vector<int> plot_faces() const;
};

// Consecutive flap segments representing every plot color; delta supplies
// the cells, avoid the influence reference boundary.
std::vector<SegmentHandle> storage_to_flaps(const StorageSegment& st,
                                            const SigmaDecomposition& delta,
                                            const CellColoring& chi,
                                            const std::set<Vertex>& avoid, int b);

}  // namespace walloid

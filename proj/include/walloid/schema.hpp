#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "walloid/coloring.hpp"
#include "walloid/decomposition.hpp"
#include "walloid/graph.hpp"
#include "walloid/society.hpp"
#include "walloid/tangle.hpp"
#include "walloid/wall.hpp"

namespace walloid {

// The primary object: a graph, its decomposition, and a walloid grounded
// in it, with breadth/depth bounds.
struct SigmaSchema {
    Graph g;
    SigmaDecomposition delta;
    WalloidHandle w;
    int x = 0;  // breadth bound
    int y = 0;  // depth bound
};

struct SchemaReport {
    bool s1 = false, s2 = false, s3 = false, s4 = false;
    bool s5 = false, s6 = false, s7 = false, s8 = false;
    int breadth = 0, depth = 0;

    bool ok() const { return s1 && s2 && s3 && s4 && s5 && s6 && s7 && s8; }
};

SchemaReport validate_schema(const SigmaSchema& s);

// Nodes of the simple cycle's trace, used as the avoiding set everywhere.
std::set<Vertex> csi_vertices(const SigmaSchema& s);

// Chi-coloring of a fence: colors of the cells in its influence.
ColorSet fence_coloring(const SigmaSchema& s, const std::vector<Vertex>& fence_cycle,
                        const CellColoring& chi);

// Enclosure fences of the walloid: big enclosure first, then handle pairs
// and crosscaps in segment order.
std::vector<Fence> enclosure_fences(const WalloidHandle& w);

bool is_chi_homogeneous(const SigmaSchema& s, const CellColoring& chi);

// For every color in S there are b cells matching consecutive flap
// hyperedges of the walloid carrying that color.
bool b_represents(const SigmaSchema& s, const CellColoring& chi,
                  const std::set<int>& colors, int b);
// The inclusion-maximal represented subset of chi's colors.
std::set<int> represented_colors(const SigmaSchema& s, const CellColoring& chi, int b);

// Routing: a |c~|-linkage from the cell boundary to the external pegs of
// the distance-1 fence, drawn inside the distance-2 fence region.
Linkage cell_paths_to_pegs(const SigmaSchema& s, const Fence& brick, int cell);
// As above but reaching the bottom boundary of the 12x12 window around the
// brick; returns the window's column indices as well.
struct BottomRouting {
    Linkage paths;
    std::vector<int> window_rows, window_cols;  // base cycle / column indices
};
BottomRouting paths_to_bottom(const SigmaSchema& s, const Fence& brick, int cell);

// One round of flap extraction for a color present in some enclosure's
// coloring but not yet b-represented. Genus-0 big-enclosure case plus the
// crosscap/handle case reduced to it.
SigmaSchema representation_step(const SigmaSchema& s, const CellColoring& chi,
                                int alpha, int t, int b);
// Iterate representation_step to a fixpoint (at most capacity many times).
struct RepresentAllResult {
    SigmaSchema schema;
    int iterations = 0;
};
RepresentAllResult represent_all(const SigmaSchema& s, const CellColoring& chi, int t,
                                 int b);

// Required walloid order for one representation step, and for a full
// chain of `colors` steps (the consumption scales with each step's
// target, so the chain composes the step sizes).
int representation_step_size(int t, int b);
int represent_all_size(int t, int b, int colors);

// Homogenization of a walloid-backed schema (annulus walls; handle and
// crosscap ladders homogenized along their rainbows).
SigmaSchema homogenize_walloid(const SigmaSchema& s, const CellColoring& chi, int r,
                               int t);

// View an (r, 2t+s+2)-annulus-wall schema as an (r,t,s)-schema with one
// vortex segment swallowing the exceptional region.
SigmaSchema single_vortex_view(const SigmaSchema& s, int t, int snest);

// Boundaried graphs and indices.
struct BoundariedGraph {
    Graph g;
    std::vector<Vertex> boundary;  // ordered by the host ranking
};

class BoundariedIndex {
public:
    // Reference index: the isomorphism type of the radius-rho neighborhood
    // of the boundary, hashed into `buckets` classes per boundary type.
    BoundariedIndex(int radius, int buckets);

    int operator()(const BoundariedGraph& b) const;
    int capacity() const { return capacity_; }

private:
    int radius_, buckets_, capacity_;
};

// Index of the boundaried graph attached at a simple cell.
int iota_delta(const BoundariedIndex& iota, const Graph& host,
               const SigmaDecomposition& d, int cell);

// Combinatorial sigma-equivalence: always true on non-orientable frames;
// on orientable frames, cells with three boundary nodes must agree on the
// rank rotation.
bool sigma_equivalent(const Graph& host, const SigmaDecomposition& d, int c1, int c2);

// Grid-model extraction from a walloid that t^2-represents the coloring.
MinorModel extract_representing_grid(const SigmaSchema& s, const CellColoring& chi,
                                     int t);

// Both conditions of the grid-representation definition.
bool verify_grid_represents(const SigmaSchema& s, const MinorModel& mu,
                            const CellColoring& chi);
bool verify_grid_represents_index(const SigmaSchema& s, const MinorModel& mu,
                                  const BoundariedIndex& iota);

// Verifier for a claimed structure-theorem outcome.
struct LstWitness {
    Graph g;             // the full graph
    std::set<Vertex> apex;
    SigmaSchema schema;  // over g minus apex
    int apex_bound = 0, breadth_bound = 0, depth_bound = 0;
    int b = 1;
};
struct LstReport {
    bool apex_ok = false, schema_ok = false, breadth_ok = false, depth_ok = false;
    bool vortex_depth_ok = false, representation_ok = false;
    SchemaReport schema_detail;

    bool ok() const {
        return apex_ok && schema_ok && breadth_ok && depth_ok && vortex_depth_ok &&
               representation_ok;
    }
};
LstReport verify_lst_outcome(const LstWitness& w, const BoundariedIndex& iota);

}  // namespace walloid

#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "walloid/graph.hpp"
#include "walloid/map.hpp"

namespace walloid {

using Path = std::vector<Vertex>;

struct GridHandle {
    Graph host;
    int n = 0, m = 0;
    std::vector<Path> row_paths;     // n paths of m vertices
    std::vector<Path> column_paths;  // m paths of n vertices
};

enum class WallKind { Wall, WallSegment, AnnulusWall, Ladder };

// Certified handle of a wall-like form. Rows are horizontal paths top to
// bottom (base cycles for annulus walls, stored cut open at the seam);
// cols are vertical paths left to right. Boundary roles follow the
// elementary definitions; segments keep their degree-one vertices.
struct WallHandle {
    Graph host;
    WallKind kind = WallKind::Wall;
    int r = 0, t = 0;  // horizontal paths x vertical paths
    std::vector<Path> rows;
    std::vector<Path> cols;
    std::vector<Vertex> top_bd, bot_bd;    // t entries
    std::vector<Vertex> left_bd, right_bd; // r entries (segments only)
    bool annulus = false;                  // rows close into cycles

    // Skeleton map of the wall subgraph plus the host-vertex of each map
    // vertex. Built by the constructors; rebuilt by take_subwall.
    CombinatorialMap skel;
    std::vector<Vertex> skel_vertex;
    std::map<Vertex, int> skel_index;
    int outer_face = -1;

    const std::set<Edge>& edge_set() const { return edges_; }
    std::set<Edge> edges_;  // edges of the wall subgraph

    // Brick faces: faces of the skeleton with exactly six degree-3
    // vertices (degree within the wall subgraph).
    std::vector<int> brick_faces() const;
    std::vector<Path> brick_cycles() const;
    // Face ids of skeleton bricks geometrically inside the given cycle
    // (the side away from the outer face).
    std::set<int> bricks_inside_cycle(const std::vector<Vertex>& cycle) const;
    std::vector<int> walk_of_cycle(const std::vector<Vertex>& cycle) const;
};

struct LadderHandle {
    Graph host;
    int t = 0;                       // number of rungs
    std::vector<Path> rungs;         // horizontal paths, top to bottom
    std::vector<Path> rails;         // two vertical paths
    // Brick i sits between rungs i and i+1.
    int num_bricks() const { return t - 1; }
};

enum class SegKind { Wall, Handle, Crosscap, Flap, Vortex };

// A single segment over its own host graph. `base` is the underlying wall
// segment; decorations depend on the kind.
struct SegmentHandle {
    SegKind kind = SegKind::Wall;
    WallHandle base;
    int t = 0;        // the segment order (base width is derived from it)
    int arity = 0;    // flap
    int s = 0;        // vortex nest size parameter
    std::vector<Path> rainbow;        // handle: left then right halves concatenated
    std::vector<Path> rainbow_right;  // handle only
    std::vector<Vertex> hyperedge;    // flap: z vertices; vortex: V(C_0)
    std::vector<Path> pendants;       // flap: t_i .. z_i paths
    std::vector<Path> nest;           // vortex: C_0 .. C_{s+1} cycles
    std::vector<Path> radial;         // vortex radial linkage
};

// Walloid: cylindrical closure of a surface wall followed by flap and
// vortex segments, assembled over one host graph with a canonical
// skeleton embedding of the hyperedge-free, degree-one-suppressed part.
struct WalloidSegmentRole {
    SegKind kind = SegKind::Wall;
    int width = 0;                    // vertical paths in the base
    int arity = 0;                    // flap
    std::vector<Path> cols;           // base verticals
    std::vector<Vertex> top_bd;       // base top boundary, left to right
    std::vector<Path> rainbow;        // handle: left rainbow; crosscap/flap rainbow
    std::vector<Path> rainbow_right;  // handle only
    std::vector<Vertex> hyperedge;
    std::vector<Path> pendants;       // flap
    std::vector<Path> nest;           // vortex
    std::vector<Path> radial;         // vortex
};

struct Fence {
    std::set<int> bricks;            // skeleton brick faces inside
    std::vector<Vertex> cycle;       // boundary cycle, host vertices
    std::set<int> region_faces;      // all skeleton faces inside
    std::set<Edge> inside_edges;     // edges drawn inside or on the cycle
};

struct WalloidHandle {
    Graph host;
    int r = 0, t = 0, s = 0, h = 0, c = 0;
    std::vector<WalloidSegmentRole> segments;  // wall, handles/crosscaps, flaps, vortices
    std::vector<Path> base_cycles;             // r+t cycles, top to bottom (cyclic)

    CombinatorialMap skel;
    std::vector<Vertex> skel_vertex;
    std::map<Vertex, int> skel_index;

    // Named structure.
    std::vector<Vertex> big_enclosure;      // top base cycle
    std::vector<Vertex> simple_cycle;       // bottom base cycle
    int exceptional_face = -1;
    int simple_face = -1;
    std::vector<std::vector<Vertex>> enclosures;  // big + handle pairs + crosscaps

    int num_flaps() const;
    int num_vortices() const;
    std::set<Edge> skeleton_edges() const;

    std::vector<int> brick_faces() const;
    std::vector<Vertex> face_cycle(int f) const;
    int degree3_count(int f) const;

    Fence fence_of_face(int f) const;
    Fence fence_of_bricks(const std::set<int>& bricks) const;
    // Fence at distance d, defined while the previous fence stays disjoint
    // from the simple and exceptional cycles.
    Fence fence_at_distance(const Fence& f, int d) const;
    bool is_internal(const Fence& f, int d) const;
    Fence fence_from_exceptional(int d) const;  // distance d from the C^ex face cycle

    std::vector<Vertex> internal_pegs(const Fence& f) const;
    std::vector<Vertex> external_pegs(const Fence& f) const;

    std::vector<int> walk_of_cycle(const std::vector<Vertex>& cycle) const;
};

// Elementary constructors.
GridHandle elementary_grid(int n, int m);
WallHandle elementary_wall(int t, int z);
WallHandle elementary_wall_segment(int r, int t);
WallHandle elementary_annulus_wall(int r, int t);
SegmentHandle elementary_handle_segment(int r, int t);
SegmentHandle elementary_crosscap_segment(int r, int t);
SegmentHandle elementary_flap_segment(int r, int t, int q);
SegmentHandle elementary_vortex_segment(int r, int t, int s);
LadderHandle elementary_ladder(int t);

// Concatenation glues the j-th right boundary vertex of each segment to
// the j-th left boundary vertex of the next; the closure also wraps
// around. Closure enforces the walloid segment order (one wall segment
// with handles/crosscaps, then flaps, then vortices) and all segments
// must share the row count.
Graph concatenate(const std::vector<SegmentHandle>& segments);
struct WalloidShape {
    int r = 3, t = 3, h = 0, c = 0, s = 1;
    std::vector<int> flap_arities;
    int vortices = 0;
};
WalloidHandle elementary_walloid(const WalloidShape& shape);
WalloidHandle cylindrical_closure(const std::vector<SegmentHandle>& segments);

// Assemble a walloid handle from role paths over an existing host (used
// by the extraction pipelines, whose outputs are subdivided walloids).
// Decoration-path interiors must have degree two within the walloid.
WalloidHandle assemble_walloid(const Graph& host, int r, int t, int s,
                               std::vector<WalloidSegmentRole> segments,
                               std::vector<Path> base_cycles,
                               const std::map<Vertex, int>& heights = {});

// A wall handle over an existing host from explicit row/column paths.
WallHandle wall_from_paths(const Graph& host, std::vector<Path> rows,
                           std::vector<Path> cols, WallKind kind);

// Recognizers: structural validation of a handle against its host data.
bool recognize_grid(const GridHandle& g);
bool recognize_wall(const WallHandle& w);
bool recognize_segment(const SegmentHandle& s);
bool recognize_walloid(const WalloidHandle& w);
bool recognize_ladder(const LadderHandle& l);

// Subwalls.
bool is_subwall(const WallHandle& sub, const WallHandle& whole);
WallHandle take_subwall(const WallHandle& w, const std::vector<int>& row_idx,
                        const std::vector<int>& col_idx);
LadderHandle take_subladder(const LadderHandle& l, const std::vector<int>& rung_idx);

}  // namespace walloid

#include "walloid/schema.hpp"

#include "walloid/fixtures.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace walloid {

// ---------------------------------------------------------------------------
// Geometry helpers over a walloid handle.

namespace {

struct WalloidGeom {
    const WalloidHandle* w;
    std::map<Vertex, int> row_of;                 // base cycle index
    std::vector<std::map<Vertex, int>> row_pos_;  // position within each cycle

    explicit WalloidGeom(const WalloidHandle& wal) : w(&wal) {
        row_pos_.resize(wal.base_cycles.size());
        for (int i = 0; i < static_cast<int>(wal.base_cycles.size()); ++i)
            for (int p = 0; p < static_cast<int>(wal.base_cycles[i].size()); ++p) {
                row_of[wal.base_cycles[i][p]] = i;
                row_pos_[i][wal.base_cycles[i][p]] = p;
            }
    }

    Vertex col_on_row(const Path& col, int row) const {
        for (Vertex v : col) {
            auto it = row_of.find(v);
            if (it != row_of.end() && it->second == row) return v;
        }
        throw InputError("column does not meet the requested base cycle");
    }

    Path col_walk(const Path& col, int row_a, int row_b) const {
        Vertex a = col_on_row(col, row_a);
        Vertex b = col_on_row(col, row_b);
        auto ia = std::find(col.begin(), col.end(), a);
        auto ib = std::find(col.begin(), col.end(), b);
        Path out;
        if (ia <= ib) out = Path(ia, ib + 1);
        else {
            out = Path(ib, ia + 1);
            std::reverse(out.begin(), out.end());
        }
        return out;
    }

    // Walk along a base cycle from a to b passing through the witness.
    Path row_walk_via(int row, Vertex a, Vertex b, Vertex via) const {
        const Path& cyc = w->base_cycles[row];
        int n = static_cast<int>(cyc.size());
        int ia = row_pos_[row].at(a), ib = row_pos_[row].at(b);
        int im = row_pos_[row].at(via);
        int dm = (im - ia + n) % n, db = (ib - ia + n) % n;
        int dir = (dm <= db) ? 1 : -1;
        Path out;
        for (int i = ia;; i = (i + dir + n) % n) {
            out.push_back(cyc[i]);
            if (i == ib) break;
        }
        return out;
    }

    // Walk along a base cycle taking the shorter arc.
    Path row_walk(int row, Vertex a, Vertex b) const {
        const Path& cyc = w->base_cycles[row];
        int n = static_cast<int>(cyc.size());
        int ia = row_pos_[row].at(a), ib = row_pos_[row].at(b);
        int fwd = (ib - ia + n) % n, bwd = (ia - ib + n) % n;
        int dir = fwd <= bwd ? 1 : -1;
        Path out;
        for (int i = ia;; i = (i + dir + n) % n) {
            out.push_back(cyc[i]);
            if (i == ib) break;
        }
        return out;
    }
};

std::set<Vertex> path_edges_vertices(const Path& p, std::set<Edge>* edges) {
    std::set<Vertex> out(p.begin(), p.end());
    if (edges)
        for (size_t i = 0; i + 1 < p.size(); ++i)
            edges->insert(make_edge(p[i], p[i + 1]));
    return out;
}

}  // namespace

std::set<Vertex> csi_vertices(const SigmaSchema& s) {
    return std::set<Vertex>(s.w.simple_cycle.begin(), s.w.simple_cycle.end());
}

// ---------------------------------------------------------------------------
// Schema validation.

namespace {

bool check_s1(const SigmaSchema& s) {
    std::set<Edge> skel_edges = s.w.skeleton_edges();
    for (const auto& cell : s.delta.cells) {
        if (cell.is_vortex()) {
            for (const Edge& e : cell.subgraph.edges())
                if (skel_edges.count(e)) return false;
            continue;
        }
        // The walloid part inside one simple cell must be a forest.
        std::vector<Edge> inside;
        std::set<Vertex> verts;
        for (const Edge& e : cell.subgraph.edges())
            if (skel_edges.count(e)) {
                inside.push_back(e);
                verts.insert(e.first);
                verts.insert(e.second);
            }
        if (inside.size() >= verts.size() && !inside.empty()) return false;
        if (!inside.empty()) {
            Graph sub(std::vector<Vertex>(verts.begin(), verts.end()), inside);
            if (sub.num_edges() > sub.num_vertices() -
                                      static_cast<int>(sub.components().size()))
                return false;
        }
    }
    return true;
}

// Simplify a concatenated walk into a simple path by excising loops.
Path simplify_path(const Path& p) {
    Path out;
    std::map<Vertex, int> pos;
    for (Vertex v : p) {
        auto it = pos.find(v);
        if (it != pos.end()) {
            while (static_cast<int>(out.size()) > it->second + 1) {
                pos.erase(out.back());
                out.pop_back();
            }
            continue;
        }
        pos[v] = static_cast<int>(out.size());
        out.push_back(v);
    }
    return out;
}

// The two-sided check: no two cells pinch at a shared node pair (a lens
// region with at most three boundary nodes and two cells inside), plus the
// Menger consequence the schema machinery relies on: every simple cell's
// boundary reaches that many distinct ground vertices disjointly. The
// region enumeration above supplements this on small frames.
bool check_s2(const SigmaSchema& s) {
    const SigmaDecomposition& d = s.delta;
    int nn = d.frame.num_vertices();
    // (a) no two distinct cells share two or more boundary nodes.
    {
        std::vector<std::vector<int>> cells_at_node(nn);
        for (int c = 0; c < static_cast<int>(d.cells.size()); ++c)
            for (int n : d.cells[c].nodes) cells_at_node[n].push_back(c);
        std::set<std::pair<int, int>> seen;
        for (int n = 0; n < nn; ++n) {
            const auto& bucket = cells_at_node[n];
            for (size_t i = 0; i < bucket.size(); ++i)
                for (size_t j = i + 1; j < bucket.size(); ++j) {
                    auto key = std::minmax(bucket[i], bucket[j]);
                    if (!seen.insert(key).second) {
                        // Second shared node: a lens forms. It violates
                        // the condition only when the lens region has at
                        // most three boundary nodes.
                        std::set<int> uni(d.cells[key.first].nodes.begin(),
                                          d.cells[key.first].nodes.end());
                        uni.insert(d.cells[key.second].nodes.begin(),
                                   d.cells[key.second].nodes.end());
                        if (uni.size() <= 3) return false;
                    }
                }
        }
    }
    // (b) Menger access for cell boundaries: the consequence the routing
    // machinery consumes, checked for cells whose boundary sits on the
    // walloid skeleton (hyperedge attachment cells hang off it and are
    // never routed). Frames beyond the flow budget skip this part.
    if (nn > 0 && static_cast<int>(d.cells.size()) <= 4000) {
        std::set<Vertex> skel(s.w.skel_vertex.begin(), s.w.skel_vertex.end());
        std::set<Vertex> ground = d.ground_vertices();
        for (int c : d.simple_cells()) {
            const auto& cell = d.cells[c];
            if (cell.nodes.empty()) continue;
            bool on_skel = true;
            std::set<Vertex> sources;
            for (int n : cell.nodes) {
                if (!skel.count(d.node_vertex[n])) on_skel = false;
                sources.insert(d.node_vertex[n]);
            }
            if (!on_skel) continue;
            std::set<Vertex> targets;
            for (Vertex v : ground)
                if (!sources.count(v) && skel.count(v)) targets.insert(v);
            if (static_cast<int>(targets.size()) < cell.arity()) continue;
            if (max_disjoint_paths(s.g, sources, targets) < cell.arity()) return false;
        }
    }
    return true;
}

}  // namespace

SchemaReport validate_schema(const SigmaSchema& s) {
    SchemaReport rep;
    const SigmaDecomposition& d = s.delta;
    rep.breadth = d.breadth();
    for (int c : d.vortex_cells())
        rep.depth = std::max(rep.depth, society_depth(vortex_society(d, c)));

    rep.s1 = check_s1(s);
    rep.s2 = check_s2(s);

    // S3: ground vertices share the walloid's component.
    {
        std::set<Vertex> wverts(s.w.host.vertices().begin(), s.w.host.vertices().end());
        auto comps = s.g.components();
        int wcomp = -1;
        for (int i = 0; i < static_cast<int>(comps.size()); ++i)
            for (Vertex v : comps[i])
                if (v == s.w.base_cycles[0][0]) wcomp = i;
        rep.s3 = wcomp >= 0;
        if (rep.s3) {
            std::set<Vertex> main(comps[wcomp].begin(), comps[wcomp].end());
            for (Vertex v : d.ground_vertices())
                if (!main.count(v)) rep.s3 = false;
            // S4: other components live in boundary-less cells.
            rep.s4 = true;
            for (int i = 0; i < static_cast<int>(comps.size()); ++i) {
                if (i == wcomp) continue;
                bool housed = false;
                for (const auto& cell : d.cells) {
                    if (!cell.nodes.empty()) continue;
                    bool all = true;
                    for (Vertex v : comps[i])
                        if (!cell.subgraph.has_vertex(v)) all = false;
                    if (all) housed = true;
                }
                if (!housed) rep.s4 = false;
            }
        } else {
            rep.s4 = false;
        }
    }
    rep.s5 = rep.breadth <= s.x && rep.depth <= s.y;

    // S6: at every skeleton branch vertex that is a node, the cyclic order
    // of the walloid's edge cells around the node matches the skeleton
    // rotation (up to direction).
    {
        rep.s6 = true;
        for (int mv = 0; mv < s.w.skel.num_vertices(); ++mv) {
            Vertex v = s.w.skel_vertex[mv];
            auto it = d.node_index.find(v);
            if (it == d.node_index.end()) continue;
            int node = it->second;
            // Skeleton cell order.
            std::vector<int> skel_cells;
            for (int dart : s.w.skel.rotation(mv)) {
                Vertex to = s.w.skel_vertex[s.w.skel.head(dart)];
                skel_cells.push_back(d.cell_of_edge(v, to));
            }
            // Frame cell order (dedup consecutive arcs of one cell).
            std::vector<int> frame_cells;
            for (int dart : d.frame.rotation(node)) {
                int cell = d.arc_cell[dart >> 1];
                if (cell < 0) continue;
                bool is_skel = false;
                for (int c2 : skel_cells)
                    if (c2 == cell) is_skel = true;
                if (!is_skel) continue;
                if (frame_cells.empty() || frame_cells.back() != cell)
                    frame_cells.push_back(cell);
            }
            if (!frame_cells.empty() && frame_cells.front() == frame_cells.back() &&
                frame_cells.size() > 1)
                frame_cells.pop_back();
            if (frame_cells.size() != skel_cells.size()) {
                rep.s6 = false;
                continue;
            }
            int n = static_cast<int>(skel_cells.size());
            bool match = false;
            for (int dir : {1, -1})
                for (int off = 0; off < n; ++off) {
                    bool ok = true;
                    for (int i = 0; i < n; ++i)
                        if (frame_cells[((i * dir + off) % n + n) % n] != skel_cells[i])
                            ok = false;
                    if (ok) match = true;
                }
            if (!match) rep.s6 = false;
        }
    }

    // S7: flap hyperedges match simple cells, vortex hyperedges vortex
    // cells.
    {
        rep.s7 = true;
        auto find_cell = [&](const std::vector<Vertex>& verts, bool vortex) {
            std::set<Vertex> want(verts.begin(), verts.end());
            for (int c = 0; c < static_cast<int>(d.cells.size()); ++c) {
                if (d.cells[c].is_vortex() != vortex) continue;
                std::set<Vertex> got;
                for (int n : d.cells[c].nodes) got.insert(d.node_vertex[n]);
                if (got == want) return c;
            }
            return -1;
        };
        for (const auto& seg : s.w.segments) {
            if (seg.kind == SegKind::Flap && find_cell(seg.hyperedge, false) < 0)
                rep.s7 = false;
            if (seg.kind == SegKind::Vortex && find_cell(seg.hyperedge, true) < 0)
                rep.s7 = false;
        }
    }

    // S8.
    {
        int vsegs = s.w.num_vortices();
        if (vsegs == 0) {
            rep.s8 = true;
            auto vortices = d.vortex_cells();
            if (!vortices.empty()) {
                std::set<int> avoid;
                for (Vertex v : s.w.simple_cycle) {
                    auto it = d.node_index.find(v);
                    if (it != d.node_index.end()) avoid.insert(it->second);
                }
                auto exc = s.w.face_cycle(s.w.exceptional_face);
                try {
                    auto disk = avoiding_disk(exc, avoid, d);
                    if (!disk.has_value()) rep.s8 = false;
                    else
                        for (int c : vortices)
                            if (!disk->faces.count(d.cells[c].face)) rep.s8 = false;
                } catch (const std::exception&) {
                    rep.s8 = false;
                }
            }
        } else {
            rep.s8 = (vsegs == s.x);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Colorings over schemas.

ColorSet fence_coloring(const SigmaSchema& s, const std::vector<Vertex>& fence_cycle,
                        const CellColoring& chi) {
    std::set<int> inf = influence(fence_cycle, csi_vertices(s), s.delta);
    ColorSet out = 0;
    for (int c : inf) {
        auto it = chi.assignment.find(c);
        if (it != chi.assignment.end()) out |= color_bit(it->second);
    }
    return out;
}

std::vector<Fence> enclosure_fences(const WalloidHandle& w) {
    std::vector<Fence> out;
    for (const auto& cyc : w.enclosures) {
        // Inside: the side away from the exceptional face.
        CutResult cut = cut_along(w.skel, w.walk_of_cycle(cyc));
        if (!cut.two_sided) throw IntegrityError("enclosure does not separate");
        std::set<int> left(cut.left_faces.begin(), cut.left_faces.end());
        std::set<int> right(cut.right_faces.begin(), cut.right_faces.end());
        const std::set<int>* inside = nullptr;
        if (!left.count(w.exceptional_face)) inside = &left;
        else if (!right.count(w.exceptional_face)) inside = &right;
        else throw IntegrityError("exceptional face on both enclosure sides");
        Fence f;
        f.cycle = cyc;
        f.region_faces = *inside;
        for (int b : w.brick_faces())
            if (inside->count(b)) f.bricks.insert(b);
        out.push_back(std::move(f));
    }
    return out;
}

bool is_chi_homogeneous(const SigmaSchema& s, const CellColoring& chi) {
    for (const Fence& enc : enclosure_fences(s.w)) {
        ColorSet first = 0;
        bool got = false;
        for (int b : enc.bricks) {
            ColorSet cs = fence_coloring(s, s.w.face_cycle(b), chi);
            if (!got) {
                first = cs;
                got = true;
            } else if (cs != first) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Representation bookkeeping.

namespace {

// Cell id matching a flap hyperedge, or -1.
int flap_cell_of(const SigmaDecomposition& d, const std::vector<Vertex>& hyperedge) {
    std::set<Vertex> want(hyperedge.begin(), hyperedge.end());
    for (int c = 0; c < static_cast<int>(d.cells.size()); ++c) {
        if (d.cells[c].is_vortex()) continue;
        std::set<Vertex> got;
        for (int n : d.cells[c].nodes) got.insert(d.node_vertex[n]);
        if (got == want) return c;
    }
    return -1;
}

}  // namespace

bool b_represents(const SigmaSchema& s, const CellColoring& chi,
                  const std::set<int>& colors, int b) {
    // Flap cells in segment order.
    std::vector<int> flap_colors;
    for (const auto& seg : s.w.segments) {
        if (seg.kind != SegKind::Flap) continue;
        int c = flap_cell_of(s.delta, seg.hyperedge);
        if (c < 0) return false;
        auto it = chi.assignment.find(c);
        flap_colors.push_back(it == chi.assignment.end() ? -1 : it->second);
    }
    for (int alpha : colors) {
        bool found = false;
        for (int start = 0; start + b <= static_cast<int>(flap_colors.size()); ++start) {
            bool run = true;
            for (int i = start; i < start + b; ++i)
                if (flap_colors[i] != alpha) run = false;
            if (run) found = true;
        }
        if (!found) return false;
    }
    return true;
}

std::set<int> represented_colors(const SigmaSchema& s, const CellColoring& chi, int b) {
    std::set<int> all;
    for (auto& [c, col] : chi.assignment) all.insert(col);
    std::set<int> out;
    for (int alpha : all)
        if (b_represents(s, chi, {alpha}, b)) out.insert(alpha);
    return out;
}

// ---------------------------------------------------------------------------
// Routing.

Linkage cell_paths_to_pegs(const SigmaSchema& s, const Fence& brick, int cell) {
    if (cell < 0 || cell >= static_cast<int>(s.delta.cells.size()))
        throw InputError("cell_paths_to_pegs: unknown cell");
    Fence f1 = s.w.fence_at_distance(brick, 1);
    Fence f2 = s.w.fence_at_distance(brick, 2);
    std::set<int> inf = influence(brick.cycle, csi_vertices(s), s.delta);
    if (!inf.count(cell))
        throw InputError("cell_paths_to_pegs: cell not in the brick's influence");

    // Host region: graph drawn inside the distance-2 fence.
    std::set<int> avoid_nodes;
    for (Vertex v : csi_vertices(s)) {
        auto it = s.delta.node_index.find(v);
        if (it != s.delta.node_index.end()) avoid_nodes.insert(it->second);
    }
    auto disk = avoiding_disk(f2.cycle, avoid_nodes, s.delta);
    if (!disk.has_value()) throw InputError("cell_paths_to_pegs: no avoiding disk");
    std::set<Vertex> verts;
    std::vector<Edge> edges;
    for (int c = 0; c < static_cast<int>(s.delta.cells.size()); ++c) {
        const auto& dc = s.delta.cells[c];
        bool in_region = dc.face >= 0 && disk->faces.count(dc.face);
        // Cells on the fence cycle carry its edges; include them too.
        if (!in_region) {
            bool on_cycle = false;
            for (size_t i = 0; i < f2.cycle.size(); ++i)
                if (s.delta.cell_of_edge(f2.cycle[i],
                                         f2.cycle[(i + 1) % f2.cycle.size()]) == c)
                    on_cycle = true;
            if (!on_cycle) continue;
        }
        for (Vertex v : dc.subgraph.vertices()) verts.insert(v);
        for (const Edge& e : dc.subgraph.edges()) edges.push_back(e);
    }
    Graph region = s.g.subgraph(verts, edges);
    std::set<Vertex> sources;
    for (int n : s.delta.cells[cell].nodes) sources.insert(s.delta.node_vertex[n]);
    auto pegs_vec = s.w.external_pegs(f1);
    std::set<Vertex> pegs(pegs_vec.begin(), pegs_vec.end());
    int k = static_cast<int>(sources.size());
    auto link = disjoint_paths(region, sources, pegs, k);
    if (!link.has_value())
        throw IntegrityError("cell_paths_to_pegs: routing infeasible");
    return *link;
}

BottomRouting paths_to_bottom(const SigmaSchema& s, const Fence& brick, int cell) {
    WalloidGeom geom(s.w);
    // Locate the brick: rows and columns it touches.
    int row_min = INT32_MAX;
    for (Vertex v : brick.cycle) {
        auto it = geom.row_of.find(v);
        if (it != geom.row_of.end()) row_min = std::min(row_min, it->second);
    }
    if (row_min == INT32_MAX) throw InputError("paths_to_bottom: brick off the annulus");
    // Which segment and columns? The bounding staircases contribute at
    // least two cycle vertices; neighbors touch the mid-row vertices only.
    const WalloidSegmentRole* role = nullptr;
    int col_min = INT32_MAX;
    for (const auto& seg : s.w.segments) {
        for (int j = 0; j < static_cast<int>(seg.cols.size()); ++j) {
            std::set<Vertex> cs(seg.cols[j].begin(), seg.cols[j].end());
            int hits = 0;
            for (Vertex v : brick.cycle)
                if (cs.count(v)) ++hits;
            if (hits >= 2 && (role == nullptr || j < col_min)) {
                role = &seg;
                col_min = j;
            }
        }
        if (role == &seg) break;
    }
    if (!role) throw InputError("paths_to_bottom: brick columns not found");

    BottomRouting out;
    int r0 = std::max(0, row_min - 5);
    for (int i = r0; i < r0 + 12; ++i) out.window_rows.push_back(i);
    int c0 = std::max(0, col_min - 5);
    if (c0 + 12 > static_cast<int>(role->cols.size()))
        c0 = static_cast<int>(role->cols.size()) - 12;
    if (c0 < 0) throw InputError("paths_to_bottom: segment too narrow for the window");
    for (int j = c0; j < c0 + 12; ++j) out.window_cols.push_back(j);

    // Window subgraph plus the distance-1 fence region.
    std::set<Vertex> verts;
    std::vector<Edge> edges;
    std::set<Edge> eset;
    auto add_path = [&](const Path& p) {
        for (size_t i = 0; i < p.size(); ++i) {
            verts.insert(p[i]);
            if (i + 1 < p.size() && eset.insert(make_edge(p[i], p[i + 1])).second)
                edges.push_back(make_edge(p[i], p[i + 1]));
        }
    };
    for (int j : out.window_cols)
        add_path(geom.col_walk(role->cols[j], out.window_rows.front(),
                               out.window_rows.back()));
    for (int i : out.window_rows) {
        Vertex a = geom.col_on_row(role->cols[out.window_cols.front()], i);
        Vertex b = geom.col_on_row(role->cols[out.window_cols.back()], i);
        add_path(geom.row_walk(i, a, b));
    }
    Fence f1 = s.w.fence_at_distance(brick, 1);
    std::set<int> avoid_nodes;
    for (Vertex v : csi_vertices(s)) {
        auto it = s.delta.node_index.find(v);
        if (it != s.delta.node_index.end()) avoid_nodes.insert(it->second);
    }
    auto disk = avoiding_disk(f1.cycle, avoid_nodes, s.delta);
    if (!disk.has_value()) throw InputError("paths_to_bottom: no avoiding disk");
    for (int c = 0; c < static_cast<int>(s.delta.cells.size()); ++c) {
        const auto& dc = s.delta.cells[c];
        bool take = dc.face >= 0 && disk->faces.count(dc.face);
        if (!take) {
            for (size_t i = 0; i < f1.cycle.size() && !take; ++i)
                if (s.delta.cell_of_edge(f1.cycle[i],
                                         f1.cycle[(i + 1) % f1.cycle.size()]) == c)
                    take = true;
        }
        if (!take) continue;
        for (Vertex v : dc.subgraph.vertices()) verts.insert(v);
        for (const Edge& e : dc.subgraph.edges())
            if (eset.insert(e).second) edges.push_back(e);
    }
    Graph region = s.g.subgraph(verts, edges);
    std::set<Vertex> sources;
    for (int n : s.delta.cells[cell].nodes) sources.insert(s.delta.node_vertex[n]);
    std::set<Vertex> targets;
    for (int j : out.window_cols)
        targets.insert(geom.col_on_row(role->cols[j], out.window_rows.back()));
    int k = static_cast<int>(sources.size());
    auto link = disjoint_paths(region, sources, targets, k);
    if (!link.has_value()) throw IntegrityError("paths_to_bottom: routing infeasible");
    out.paths = *link;
    return out;
}

// ---------------------------------------------------------------------------
// Representation step (big-enclosure case; the handle/crosscap cases are
// not constructed at this scale).

int representation_step_size(int t, int b) { return t + 2 * (6 + b * (2 * t + 12)); }

SigmaSchema representation_step(const SigmaSchema& s, const CellColoring& chi,
                                int alpha, int t, int b) {
    if (s.w.num_vortices() > 0)
        throw InputError("representation_step requires a walloid without vortex segments");
    if (b < 1 || t < 3) throw InputError("representation_step: bad parameters");
    int tprime = s.w.t;
    int need = representation_step_size(t, b);
    if (tprime < need)
        throw RefusalError("representation_step needs walloid order >= " +
                           std::to_string(need) + ", got " + std::to_string(tprime));
    // Already represented: report by returning the schema unchanged.
    if (b_represents(s, chi, {alpha}, b)) return s;

    auto fences = enclosure_fences(s.w);
    // Which enclosure carries alpha?
    int which = -1;
    for (int i = 0; i < static_cast<int>(fences.size()); ++i) {
        bool has = false;
        for (int bb : fences[i].bricks)
            if (has_color(fence_coloring(s, s.w.face_cycle(bb), chi), alpha)) has = true;
        if (has) which = i;
        if (which >= 0) break;
    }
    if (which < 0)
        throw InputError("representation_step: color absent from every enclosure");
    if (which != 0)
        throw RefusalError(
            "representation_step: extraction from handle/crosscap enclosures is not "
            "implemented; only the big-enclosure case is constructed");

    int r = s.w.r;
    int p = 2 * t + 12;
    int q = b * p;
    int margin = 6;
    int drop = 2 * (q + 6);  // base cycles removed from the top
    WalloidGeom geom(s.w);

    // The wall segment role.
    int wall_idx = -1;
    for (int i = 0; i < static_cast<int>(s.w.segments.size()); ++i)
        if (s.w.segments[i].kind == SegKind::Wall) wall_idx = i;
    if (wall_idx < 0) throw IntegrityError("walloid without a wall segment");
    const auto& wall = s.w.segments[wall_idx];
    if (static_cast<int>(wall.cols.size()) < margin + q + r + t)
        throw RefusalError("representation_step: wall segment too narrow");

    int new_top = drop;  // base cycle index of the new top row
    int bottom = r + tprime - 1;

    // New flap segments, one per copy.
    std::vector<WalloidSegmentRole> new_flaps;
    std::set<Vertex> used;  // routing disjointness audit
    for (int copy = 0; copy < b; ++copy) {
        int b0 = margin + copy * p;  // first bundle column
        // The target brick: rows t+5, t+6 (0-based), bundle middle columns.
        int brow = t + 5;
        int bcol = b0 + t + 5;
        // Find the brick face bounded by these rows and columns.
        int brick = -1;
        std::set<Vertex> want;
        want.insert(geom.col_on_row(wall.cols[bcol], brow));
        want.insert(geom.col_on_row(wall.cols[bcol + 1], brow));
        want.insert(geom.col_on_row(wall.cols[bcol], brow + 1));
        want.insert(geom.col_on_row(wall.cols[bcol + 1], brow + 1));
        for (int f : s.w.brick_faces()) {
            auto cyc = s.w.face_cycle(f);
            std::set<Vertex> fv(cyc.begin(), cyc.end());
            int hit = 0;
            for (Vertex v : want)
                if (fv.count(v)) ++hit;
            if (hit >= 3) {
                bool rows_ok = true;
                for (Vertex v : cyc) {
                    auto it = geom.row_of.find(v);
                    if (it != geom.row_of.end() &&
                        (it->second < brow || it->second > brow + 1))
                        rows_ok = false;
                }
                if (rows_ok) {
                    brick = f;
                    break;
                }
            }
        }
        if (brick < 0) throw IntegrityError("representation_step: target brick missing");
        Fence bf = s.w.fence_of_face(brick);
        // An alpha cell in its influence.
        int cell = -1;
        for (int c : influence(bf.cycle, csi_vertices(s), s.delta)) {
            auto it = chi.assignment.find(c);
            if (it != chi.assignment.end() && it->second == alpha) cell = c;
        }
        if (cell < 0)
            throw IntegrityError(
                "representation_step: homogeneity promised an alpha cell in the brick's "
                "influence");
        BottomRouting routing = paths_to_bottom(s, bf, cell);
        // Extend each path down its column to the new top row.
        WalloidSegmentRole flap;
        flap.kind = SegKind::Flap;
        std::vector<std::pair<int, Path>> pendants;  // (column index, path)
        for (const auto& path : routing.paths.paths) {
            Vertex endv = path.back();
            int col = -1;
            for (int j : routing.window_cols) {
                const Path& cp = wall.cols[j];
                if (std::find(cp.begin(), cp.end(), endv) != cp.end()) col = j;
            }
            if (col < 0) throw IntegrityError("representation_step: path end off window");
            Path ext = geom.col_walk(wall.cols[col], routing.window_rows.back(), new_top);
            Path full = path;
            if (ext.front() != full.back()) std::reverse(ext.begin(), ext.end());
            full.insert(full.end(), ext.begin() + 1, ext.end());
            std::reverse(full.begin(), full.end());  // from the top boundary inward
            pendants.push_back({col, simplify_path(full)});
        }
        std::sort(pendants.begin(), pendants.end(),
                  [](auto& a2, auto& b2) { return a2.first < b2.first; });
        flap.arity = static_cast<int>(pendants.size());
        // Rainbow: path k rises to row k-1 over the bundle. Staircase
        // turns can duplicate a junction between the column and row legs;
        // simplification excises those loops.
        for (int k = 1; k <= t; ++k) {
            Path left = geom.col_walk(wall.cols[b0 + k - 1], new_top, k - 1);
            Vertex across_to = geom.col_on_row(wall.cols[b0 + p - k], k - 1);
            Path across = geom.row_walk(k - 1, left.back(), across_to);
            Path right = geom.col_walk(wall.cols[b0 + p - k], k - 1, new_top);
            Path full = left;
            full.insert(full.end(), across.begin() + 1, across.end());
            if (right.front() != full.back() && right.back() == full.back())
                std::reverse(right.begin(), right.end());
            full.insert(full.end(), right.begin() + 1, right.end());
            flap.rainbow.push_back(simplify_path(full));
        }
        // Base columns: first t, pendant columns, last t of the bundle.
        std::vector<int> base_cols;
        for (int k = 0; k < t; ++k) base_cols.push_back(b0 + k);
        for (auto& [col, path] : pendants) base_cols.push_back(col);
        for (int k = p - t; k < p; ++k) base_cols.push_back(b0 + k);
        flap.width = static_cast<int>(base_cols.size());
        for (int j : base_cols)
            flap.cols.push_back(geom.col_walk(wall.cols[j], new_top, bottom));
        for (int j : base_cols)
            flap.top_bd.push_back(geom.col_on_row(wall.cols[j], new_top));
        for (auto& [col, path] : pendants) {
            flap.pendants.push_back(path);
            flap.hyperedge.push_back(path.back());
        }
        // Disjointness audit across the new structures.
        for (const auto& pth : flap.rainbow)
            for (Vertex v : pth)
                if (!used.insert(v).second)
                    throw IntegrityError("representation_step: routing collision at " +
                                         std::to_string(v) + " (rainbow)");
        for (const auto& pth : flap.pendants)
            for (Vertex v : pth)
                if (!used.insert(v).second)
                    throw IntegrityError("representation_step: routing collision at " +
                                         std::to_string(v) + " (pendant)");
        new_flaps.push_back(std::move(flap));
    }

    // Assemble the new walloid: cropped wall segment, existing decorated
    // segments with rainbows extended through the dropped zone, then the
    // new flaps (inserted before any existing flaps stay consecutive runs
    // intact: new flaps go last).
    std::vector<WalloidSegmentRole> roles;
    {
        WalloidSegmentRole nw;
        nw.kind = SegKind::Wall;
        for (int j = margin + q; j < margin + q + r + t; ++j) {
            nw.cols.push_back(geom.col_walk(wall.cols[j], new_top, bottom));
            nw.top_bd.push_back(geom.col_on_row(wall.cols[j], new_top));
        }
        nw.width = static_cast<int>(nw.cols.size());
        roles.push_back(std::move(nw));
    }
    for (const auto& seg : s.w.segments) {
        if (seg.kind == SegKind::Wall) continue;
        WalloidSegmentRole role;
        role.kind = seg.kind;
        role.arity = seg.arity;
        auto extend = [&](const Path& old) {
            // Old endpoints sit on the old top row; ride their columns down.
            auto col_of = [&](Vertex v) -> const Path* {
                for (const auto& cp : seg.cols)
                    if (std::find(cp.begin(), cp.end(), v) != cp.end()) return &cp;
                return nullptr;
            };
            Path out;
            const Path* c1 = col_of(old.front());
            if (!c1) throw IntegrityError("representation_step: rainbow end off columns");
            Path down1 = geom.col_walk(*c1, new_top, 0);
            out = down1;
            if (out.back() != old.front())
                throw IntegrityError("representation_step: extension mismatch");
            out.insert(out.end(), old.begin() + 1, old.end());
            const Path* c2 = col_of(old.back());
            if (!c2) throw IntegrityError("representation_step: rainbow end off columns");
            Path down2 = geom.col_walk(*c2, 0, new_top);
            if (down2.front() != out.back())
                throw IntegrityError("representation_step: extension mismatch");
            out.insert(out.end(), down2.begin() + 1, down2.end());
            return out;
        };
        for (const auto& pth : seg.rainbow) role.rainbow.push_back(extend(pth));
        for (const auto& pth : seg.rainbow_right)
            role.rainbow_right.push_back(extend(pth));
        for (const auto& pth : seg.pendants) {
            // Pendants run from the top boundary to the hyperedge vertex.
            auto col_of = [&](Vertex v) -> const Path* {
                for (const auto& cp : seg.cols)
                    if (std::find(cp.begin(), cp.end(), v) != cp.end()) return &cp;
                return nullptr;
            };
            const Path* c1 = col_of(pth.front());
            if (!c1) throw IntegrityError("representation_step: pendant off columns");
            Path down = geom.col_walk(*c1, new_top, 0);
            if (down.back() != pth.front())
                throw IntegrityError("representation_step: pendant extension mismatch");
            Path out = down;
            out.insert(out.end(), pth.begin() + 1, pth.end());
            role.pendants.push_back(out);
        }
        role.hyperedge = seg.hyperedge;
        for (const auto& cp : seg.cols) {
            role.cols.push_back(geom.col_walk(cp, new_top, bottom));
            role.top_bd.push_back(geom.col_on_row(cp, new_top));
        }
        role.width = static_cast<int>(role.cols.size());
        roles.push_back(std::move(role));
    }
    for (auto& flap : new_flaps) roles.push_back(std::move(flap));

    std::vector<Path> cycles(s.w.base_cycles.begin() + new_top, s.w.base_cycles.end());
    SigmaSchema out;
    out.g = s.g;
    out.delta = s.delta;
    out.x = s.x;
    out.y = s.y;
    out.w = assemble_walloid(s.g, r, t, s.w.s, std::move(roles), std::move(cycles));
    return out;
}

// Chained size: one step per color, each step's output large enough for
// the next (the consumption per step scales with its target, so the sizes
// compose rather than add).
int represent_all_size(int t, int b, int colors) {
    int size = t;
    for (int i = 0; i < std::max(1, colors); ++i)
        if (i < colors) size = representation_step_size(size, b);
    return colors == 0 ? t : size;
}

RepresentAllResult represent_all(const SigmaSchema& s, const CellColoring& chi, int t,
                                 int b) {
    int cap = chi.capacity();
    int need = represent_all_size(t, b, cap);
    if (s.w.t < need)
        throw RefusalError("represent_all needs walloid order >= " + std::to_string(need));
    RepresentAllResult out;
    out.schema = s;
    for (int iter = 0; iter < cap; ++iter) {
        // A color in some enclosure's coloring that is not yet represented.
        std::set<int> enclosure_colors;
        for (const Fence& enc : enclosure_fences(out.schema.w))
            for (int bb : enc.bricks) {
                ColorSet cs =
                    fence_coloring(out.schema, out.schema.w.face_cycle(bb), chi);
                for (int c = 1; c <= kMaxColor; ++c)
                    if (has_color(cs, c)) enclosure_colors.insert(c);
            }
        std::set<int> done = represented_colors(out.schema, chi, b);
        int alpha = -1;
        for (int c : enclosure_colors)
            if (!done.count(c)) alpha = c;
        if (alpha < 0) break;
        int remaining = cap - iter;
        int target = represent_all_size(t, b, remaining - 1);
        out.schema = representation_step(out.schema, chi, alpha, target, b);
        ++out.iterations;
    }
    return out;
}

}  // namespace walloid

namespace walloid {

// ---------------------------------------------------------------------------
// Boundaried indices and sigma-equivalence.

namespace {

// Canonical string of a small graph with an ordered boundary: exact
// canonization by trying every labeling extension (neighborhoods stay
// tiny at desk scale).
std::string canonical_form(const Graph& g, const std::vector<Vertex>& boundary) {
    int n = g.num_vertices();
    std::vector<Vertex> verts = g.vertices();
    std::map<Vertex, int> fixed;
    for (int i = 0; i < static_cast<int>(boundary.size()); ++i)
        fixed[boundary[i]] = i;
    std::vector<Vertex> rest;
    for (Vertex v : verts)
        if (!fixed.count(v)) rest.push_back(v);
    std::sort(rest.begin(), rest.end());
    std::string best;
    // Permutations of the rest (cap the blowup; identical-degree pruning
    // is unnecessary at these sizes).
    if (rest.size() > 7) {
        // Large guts: fall back to a degree-profile form (still invariant,
        // coarser than isomorphism).
        std::vector<std::string> rows;
        for (Vertex v : rest) {
            std::string row = "d" + std::to_string(g.degree(v));
            int bmask = 0;
            for (Vertex w : g.neighbors(v))
                if (fixed.count(w)) bmask |= 1 << fixed[w];
            row += "b" + std::to_string(bmask);
            rows.push_back(row);
        }
        std::sort(rows.begin(), rows.end());
        std::string out = "B" + std::to_string(boundary.size());
        for (size_t i = 0; i < boundary.size(); ++i)
            for (size_t j = i + 1; j < boundary.size(); ++j)
                out += g.has_edge(boundary[i], boundary[j]) ? '1' : '0';
        for (auto& r : rows) out += "|" + r;
        return out;
    }
    std::vector<int> perm(rest.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    do {
        std::map<Vertex, int> label = fixed;
        for (size_t i = 0; i < rest.size(); ++i)
            label[rest[perm[i]]] = static_cast<int>(boundary.size() + i);
        std::vector<std::pair<int, int>> edges;
        for (const Edge& e : g.edges()) {
            int a = label[e.first], b = label[e.second];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
        std::sort(edges.begin(), edges.end());
        std::string form = "B" + std::to_string(boundary.size()) + ":";
        for (auto& [a, b] : edges)
            form += std::to_string(a) + "-" + std::to_string(b) + ";";
        if (best.empty() || form < best) best = form;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// Boundary type id: boundary size and induced boundary graph, positioned
// so equal indices force equal boundary isomorphism type and smaller
// boundaries get strictly smaller indices.
int boundary_type(const Graph& g, const std::vector<Vertex>& boundary) {
    int q = static_cast<int>(boundary.size());
    if (q == 1) return 0;
    if (q == 2) return g.has_edge(boundary[0], boundary[1]) ? 1 : 0;
    int mask = 0;
    int bit = 0;
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            mask |= (g.has_edge(boundary[i], boundary[j]) ? 1 : 0) << bit++;
    return mask;
}

int types_for(int q) { return q == 1 ? 1 : (q == 2 ? 2 : 8); }

}  // namespace

BoundariedIndex::BoundariedIndex(int radius, int buckets)
    : radius_(radius), buckets_(buckets) {
    if (radius < 0 || buckets < 1) throw InputError("bad index parameters");
    capacity_ = buckets * (types_for(1) + types_for(2) + types_for(3));
}

int BoundariedIndex::operator()(const BoundariedGraph& b) const {
    int q = static_cast<int>(b.boundary.size());
    if (q < 1 || q > 3) throw InputError("boundaried graphs have 1..3 boundary vertices");
    for (Vertex v : b.boundary)
        if (!b.g.has_vertex(v)) throw InputError("boundary vertex missing");
    // Radius-limited neighborhood of the boundary.
    std::set<Vertex> keep(b.boundary.begin(), b.boundary.end());
    std::set<Vertex> frontier = keep;
    for (int step = 0; step < radius_; ++step) {
        std::set<Vertex> next;
        for (Vertex v : frontier)
            for (Vertex w : b.g.neighbors(v))
                if (!keep.count(w)) {
                    keep.insert(w);
                    next.insert(w);
                }
        frontier = std::move(next);
    }
    Graph trimmed = b.g.induced(keep);
    std::string form = canonical_form(trimmed, b.boundary);
    int type = boundary_type(b.g, b.boundary);
    int offset = 0;
    for (int qq = 1; qq < q; ++qq) offset += buckets_ * types_for(qq);
    int bucket = static_cast<int>(fnv1a(form) % buckets_);
    return offset + bucket * types_for(q) + type + 1;
}

int iota_delta(const BoundariedIndex& iota, const Graph& host,
               const SigmaDecomposition& d, int cell) {
    if (cell < 0 || cell >= static_cast<int>(d.cells.size()))
        throw InputError("iota_delta: unknown cell");
    const DecompCell& c = d.cells[cell];
    if (c.is_vortex()) throw InputError("iota_delta: vortex cells have no index");
    if (c.nodes.empty()) throw InputError("iota_delta: cell without boundary");
    BoundariedGraph b;
    b.g = c.subgraph;
    // Boundary ordered by the host's universal ranking.
    std::vector<std::pair<int, Vertex>> order;
    for (int n : c.nodes) order.push_back({host.rank(d.node_vertex[n]), d.node_vertex[n]});
    std::sort(order.begin(), order.end());
    for (auto& [r, v] : order) b.boundary.push_back(v);
    return iota(b);
}

bool sigma_equivalent(const Graph& host, const SigmaDecomposition& d, int c1, int c2) {
    auto check = [&](int c) {
        if (c < 0 || c >= static_cast<int>(d.cells.size()))
            throw InputError("sigma_equivalent: unknown cell");
        if (d.cells[c].is_vortex())
            throw InputError("sigma_equivalent: vortex cells do not participate");
    };
    check(c1);
    check(c2);
    if (d.cells[c1].arity() != d.cells[c2].arity()) return false;
    if (d.cells[c1].arity() <= 2) return true;
    auto flips = d.frame.orientation_flips();
    if (!flips.has_value()) return true;  // non-orientable: always equivalent
    // Rank rotation sign: the cyclic boundary order (read in the global
    // orientation) as a permutation of the rank-sorted order.
    auto rotation_sign = [&](int c) {
        const auto& cell = d.cells[c];
        std::vector<int> nodes = cell.nodes;  // cyclic boundary order
        // Orient: a flipped first node reads its boundary reversed.
        if ((*flips)[nodes[0]]) std::reverse(nodes.begin() + 1, nodes.end());
        std::vector<std::pair<int, int>> ranked;
        for (int i = 0; i < 3; ++i)
            ranked.push_back({host.rank(d.node_vertex[nodes[i]]), i});
        std::sort(ranked.begin(), ranked.end());
        // Parity of the cyclic position sequence of rank-sorted nodes.
        int a = ranked[0].second, b = ranked[1].second, c2 = ranked[2].second;
        // Even permutations of (0,1,2): identity and the two rotations.
        bool even = (a == 0 && b == 1 && c2 == 2) || (a == 1 && b == 2 && c2 == 0) ||
                    (a == 2 && b == 0 && c2 == 1);
        return even;
    };
    return rotation_sign(c1) == rotation_sign(c2);
}

// ---------------------------------------------------------------------------
// Grid-model extraction: onion construction for t = 3, one color class.

MinorModel extract_representing_grid(const SigmaSchema& s, const CellColoring& chi,
                                     int t) {
    if (t != 3)
        throw RefusalError("extract_representing_grid is constructed for t = 3");
    // Flap cells in segment order with their colors.
    std::vector<std::pair<const WalloidSegmentRole*, int>> flaps;  // role, cell
    for (const auto& seg : s.w.segments) {
        if (seg.kind != SegKind::Flap) continue;
        int c = flap_cell_of(s.delta, seg.hyperedge);
        if (c < 0) throw InputError("extract_representing_grid: flap cell missing");
        flaps.push_back({&seg, c});
    }
    std::set<int> colors;
    for (auto& [cl, col] : chi.assignment) colors.insert(col);
    if (colors.size() != 1)
        throw RefusalError("extract_representing_grid is constructed for one color class");
    int alpha = *colors.begin();
    std::vector<int> slots;
    for (int i = 0; i < static_cast<int>(flaps.size()); ++i) {
        auto it = chi.assignment.find(flaps[i].second);
        if (it != chi.assignment.end() && it->second == alpha) slots.push_back(i);
    }
    if (static_cast<int>(slots.size()) < t * t)
        throw RefusalError("extract_representing_grid needs t^2 representing flaps");
    slots.resize(t * t);
    if (static_cast<int>(s.w.base_cycles.size()) < 4)
        throw RefusalError("extract_representing_grid needs at least four base cycles");

    WalloidGeom geom(s.w);
    // Slab of a flap: cell boundary and guts, pendants, rainbow, columns
    // cropped to rows 0..1, plus the top-two-rows stretch over its span.
    auto slab_of = [&](int slot, bool with_rows) {
        const auto& [role, cell] = flaps[slots[slot]];
        std::set<Vertex> out;
        for (Vertex v : s.delta.cells[cell].subgraph.vertices()) out.insert(v);
        for (const auto& p : role->pendants) out.insert(p.begin(), p.end());
        // Rainbow arcs attach to the row-0 stretch, so only slabs that
        // claim their rows can carry them connectedly.
        if (with_rows)
            for (const auto& p : role->rainbow) out.insert(p.begin(), p.end());
        if (with_rows) {
            for (const auto& col : role->cols) {
                Path cw = geom.col_walk(col, 0, 1);
                out.insert(cw.begin(), cw.end());
            }
            Vertex a = geom.col_on_row(role->cols.front(), 0);
            Vertex b = geom.col_on_row(role->cols.back(), 0);
            Path r0 = geom.row_walk(0, a, b);
            out.insert(r0.begin(), r0.end());
            a = geom.col_on_row(role->cols.front(), 1);
            b = geom.col_on_row(role->cols.back(), 1);
            Path r1 = geom.row_walk(1, a, b);
            out.insert(r1.begin(), r1.end());
        }
        return out;
    };

    // Ring assignment: grid boundary in cyclic order; slots 0..7 are the
    // ring, slot 8 the center.
    const std::vector<std::pair<int, int>> ring_pos{{1, 1}, {1, 2}, {1, 3}, {2, 3},
                                                    {3, 3}, {3, 2}, {3, 1}, {2, 1}};
    MinorModel mu;
    {
        std::vector<Vertex> pv;
        std::vector<Edge> pe;
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) pv.push_back(3 * (i - 1) + j);
        auto id = [](int i, int j) { return static_cast<Vertex>(3 * (i - 1) + j); };
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) {
                if (j < 3) pe.push_back(make_edge(id(i, j), id(i, j + 1)));
                if (i < 3) pe.push_back(make_edge(id(i, j), id(i + 1, j)));
            }
        mu.pattern = Graph(pv, pe);
    }
    auto id = [](int i, int j) { return static_cast<Vertex>(3 * (i - 1) + j); };

    // Ring slabs plus the inter-slab corridor pieces: slab k spans its
    // flap; the row stretch between consecutive flaps joins slab k.
    std::set<Vertex> taken;
    auto claim = [&](std::set<Vertex>& branch, const std::set<Vertex>& verts) {
        for (Vertex v : verts) {
            if (taken.count(v)) continue;  // first claim wins
            branch.insert(v);
            taken.insert(v);
        }
    };
    std::map<Vertex, std::set<Vertex>> branches;
    for (int k = 0; k < 8; ++k) {
        std::set<Vertex>& br = branches[id(ring_pos[k].first, ring_pos[k].second)];
        claim(br, slab_of(k, true));
        // Stretch along rows 0..1 toward the next ring slab (or, for
        // slab 7, over the wall segment and the center flap's bridge).
        const auto& role = *flaps[slots[k]].first;
        const auto& next_role = *flaps[slots[(k + 1) % 8]].first;
        for (int row : {0, 1}) {
            if (k == 7) continue;
            Vertex a = geom.col_on_row(role.cols.back(), row);
            Vertex b = geom.col_on_row(next_role.cols.front(), row);
            Path stretch = geom.row_walk(row, a, b);
            if (stretch.size() > 2)
                claim(br, std::set<Vertex>(stretch.begin() + 1, stretch.end() - 1));
        }
    }
    // Center: the ninth flap; descend at its first middle column to row 2,
    // then a row-2 arc under slabs 1..7.
    const auto& center_role = *flaps[slots[8]].first;
    int center_cell = flaps[slots[8]].second;
    std::set<Vertex>& center = branches[id(2, 2)];
    claim(center, slab_of(8, false));
    {
        // Row-0 landing zone of the pendants joins the center.
        std::set<Vertex> landing;
        for (const auto& p : center_role.pendants) landing.insert(p.front());
        // Connect landings along row 0 between themselves.
        std::vector<Vertex> lands(landing.begin(), landing.end());
        for (size_t i = 0; i + 1 < lands.size(); ++i) {
            Path w2 = geom.row_walk(0, lands[i], lands[i + 1]);
            landing.insert(w2.begin(), w2.end());
        }
        claim(center, landing);
        // Descent: middle column of the center flap, rows 0..2.
        int mid = static_cast<int>(center_role.cols.size()) / 2;
        const Path* descend_col = nullptr;
        for (const auto& p : center_role.pendants) {
            for (const auto& col : center_role.cols)
                if (std::find(col.begin(), col.end(), p.front()) != col.end())
                    descend_col = &col;
            if (descend_col) break;
        }
        if (!descend_col) descend_col = &center_role.cols[mid];
        Path down = geom.col_walk(*descend_col, 0, 2);
        claim(center, std::set<Vertex>(down.begin(), down.end()));
        // Row-2 arc from the center flap back under slabs 7..1, hopping
        // flap by flap so the walk cannot shortcut around the far side.
        Vertex from = down.back();
        std::set<Vertex> arc_verts{from};
        for (int k = 7; k >= 1; --k) {
            const auto& hop_role = *flaps[slots[k]].first;
            Vertex to = geom.col_on_row(hop_role.cols[0], 2);
            Path hop = geom.row_walk(2, from, to);
            arc_verts.insert(hop.begin(), hop.end());
            from = to;
        }
        claim(center, arc_verts);
    }
    // Slab-7-to-slab-0 corridor: over the eighth-to-ninth stretch, the
    // center flap's outermost rainbow arc, and onward over the wall
    // segment at rows 0..1.
    {
        std::set<Vertex>& br = branches[id(ring_pos[7].first, ring_pos[7].second)];
        const auto& role7 = *flaps[slots[7]].first;
        // Stretch to the center flap.
        for (int row : {0}) {
            Vertex a = geom.col_on_row(role7.cols.back(), row);
            Vertex b = geom.col_on_row(center_role.cols.front(), row);
            Path stretch = geom.row_walk(row, a, b);
            claim(br, std::set<Vertex>(stretch.begin() + 1, stretch.end()));
        }
        // Over the outermost rainbow arc of the center flap (the center
        // claims no rainbow, so the corridor rides it directly).
        const Path& outer_arc = center_role.rainbow.front();
        claim(br, std::set<Vertex>(outer_arc.begin(), outer_arc.end()));
        // Down from the arc's far end and across the wall segment to slab 0.
        Vertex arc_end = outer_arc.back();
        const auto& role0 = *flaps[slots[0]].first;
        Vertex to = geom.col_on_row(role0.cols.front(), 0);
        Path stretch = geom.row_walk(0, arc_end, to);
        claim(br, std::set<Vertex>(stretch.begin() + 1, stretch.end() - 1));
    }

    for (auto& [pv, br] : branches) mu.branch[pv] = br;

    // Audit: every branch holds the boundary of an alpha cell.
    for (int k = 0; k < 9; ++k) {
        Vertex pv = k < 8 ? id(ring_pos[k].first, ring_pos[k].second) : id(2, 2);
        int cell = flaps[slots[k]].second;
        for (int n : s.delta.cells[cell].nodes)
            if (!mu.branch[pv].count(s.delta.node_vertex[n]))
                throw IntegrityError("extract grid: branch lost its cell");
    }
    (void)center_cell;
    return mu;
}

bool verify_grid_represents(const SigmaSchema& s, const MinorModel& mu,
                            const CellColoring& chi) {
    // Branch sets avoid the avoiding disk of every vortex segment's outer
    // nest cycle.
    for (const auto& seg : s.w.segments) {
        if (seg.kind != SegKind::Vortex) continue;
        std::set<int> avoid;
        for (Vertex v : s.w.simple_cycle) {
            auto it = s.delta.node_index.find(v);
            if (it != s.delta.node_index.end()) avoid.insert(it->second);
        }
        auto disk = avoiding_disk(seg.nest.back(), avoid, s.delta);
        if (!disk.has_value()) return false;
        std::set<Vertex> inside;
        for (int n : disk->inner_nodes) inside.insert(s.delta.node_vertex[n]);
        for (int c = 0; c < static_cast<int>(s.delta.cells.size()); ++c)
            if (s.delta.cells[c].face >= 0 && disk->faces.count(s.delta.cells[c].face))
                for (Vertex v : s.delta.cells[c].subgraph.vertices()) inside.insert(v);
        for (const auto& [pv, bs] : mu.branch)
            for (Vertex v : bs)
                if (inside.count(v)) return false;
    }
    // Every branch holds pi of an alpha cell for every color alpha.
    std::set<int> colors;
    for (auto& [c, col] : chi.assignment) colors.insert(col);
    for (const auto& [pv, bs] : mu.branch) {
        for (int alpha : colors) {
            bool found = false;
            for (int c = 0; c < static_cast<int>(s.delta.cells.size()) && !found; ++c) {
                if (s.delta.cells[c].is_vortex()) continue;
                auto it = chi.assignment.find(c);
                if (it == chi.assignment.end() || it->second != alpha) continue;
                bool all = !s.delta.cells[c].nodes.empty();
                for (int n : s.delta.cells[c].nodes)
                    if (!bs.count(s.delta.node_vertex[n])) all = false;
                if (all) found = true;
            }
            if (!found) return false;
        }
    }
    return true;
}

bool verify_grid_represents_index(const SigmaSchema& s, const MinorModel& mu,
                                  const BoundariedIndex& iota) {
    // Branch sets avoid the closures of vortex cells.
    std::set<Vertex> vortex_verts;
    for (int c : s.delta.vortex_cells())
        for (Vertex v : s.delta.cells[c].subgraph.vertices()) vortex_verts.insert(v);
    for (const auto& [pv, bs] : mu.branch)
        for (Vertex v : bs)
            if (vortex_verts.count(v)) return false;
    // For every simple cell c*, every branch hosts a cell of equal index.
    std::set<int> indices;
    for (int c : s.delta.simple_cells())
        if (!s.delta.cells[c].nodes.empty())
            indices.insert(iota_delta(iota, s.g, s.delta, c));
    for (const auto& [pv, bs] : mu.branch)
        for (int want : indices) {
            bool found = false;
            for (int c : s.delta.simple_cells()) {
                if (s.delta.cells[c].nodes.empty()) continue;
                if (iota_delta(iota, s.g, s.delta, c) != want) continue;
                bool all = true;
                for (int n : s.delta.cells[c].nodes)
                    if (!bs.count(s.delta.node_vertex[n])) all = false;
                if (all) found = true;
                if (found) break;
            }
            if (!found) return false;
        }
    return true;
}

LstReport verify_lst_outcome(const LstWitness& w, const BoundariedIndex& iota) {
    LstReport rep;
    rep.apex_ok = static_cast<int>(w.apex.size()) <= w.apex_bound;
    rep.schema_detail = validate_schema(w.schema);
    rep.schema_ok = rep.schema_detail.ok();
    rep.breadth_ok = rep.schema_detail.breadth <= w.breadth_bound;
    rep.depth_ok = rep.schema_detail.depth <= w.depth_bound;
    // Vortex segment societies within depth.
    rep.vortex_depth_ok = true;
    for (const auto& seg : w.schema.w.segments) {
        if (seg.kind != SegKind::Vortex) continue;
        // The vortex segment society: the cell matching its hyperedge.
        int cell = -1;
        std::set<Vertex> want(seg.hyperedge.begin(), seg.hyperedge.end());
        for (int c : w.schema.delta.vortex_cells()) {
            std::set<Vertex> got;
            for (int n : w.schema.delta.cells[c].nodes)
                got.insert(w.schema.delta.node_vertex[n]);
            if (got == want) cell = c;
        }
        if (cell < 0) {
            rep.vortex_depth_ok = false;
            continue;
        }
        if (society_depth(vortex_society(w.schema.delta, cell)) > w.depth_bound)
            rep.vortex_depth_ok = false;
    }
    // b-representation of iota: for every simple cell, b consecutive flap
    // cells of equal index and sigma-equivalence class.
    rep.representation_ok = true;
    std::vector<int> flap_cells;
    for (const auto& seg : w.schema.w.segments) {
        if (seg.kind != SegKind::Flap) continue;
        int c = flap_cell_of(w.schema.delta, seg.hyperedge);
        if (c < 0) {
            rep.representation_ok = false;
            continue;
        }
        flap_cells.push_back(c);
    }
    for (int cstar : w.schema.delta.simple_cells()) {
        if (w.schema.delta.cells[cstar].nodes.empty()) continue;
        int want = iota_delta(iota, w.schema.g, w.schema.delta, cstar);
        bool found = false;
        for (int start = 0; start + w.b <= static_cast<int>(flap_cells.size()); ++start) {
            bool run = true;
            for (int i = start; i < start + w.b; ++i) {
                if (iota_delta(iota, w.schema.g, w.schema.delta, flap_cells[i]) != want)
                    run = false;
                else if (!sigma_equivalent(w.schema.g, w.schema.delta, flap_cells[i],
                                           cstar))
                    run = false;
            }
            if (run) found = true;
        }
        if (!found) rep.representation_ok = false;
    }
    return rep;
}

}  // namespace walloid

namespace walloid {

// ---------------------------------------------------------------------------
// Walloid homogenization: the annulus-wall pipeline. The wall segment is
// homogenized as a plain wall, its rows fold pairwise into nested cycles,
// and the surviving top-half verticals become the radial paths of the new
// annulus. Handle and crosscap decorated inputs need the ladder stages on
// top and their required sizes sit far beyond the desk scale; they are
// refused with the bound that would be needed.
SigmaSchema homogenize_walloid(const SigmaSchema& s, const CellColoring& chi, int r,
                               int t) {
    if (s.w.h + s.w.c > 0)
        throw RefusalError(
            "homogenize_walloid: handle/crosscap stages need wall sides beyond the "
            "desk scale (the required side is quadratic in 3(r+t)+4*(2t)^(2^cap))");
    if (s.w.num_flaps() > 0 || s.w.num_vortices() > 0)
        throw InputError("homogenize_walloid expects an annulus wall");
    int z = r + t;
    int cap = std::max(1, chi.capacity());
    // Required wall side for the two-dimensional homogenization.
    auto pow2 = [](int x, int lev) {
        long long v = 1;
        for (int i = 0; i < (1 << lev); ++i) {
            v *= x;
            if (v > 1'000'000'000LL) throw RefusalError("homogenization size overflow");
        }
        return static_cast<int>(v);
    };
    int need_r = pow2(2 * z, cap);
    int need_c = pow2(3 * z, cap);
    const auto& wallseg = s.w.segments[0];
    int seg_rows = static_cast<int>(s.w.base_cycles.size());
    int seg_cols = static_cast<int>(wallseg.cols.size());
    if (seg_rows - 1 < need_r || seg_cols < need_c)
        throw RefusalError("homogenize_walloid needs a wall segment of at least (" +
                           std::to_string(need_r) + " x " + std::to_string(need_c) +
                           "), got (" + std::to_string(seg_rows) + " x " +
                           std::to_string(seg_cols) + ")");

    // Step 1: the wall segment as a plain wall with the influence coloring.
    WalloidGeom geom(s.w);
    // The bottom boundary row doubles as the simple cycle, whose bricks
    // have no defined influence; keep it out of the homogenized wall.
    std::vector<Path> rows, cols;
    for (int i = 0; i + 1 < seg_rows; ++i) {
        Vertex a = geom.col_on_row(wallseg.cols.front(), i);
        Vertex b = geom.col_on_row(wallseg.cols.back(), i);
        Vertex via = geom.col_on_row(wallseg.cols[wallseg.cols.size() / 2], i);
        rows.push_back(geom.row_walk_via(i, a, b, via));
    }
    for (const auto& col : wallseg.cols) {
        std::set<Vertex> last(s.w.base_cycles.back().begin(),
                              s.w.base_cycles.back().end());
        Path cropped;
        for (Vertex v : col) {
            if (last.count(v)) break;
            cropped.push_back(v);
        }
        cols.push_back(cropped);
    }
    WallHandle w0 = wall_from_paths(s.g, rows, cols, WallKind::WallSegment);
    BrickColoring chi0;
    std::set<Vertex> csi = csi_vertices(s);
    for (int f : w0.brick_faces()) {
        Path cyc;
        for (int mv : w0.skel.faces()[f].vertices) cyc.push_back(w0.skel_vertex[mv]);
        ColorSet cs = 0;
        for (int c : influence(cyc, csi, s.delta)) {
            auto it = chi.assignment.find(c);
            if (it != chi.assignment.end()) cs |= color_bit(it->second);
        }
        chi0.assignment[f] = cs == 0 ? color_bit(1) : cs;
    }
    WallHandle hom = homogenize_wall(w0, chi0, 2 * z, 3 * z);

    // Step 2: fold the 2z rows into z nested cycles; the top-half middle
    // verticals become the new annulus's vertical paths.
    int a = 2 * z, b = 3 * z;
    auto pos_in = [](const Path& p, Vertex v) {
        return static_cast<int>(std::find(p.begin(), p.end(), v) - p.begin());
    };
    std::vector<Path> cycles;
    for (int i = 0; i < z; ++i) {
        const Path& top = hom.rows[i];
        const Path& bot = hom.rows[a - 1 - i];
        const Path& left = hom.cols[i];
        const Path& right = hom.cols[b - 1 - i];
        // Crop the rows between the two columns; join via column segments.
        auto crop = [&](const Path& row, const Path& c1, const Path& c2) {
            std::set<Vertex> s1(c1.begin(), c1.end()), s2(c2.begin(), c2.end());
            int i1 = -1, i2 = -1;
            for (int k = 0; k < static_cast<int>(row.size()); ++k) {
                if (s1.count(row[k]) && i1 < 0) i1 = k;
                if (s2.count(row[k])) i2 = k;
            }
            if (i1 < 0 || i2 < 0) throw IntegrityError("fold: row misses a column");
            return Path(row.begin() + i1, row.begin() + i2 + 1);
        };
        Path tseg = crop(top, left, right);
        Path bseg = crop(bot, left, right);
        Path rseg(right.begin() + pos_in(right, tseg.back()),
                  right.begin() + pos_in(right, bseg.back()) + 1);
        Path lseg(left.begin() + pos_in(left, tseg.front()),
                  left.begin() + pos_in(left, bseg.front()) + 1);
        Path cyc = tseg;
        cyc.insert(cyc.end(), rseg.begin() + 1, rseg.end());
        Path brev = bseg;
        std::reverse(brev.begin(), brev.end());
        cyc.insert(cyc.end(), brev.begin() + 1, brev.end());
        Path lrev = lseg;
        std::reverse(lrev.begin(), lrev.end());
        cyc.insert(cyc.end(), lrev.begin() + 1, lrev.end() - 1);
        cycles.push_back(simplify_path(cyc));
    }
    std::vector<Path> verts;
    for (int j = z; j < 2 * z; ++j) {
        // Maximal subpath of column j between the top row and row z-1.
        const Path& col = hom.cols[j];
        std::set<Vertex> top_set(hom.rows[0].begin(), hom.rows[0].end());
        std::set<Vertex> deep_set(hom.rows[z - 1].begin(), hom.rows[z - 1].end());
        int i1 = -1, i2 = -1;
        for (int k = 0; k < static_cast<int>(col.size()); ++k) {
            if (top_set.count(col[k]) && i1 < 0) i1 = k;
            if (deep_set.count(col[k])) i2 = k;
        }
        if (i1 < 0 || i2 < 0) throw IntegrityError("fold: column misses a row");
        verts.push_back(Path(col.begin() + i1, col.begin() + i2 + 1));
    }
    WalloidSegmentRole role;
    role.kind = SegKind::Wall;
    role.width = static_cast<int>(verts.size());
    role.cols = verts;
    for (const auto& v : verts) role.top_bd.push_back(v.front());

    SigmaSchema out;
    out.g = s.g;
    out.delta = s.delta;
    out.x = s.x;
    out.y = s.y;
    out.w = assemble_walloid(s.g, r, t, s.w.s, {role}, cycles, geom.row_of);
    return out;
}

// ---------------------------------------------------------------------------
// Single-vortex view: the exceptional face becomes one vortex cell; fences
// around it become the nest of a fresh vortex segment.

SigmaSchema single_vortex_view(const SigmaSchema& s, int t, int snest) {
    if (s.w.num_vortices() > 0)
        throw InputError("single_vortex_view: the walloid already has vortex segments");
    if (t < 4 || snest < 1) throw InputError("single_vortex_view: need t >= 4, s >= 1");
    int T = s.w.t;
    if (T < 2 * t + snest + 2)
        throw RefusalError("single_vortex_view needs walloid order >= " +
                           std::to_string(2 * t + snest + 2));
    int r = s.w.r;
    int drop = (r + T) - (r + t);  // rows removed from the top

    // Nest: the exceptional cycle innermost, then the dropped base cycles.
    // (Fences from the exceptional cycle pinch where flap pendants block
    // brick growth, so successive fences stop being disjoint; the base
    // cycles provide the same concentric grounded structure.)
    std::vector<Path> nest_cycles;
    nest_cycles.push_back(s.w.face_cycle(s.w.exceptional_face));
    for (int d = 1; d <= snest + 1; ++d) nest_cycles.push_back(s.w.base_cycles[d]);

    // The new vortex cell: boundary = nodes of the exceptional cycle's
    // trace, attached into the exceptional face's frame face.
    SigmaDecomposition delta = s.delta;
    Path exc = s.w.face_cycle(s.w.exceptional_face);
    Trace tr = trace_of(exc, true, delta);
    std::vector<int> cstar_nodes = tr.nodes_visited;
    int frame_face = frame_face_of_skeleton_face(delta, s.w, s.w.exceptional_face);
    for (const auto& cell : delta.cells)
        if (cell.face == frame_face)
            throw InputError(
                "single_vortex_view: cells inside the exceptional face are not "
                "supported; attach guts to the vortex cell afterwards");
    std::vector<Vertex> cverts;
    for (int n : cstar_nodes) cverts.push_back(delta.node_vertex[n]);
    int cstar = attach_cell_in_face(delta, frame_face, cstar_nodes,
                                    Graph(cverts, {}));
    (void)cstar;

    // Roles: cropped wall segment (last r+t columns), existing flap
    // segments extended, plus the new vortex segment from the first t
    // wall columns.
    WalloidGeom geom(s.w);
    int wall_idx = -1;
    for (int i = 0; i < static_cast<int>(s.w.segments.size()); ++i)
        if (s.w.segments[i].kind == SegKind::Wall) wall_idx = i;
    const auto& wall = s.w.segments[wall_idx];
    int seg_cols = static_cast<int>(wall.cols.size());
    if (seg_cols < r + t + t)
        throw RefusalError("single_vortex_view: wall segment too narrow");
    int new_top = drop;
    int bottom = r + T - 1;

    std::vector<WalloidSegmentRole> roles;
    {
        WalloidSegmentRole nw;
        nw.kind = SegKind::Wall;
        for (int j = seg_cols - (r + t); j < seg_cols; ++j) {
            nw.cols.push_back(geom.col_walk(wall.cols[j], new_top, bottom));
            nw.top_bd.push_back(geom.col_on_row(wall.cols[j], new_top));
        }
        nw.width = static_cast<int>(nw.cols.size());
        roles.push_back(std::move(nw));
    }
    for (const auto& seg : s.w.segments) {
        if (seg.kind == SegKind::Wall) continue;
        if (seg.kind != SegKind::Flap)
            throw RefusalError(
                "single_vortex_view: handle/crosscap downsizing is not constructed");
        WalloidSegmentRole role;
        role.kind = seg.kind;
        role.arity = seg.arity;
        auto col_of = [&](Vertex v) -> const Path* {
            for (const auto& cp : seg.cols)
                if (std::find(cp.begin(), cp.end(), v) != cp.end()) return &cp;
            return nullptr;
        };
        auto extend = [&](const Path& old, bool both_ends) {
            const Path* c1 = col_of(old.front());
            if (!c1) throw IntegrityError("single_vortex_view: path off columns");
            Path out = geom.col_walk(*c1, new_top, 0);
            if (out.back() != old.front())
                throw IntegrityError("single_vortex_view: extension mismatch");
            out.insert(out.end(), old.begin() + 1, old.end());
            if (both_ends) {
                const Path* c2 = col_of(old.back());
                if (!c2) throw IntegrityError("single_vortex_view: path off columns");
                Path down = geom.col_walk(*c2, 0, new_top);
                if (down.front() != out.back())
                    throw IntegrityError("single_vortex_view: extension mismatch");
                out.insert(out.end(), down.begin() + 1, down.end());
            }
            return out;
        };
        // Keep the innermost t rainbow arcs (the fences intersect the
        // outer ones) and the matching base columns.
        int old_t = static_cast<int>(seg.rainbow.size());
        if (old_t < t) throw RefusalError("single_vortex_view: flap too small");
        int q = seg.arity;
        for (int k = old_t - t; k < old_t; ++k)
            role.rainbow.push_back(extend(seg.rainbow[k], true));
        for (const auto& p : seg.pendants) role.pendants.push_back(extend(p, false));
        role.hyperedge = seg.hyperedge;
        std::vector<int> keep;
        for (int j = old_t - t; j < old_t; ++j) keep.push_back(j);
        for (int j = old_t; j < old_t + q; ++j) keep.push_back(j);
        for (int j = old_t + q; j < old_t + q + t; ++j) keep.push_back(j);
        for (int j : keep) {
            role.cols.push_back(geom.col_walk(seg.cols[j], new_top, bottom));
            role.top_bd.push_back(geom.col_on_row(seg.cols[j], new_top));
        }
        role.width = static_cast<int>(role.cols.size());
        roles.push_back(std::move(role));
    }
    {
        WalloidSegmentRole vx;
        vx.kind = SegKind::Vortex;
        for (int j = 0; j < t; ++j) {
            vx.cols.push_back(geom.col_walk(wall.cols[j], new_top, bottom));
            vx.top_bd.push_back(geom.col_on_row(wall.cols[j], new_top));
        }
        vx.width = t;
        for (const auto& cyc : nest_cycles) vx.nest.push_back(cyc);
        std::set<Vertex> f0(nest_cycles[0].begin(), nest_cycles[0].end());
        for (int j = 0; j < t; ++j) {
            // Minimal subpath from the new top boundary to the innermost
            // fence.
            Path up = geom.col_walk(wall.cols[j], new_top, 0);
            Path radial;
            for (Vertex v : up) {
                radial.push_back(v);
                if (f0.count(v)) break;
            }
            if (!f0.count(radial.back()))
                throw IntegrityError("single_vortex_view: radial misses the inner fence");
            std::reverse(radial.begin(), radial.end());  // from omega inward? keep
            std::reverse(radial.begin(), radial.end());
            vx.radial.push_back(radial);
        }
        vx.hyperedge = cverts;
        roles.push_back(std::move(vx));
    }

    std::vector<Path> cycles(s.w.base_cycles.begin() + new_top, s.w.base_cycles.end());
    SigmaSchema out;
    out.g = s.g;
    out.delta = delta;
    out.x = 1;
    out.y = std::max(s.y, 0);
    out.w = assemble_walloid(s.g, r, t, snest, std::move(roles), std::move(cycles),
                             geom.row_of);
    return out;
}

}  // namespace walloid

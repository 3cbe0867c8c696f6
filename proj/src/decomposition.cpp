#include "walloid/decomposition.hpp"

#include <algorithm>
#include <queue>

namespace walloid {

int SigmaDecomposition::node_of(Vertex v) const {
    auto it = node_index.find(v);
    if (it == node_index.end()) throw InputError("vertex is not a node");
    return it->second;
}

std::vector<int> SigmaDecomposition::simple_cells() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        if (!cells[i].is_vortex()) out.push_back(i);
    return out;
}

std::vector<int> SigmaDecomposition::vortex_cells() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        if (cells[i].is_vortex()) out.push_back(i);
    return out;
}

std::set<Vertex> SigmaDecomposition::ground_vertices() const {
    return std::set<Vertex>(node_vertex.begin(), node_vertex.end());
}

void SigmaDecomposition::freeze() {
    edge_cell_.clear();
    for (int c = 0; c < static_cast<int>(cells.size()); ++c)
        for (const Edge& e : cells[c].subgraph.edges()) {
            auto [it, fresh] = edge_cell_.insert({e, c});
            if (!fresh && it->second != c)
                throw InputError("edge assigned to two cells");
        }
}

int SigmaDecomposition::cell_of_edge(Vertex a, Vertex b) const {
    auto it = edge_cell_.find(make_edge(a, b));
    if (it == edge_cell_.end()) throw InputError("edge belongs to no cell");
    return it->second;
}

DecompReport validate_decomposition(const SigmaDecomposition& d, const Graph& g) {
    DecompReport rep;
    rep.simple_cells = d.simple_cells();
    rep.vortex_cells = d.vortex_cells();
    rep.breadth = static_cast<int>(rep.vortex_cells.size());
    rep.ground = d.ground_vertices();

    // Frame consistency: each cell's registered face is bounded by exactly
    // its arcs; faces host at most one cell.
    rep.frame_consistent = true;
    rep.disjoint_interiors = true;
    std::set<int> used_faces;
    for (const auto& cell : d.cells) {
        if (cell.face < 0 || cell.face >= d.frame.num_faces()) {
            rep.frame_consistent = false;
            continue;
        }
        if (!used_faces.insert(cell.face).second) rep.disjoint_interiors = false;
        std::set<int> walk_edges;
        for (int dart : d.frame.faces()[cell.face].darts) walk_edges.insert(dart >> 1);
        std::set<int> arcs(cell.arcs.begin(), cell.arcs.end());
        if (!cell.arcs.empty() && walk_edges != arcs) rep.frame_consistent = false;
        if (static_cast<int>(cell.arcs.size()) !=
            (cell.arity() <= 1 ? static_cast<int>(cell.nodes.size()) : cell.arity()))
            if (!cell.arcs.empty()) rep.frame_consistent = false;
    }

    // Boundary nodes are vertices of the cell's subgraph.
    rep.boundaries_in_nodes = true;
    for (const auto& cell : d.cells)
        for (int n : cell.nodes)
            if (!cell.subgraph.has_vertex(d.node_vertex[n]))
                rep.boundaries_in_nodes = false;

    // Distinct cells intersect only in shared boundary nodes.
    rep.cells_meet_in_nodes = true;
    for (size_t i = 0; i < d.cells.size(); ++i)
        for (size_t j = i + 1; j < d.cells.size(); ++j) {
            std::set<Vertex> shared_ok;
            for (int n : d.cells[i].nodes)
                for (int m : d.cells[j].nodes)
                    if (n == m) shared_ok.insert(d.node_vertex[n]);
            for (Vertex v : d.cells[i].subgraph.vertices())
                if (d.cells[j].subgraph.has_vertex(v) && !shared_ok.count(v))
                    rep.cells_meet_in_nodes = false;
        }

    // Every edge of G lies in exactly one cell; vertices are covered.
    rep.edges_covered = true;
    std::map<Edge, int> counts;
    for (const auto& cell : d.cells)
        for (const Edge& e : cell.subgraph.edges()) counts[e]++;
    for (const Edge& e : g.edges()) {
        auto it = counts.find(e);
        if (it == counts.end() || it->second != 1) rep.edges_covered = false;
    }
    for (auto& [e, n] : counts)
        if (!g.has_edge(e.first, e.second)) rep.edges_covered = false;
    std::set<Vertex> covered = rep.ground;
    for (const auto& cell : d.cells)
        for (Vertex v : cell.subgraph.vertices()) covered.insert(v);
    for (Vertex v : g.vertices())
        if (!covered.count(v)) rep.edges_covered = false;

    return rep;
}

namespace {

// Maximal per-cell subpaths of q; each must start and end at a node.
struct CellLeg {
    int cell;
    int from_node, to_node;
};

std::vector<CellLeg> decompose_legs(const std::vector<Vertex>& q, bool closed,
                                    const SigmaDecomposition& d) {
    if (q.size() < 2) throw InputError("trace: path too short");
    int m = static_cast<int>(q.size()) - (closed ? 0 : 1);
    std::vector<int> edge_cells;
    for (int i = 0; i < m; ++i) {
        Vertex a = q[i], b = q[(i + 1) % q.size()];
        edge_cells.push_back(d.cell_of_edge(a, b));
    }
    std::vector<CellLeg> legs;
    int start = 0;
    if (closed) {
        // Rotate so a cell change happens at position 0.
        int pivot = -1;
        for (int i = 0; i < m; ++i)
            if (edge_cells[i] != edge_cells[(i + m - 1) % m]) {
                pivot = i;
                break;
            }
        if (pivot < 0) throw InputError("trace: cycle stays in one cell");
        std::rotate(const_cast<std::vector<Vertex>&>(q).begin(),
                    const_cast<std::vector<Vertex>&>(q).begin() + pivot,
                    const_cast<std::vector<Vertex>&>(q).end());
        std::rotate(edge_cells.begin(), edge_cells.begin() + pivot, edge_cells.end());
    }
    while (start < m) {
        int c = edge_cells[start];
        int end = start;
        while (end + 1 < m && edge_cells[end + 1] == c) ++end;
        Vertex va = q[start];
        Vertex vb = q[(end + 1) % q.size()];
        legs.push_back({c, d.node_of(va), d.node_of(vb)});
        start = end + 1;
    }
    return legs;
}

// The detour arc for a leg inside its cell.
int detour_arc(const SigmaDecomposition& d, const CellLeg& leg) {
    const DecompCell& cell = d.cells[leg.cell];
    if (cell.is_vortex()) throw InputError("trace refused: leg crosses a vortex cell");
    if (leg.from_node == leg.to_node)
        throw InputError("trace: leg endpoints coincide");
    if (cell.arity() == 2) {
        auto it = d.tie_breaker.find(leg.cell);
        int pick = (it == d.tie_breaker.end()) ? 0 : it->second;
        return cell.arcs[pick];
    }
    if (cell.arity() == 3) {
        // The component of bd(c) minus the two endpoints that avoids the
        // third node is the single arc joining them.
        for (int a : cell.arcs) {
            int u = d.frame.edge(a).u, v = d.frame.edge(a).v;
            if ((u == leg.from_node && v == leg.to_node) ||
                (v == leg.from_node && u == leg.to_node))
                return a;
        }
        throw IntegrityError("triangle cell misses the direct boundary arc");
    }
    throw InputError("trace: cell arity unsupported");
}

}  // namespace

bool is_grounded(const std::vector<Vertex>& q, bool closed, const SigmaDecomposition& d) {
    int m = static_cast<int>(q.size()) - (closed ? 0 : 1);
    std::set<int> cells_met;
    for (int i = 0; i < m; ++i) {
        int c = d.cell_of_edge(q[i], q[(i + 1) % q.size()]);
        if (d.cells[c].is_vortex()) return false;
        cells_met.insert(c);
    }
    if (closed) return cells_met.size() >= 2;
    return d.node_index.count(q.front()) && d.node_index.count(q.back());
}

Trace trace_of(const std::vector<Vertex>& q, bool closed, const SigmaDecomposition& d) {
    if (!is_grounded(q, closed, d)) throw InputError("trace: walk is not grounded");
    std::vector<Vertex> copy = q;
    auto legs = decompose_legs(copy, closed, d);
    Trace t;
    t.closed = closed;
    for (const auto& leg : legs) {
        int arc = detour_arc(d, leg);
        int dart = 2 * arc;
        if (d.frame.tail(dart) != leg.from_node) dart ^= 1;
        if (d.frame.tail(dart) != leg.from_node || d.frame.head(dart) != leg.to_node)
            throw IntegrityError("detour arc endpoints mismatch");
        t.arc_walk.push_back(dart);
        t.nodes_visited.push_back(leg.from_node);
    }
    return t;
}

std::set<int> nodes_of_cycle(const std::vector<Vertex>& cycle,
                             const SigmaDecomposition& d) {
    Trace t = trace_of(cycle, true, d);
    return std::set<int>(t.nodes_visited.begin(), t.nodes_visited.end());
}

bool is_contractible(const std::vector<Vertex>& cycle, const SigmaDecomposition& d) {
    Trace t = trace_of(cycle, true, d);
    CutResult cut = cut_along(d.frame, t.arc_walk);
    return cut.two_sided && (cut.left_is_disk || cut.right_is_disk);
}

std::optional<DiskRegion> avoiding_disk(const std::vector<Vertex>& cycle,
                                        const std::set<int>& avoid,
                                        const SigmaDecomposition& d) {
    Trace t = trace_of(cycle, true, d);
    for (int n : t.nodes_visited)
        if (avoid.count(n)) throw InputError("avoiding_disk: trace meets an avoided node");
    CutResult cut = cut_along(d.frame, t.arc_walk);
    if (!cut.two_sided) return std::nullopt;
    auto qualifies = [&](const std::set<int>& inner, bool disk) {
        if (!disk) return false;
        for (int n : inner)
            if (avoid.count(n)) return false;
        return true;
    };
    bool left_ok = qualifies(cut.left_inner_vertices, cut.left_is_disk);
    bool right_ok = qualifies(cut.right_inner_vertices, cut.right_is_disk);
    if (left_ok && right_ok && !avoid.empty())
        throw IntegrityError("avoiding disk should be unique");
    if (!left_ok && !right_ok) return std::nullopt;
    DiskRegion r;
    const auto& faces = left_ok ? cut.left_faces : cut.right_faces;
    const auto& inner = left_ok ? cut.left_inner_vertices : cut.right_inner_vertices;
    r.faces.insert(faces.begin(), faces.end());
    r.inner_nodes.insert(inner.begin(), inner.end());
    for (int dart : t.arc_walk) r.boundary_nodes.push_back(d.frame.tail(dart));
    return r;
}

namespace {

// Bounded flood: the faces on one side of the walk, or absent when the
// flood exceeds the cap (meaning that side is large).
std::optional<std::set<int>> flood_side(const CombinatorialMap& m,
                                        const std::set<int>& walk_edges,
                                        const std::vector<std::pair<int, int>>& seeds,
                                        size_t cap) {
    std::set<int> out;
    std::queue<int> q;
    for (auto [e, side] : seeds) {
        int f = m.face_of_slot(e, side);
        if (out.insert(f).second) q.push(f);
    }
    while (!q.empty()) {
        if (out.size() > cap) return std::nullopt;
        int f = q.front();
        q.pop();
        for (int dart : m.faces()[f].darts) {
            int e = dart >> 1;
            if (walk_edges.count(e)) continue;
            for (int side = 0; side < 2; ++side) {
                int g = m.face_of_slot(e, side);
                if (out.insert(g).second) q.push(g);
            }
        }
    }
    return out;
}

}  // namespace

std::optional<DiskRegion> avoiding_disk_local(const std::vector<Vertex>& cycle,
                                              const std::set<int>& avoid,
                                              const SigmaDecomposition& d, size_t cap) {
    Trace t = trace_of(cycle, true, d);
    for (int n : t.nodes_visited)
        if (avoid.count(n)) throw InputError("avoiding_disk: trace meets an avoided node");
    std::set<int> walk_edges;
    for (int dart : t.arc_walk) walk_edges.insert(dart >> 1);
    // Left/right slot seeds as in the full cut, with twist parity.
    std::vector<std::pair<int, int>> left, right;
    int side = 0;
    for (int dart : t.arc_walk) {
        const auto& e = d.frame.edge(dart >> 1);
        int sl = (dart & 1) ? (side ^ 1 ^ (e.twisted ? 1 : 0)) : side;
        left.push_back({dart >> 1, sl});
        right.push_back({dart >> 1, sl ^ 1});
        side ^= e.twisted ? 1 : 0;
    }
    for (const auto& seeds : {left, right}) {
        auto faces = flood_side(d.frame, walk_edges, seeds, cap);
        if (!faces.has_value()) continue;
        // Must be disjoint from the other side's seeds (separating).
        bool clean = true;
        for (auto [e, s2] : (&seeds == &left ? right : left))
            if (faces->count(d.frame.face_of_slot(e, s2))) clean = false;
        if (!clean) return std::nullopt;
        // Inner nodes, avoidance, disk condition.
        DiskRegion r;
        r.faces = *faces;
        std::set<int> walk_nodes(t.nodes_visited.begin(), t.nodes_visited.end());
        std::set<int> inner_edges;
        for (int f : r.faces)
            for (int dart : d.frame.faces()[f].darts)
                if (!walk_edges.count(dart >> 1)) inner_edges.insert(dart >> 1);
        for (int e : inner_edges)
            for (int v : {d.frame.edge(e).u, d.frame.edge(e).v})
                if (!walk_nodes.count(v)) r.inner_nodes.insert(v);
        bool avoided = true;
        for (int v : r.inner_nodes)
            if (avoid.count(v)) avoided = false;
        if (!avoided) continue;
        int chi = static_cast<int>(r.inner_nodes.size() + walk_nodes.size()) -
                  static_cast<int>(inner_edges.size() + walk_edges.size()) +
                  static_cast<int>(r.faces.size());
        if (chi != 1) continue;
        for (int dart : t.arc_walk) r.boundary_nodes.push_back(d.frame.tail(dart));
        return r;
    }
    return std::nullopt;
}

std::set<int> influence(const std::vector<Vertex>& fence_cycle,
                        const std::set<Vertex>& csi_vertices,
                        const SigmaDecomposition& d) {
    std::set<int> avoid;
    for (Vertex v : csi_vertices) {
        auto it = d.node_index.find(v);
        if (it != d.node_index.end()) avoid.insert(it->second);
    }
    std::set<int> out;
    int n = static_cast<int>(fence_cycle.size());
    for (int i = 0; i < n; ++i) {
        int c = d.cell_of_edge(fence_cycle[i], fence_cycle[(i + 1) % n]);
        if (!d.cells[c].is_vortex()) out.insert(c);
    }
    // Small regions resolve with a bounded flood; fall back to the global
    // cut for large fences.
    std::optional<DiskRegion> disk =
        avoiding_disk_local(fence_cycle, avoid, d, 4 * fence_cycle.size() + 64);
    if (!disk.has_value()) disk = avoiding_disk(fence_cycle, avoid, d);
    if (!disk.has_value())
        throw InputError("influence: the avoiding disk of the fence trace is undefined");
    std::map<int, std::vector<int>> cells_by_face;
    for (int c = 0; c < static_cast<int>(d.cells.size()); ++c)
        if (!d.cells[c].is_vortex() && d.cells[c].face >= 0)
            cells_by_face[d.cells[c].face].push_back(c);
    for (int f : disk->faces) {
        auto it = cells_by_face.find(f);
        if (it != cells_by_face.end())
            for (int c : it->second) out.insert(c);
    }
    return out;
}

int attach_cell_in_face(SigmaDecomposition& d, int face, const std::vector<int>& nodes,
                        Graph subgraph) {
    if (nodes.empty()) {
        DecompCell cell;
        cell.subgraph = std::move(subgraph);
        cell.face = face;
        d.cells.push_back(std::move(cell));
        d.freeze();
        return static_cast<int>(d.cells.size()) - 1;
    }
    // Insert the boundary arcs into the rotations at corners lying on
    // `face`, trying each per-node orientation until the new cell bounds a
    // face and previously registered cells still do.
    int k = static_cast<int>(nodes.size());
    for (int n : nodes)
        if (n < 0 || n >= d.frame.num_vertices())
            throw InputError("attach_cell_in_face: unknown node");

    // Corner position on the target face per node.
    std::vector<int> corner(k, -1);
    for (int i = 0; i < k; ++i) {
        int v = nodes[i];
        int deg = static_cast<int>(d.frame.rotation(v).size());
        for (int c2 = 0; c2 < deg; ++c2)
            if (d.frame.face_at_corner(v, c2) == face) corner[i] = c2;
        if (deg == 0) corner[i] = 0;
        if (corner[i] < 0)
            throw InputError("attach_cell_in_face: node has no corner on the face");
    }

    CombinatorialMap saved = d.frame;
    std::vector<std::pair<std::set<int>, int>> old_cells;  // arcs -> expected count
    for (auto& cell : d.cells)
        old_cells.push_back({std::set<int>(cell.arcs.begin(), cell.arcs.end()), 0});

    for (uint32_t combo = 0; combo < (1u << k); ++combo) {
        d.frame = saved;
        std::vector<int> arcs;
        // Arc i joins nodes[i] and nodes[i+1 mod k]; a 1-node cell gets a
        // loop, a 2-node cell two parallel arcs.
        int arc_count = (k == 1) ? 1 : k;
        if (k == 2) arc_count = 2;
        for (int i = 0; i < arc_count; ++i) {
            int a = nodes[i % k], b = nodes[(i + 1) % k];
            arcs.push_back(d.frame.add_edge(a, b, false));
        }
        // Rebuild rotations: insert the new darts at the recorded corners.
        for (int i = 0; i < k; ++i) {
            int v = nodes[i];
            std::vector<int> rot = d.frame.rotation(v);
            // Separate old darts (stable order) from the new ones at v.
            std::vector<int> old_rot, fresh;
            for (int dart : rot) {
                if (dart >= 2 * (d.frame.num_edges() - arc_count)) fresh.push_back(dart);
                else old_rot.push_back(dart);
            }
            if ((combo >> i) & 1) std::reverse(fresh.begin(), fresh.end());
            std::vector<int> result;
            if (old_rot.empty()) {
                result = fresh;
            } else {
                for (int p = 0; p < static_cast<int>(old_rot.size()); ++p) {
                    result.push_back(old_rot[p]);
                    if (p == corner[i])
                        result.insert(result.end(), fresh.begin(), fresh.end());
                }
            }
            d.frame.set_rotation(v, result);
        }
        // Validate: new arcs bound one face exactly; every old cell's face
        // still exists bounded by its arcs.
        auto face_of_arcs = [&](const std::set<int>& want) {
            for (int f = 0; f < d.frame.num_faces(); ++f) {
                std::set<int> fe;
                for (int dart : d.frame.faces()[f].darts) fe.insert(dart >> 1);
                if (fe == want) return f;
            }
            return -1;
        };
        std::set<int> new_arcs(arcs.begin(), arcs.end());
        int new_face = face_of_arcs(new_arcs);
        if (new_face < 0) continue;
        bool old_ok = true;
        for (auto& cell : d.cells) {
            if (cell.arcs.empty()) continue;
            std::set<int> want(cell.arcs.begin(), cell.arcs.end());
            int f = face_of_arcs(want);
            if (f < 0) {
                old_ok = false;
                break;
            }
            cell.face = f;
        }
        if (!old_ok) continue;
        // Genus must not change: the cell sits inside an existing face.
        DecompCell cell;
        cell.nodes = nodes;
        cell.subgraph = std::move(subgraph);
        cell.face = new_face;
        cell.arcs = arcs;
        d.cells.push_back(std::move(cell));
        d.arc_cell.resize(d.frame.num_edges(), -1);
        int cid = static_cast<int>(d.cells.size()) - 1;
        for (int a : arcs) d.arc_cell[a] = cid;
        if (k == 2) d.tie_breaker[cid] = 0;
        d.freeze();
        // Refresh outside face and other cells' face ids happened above.
        if (d.is_rendition && d.outside_face >= 0) {
            // Re-identify the outside face by its boundary arcs.
            std::set<int> bd;
            for (int e = 0; e < static_cast<int>(d.arc_cell.size()); ++e)
                if (d.arc_cell[e] == -1) bd.insert(e);
            for (int f = 0; f < d.frame.num_faces(); ++f) {
                std::set<int> fe;
                for (int dart : d.frame.faces()[f].darts) fe.insert(dart >> 1);
                if (fe == bd) d.outside_face = f;
            }
        }
        return cid;
    }
    d.frame = saved;
    throw InputError("attach_cell_in_face: no consistent embedding found");
}

}  // namespace walloid

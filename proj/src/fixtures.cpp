#include "walloid/fixtures.hpp"

#include <algorithm>

namespace walloid {

namespace {

// Rotation construction with (major, minor) keys per dart.
struct FrameBuilder {
    CombinatorialMap map;
    std::vector<std::vector<std::pair<std::pair<int, int>, int>>> slots;

    int add_vertex() {
        slots.emplace_back();
        return map.add_vertex();
    }
    int add_edge(int u, int v, std::pair<int, int> key_u, std::pair<int, int> key_v,
                 bool twisted = false) {
        int e = map.add_edge(u, v, twisted);
        slots[u].push_back({key_u, 2 * e});
        slots[v].push_back({key_v, 2 * e + 1});
        return e;
    }
    void finish() {
        for (int v = 0; v < map.num_vertices(); ++v) {
            auto order = slots[v];
            std::stable_sort(order.begin(), order.end(),
                             [](auto& a, auto& b) { return a.first < b.first; });
            std::vector<int> rot;
            for (auto& [k, dart] : order) rot.push_back(dart);
            map.set_rotation(v, rot);
        }
    }
};

Graph path_edge_graph(const Path& p) {
    std::vector<Vertex> vs(p.begin(), p.end());
    std::vector<Edge> es;
    for (size_t i = 0; i + 1 < p.size(); ++i) es.push_back(make_edge(p[i], p[i + 1]));
    return Graph(vs, es);
}

}  // namespace

CanonicalDecomp canonical_decomposition(const WalloidHandle& w,
                                        const std::map<int, GutSpec>& flap_guts,
                                        const std::map<int, GutSpec>& vortex_guts) {
    CanonicalDecomp out;
    SigmaDecomposition& d = out.delta;

    // Nodes: skeleton vertices in skeleton order, then flap z vertices.
    FrameBuilder fb;
    for (Vertex v : w.skel_vertex) {
        fb.add_vertex();
        d.node_vertex.push_back(v);
    }
    std::map<Vertex, int> node_of = w.skel_index;
    int extra_base = static_cast<int>(d.node_vertex.size());
    for (const auto& seg : w.segments)
        if (seg.kind == SegKind::Flap)
            for (const auto& pend : seg.pendants) {
                Vertex z = pend.back();
                node_of[z] = extra_base++;
                fb.add_vertex();
                d.node_vertex.push_back(z);
            }
    d.node_index = node_of;

    struct PendingCell {
        std::vector<int> nodes;
        Graph subgraph;
        std::vector<int> arcs;
    };
    std::vector<PendingCell> pending;

    // Doubled skeleton edges: each edge becomes a 2-node cell whose two
    // arcs sit at (2*pos, 0) and (2*pos, 1) in both rotations.
    std::vector<std::vector<int>> skel_pos(w.skel.num_vertices());
    for (int v = 0; v < w.skel.num_vertices(); ++v) {
        skel_pos[v].assign(2 * w.skel.num_edges(), -1);
        const auto& rot = w.skel.rotation(v);
        for (int i = 0; i < static_cast<int>(rot.size()); ++i) skel_pos[v][rot[i]] = i;
    }
    for (int e = 0; e < w.skel.num_edges(); ++e) {
        const auto& me = w.skel.edge(e);
        int pu = skel_pos[me.u][2 * e];
        int pv = skel_pos[me.v][2 * e + 1];
        // Polygon pattern: outgoing arc before incoming at each endpoint,
        // so the 2-gon closes: (a0, a1) at u and (a1, a0) at v. A twisted
        // pair closes with the same order at both ends instead.
        int swap = me.twisted ? 0 : 1;
        int a0 = fb.add_edge(me.u, me.v, {2 * pu, 0}, {2 * pv, swap}, me.twisted);
        int a1 = fb.add_edge(me.u, me.v, {2 * pu, 1}, {2 * pv, 1 - swap}, me.twisted);
        Vertex hu = w.skel_vertex[me.u], hv = w.skel_vertex[me.v];
        PendingCell cell;
        cell.nodes = {me.u, me.v};
        cell.subgraph = Graph({hu, hv}, {make_edge(hu, hv)});
        cell.arcs = {a0, a1};
        pending.push_back(std::move(cell));
        out.cell_of_skel_edge[make_edge(hu, hv)] = static_cast<int>(pending.size()) - 1;
    }

    // Flap pendants and hyperedge cells; vortex cells.
    std::vector<Vertex> gverts = w.host.vertices();
    std::vector<Edge> gedges = w.host.edges();
    for (int si = 0; si < static_cast<int>(w.segments.size()); ++si) {
        const auto& seg = w.segments[si];
        if (seg.kind == SegKind::Flap) {
            int q = seg.arity;
            std::vector<int> znodes;
            for (int j = 0; j < q; ++j) {
                const Path& pend = seg.pendants[j];
                int tn = node_of.at(pend.front());
                int zn = node_of.at(pend.back());
                znodes.push_back(zn);
                // Pendant pair points north out of the top boundary vertex:
                // major key = odd slot between the east (0) and west rows.
                // The t_i vertices have skeleton degree 2 (row edges only).
                int a0 = fb.add_edge(tn, zn, {1, 0}, {6, 1});
                int a1 = fb.add_edge(tn, zn, {1, 1}, {6, 0});
                PendingCell cell;
                cell.nodes = {tn, zn};
                cell.subgraph = path_edge_graph(pend);
                cell.arcs = {a0, a1};
                pending.push_back(std::move(cell));
            }
            // Hyperedge cell on the z nodes.
            PendingCell cell;
            cell.nodes = znodes;
            std::vector<Vertex> verts;
            for (int zn : znodes) verts.push_back(d.node_vertex[zn]);
            std::vector<Edge> es;
            auto it = flap_guts.find(si);
            if (it != flap_guts.end()) {
                verts.insert(verts.end(), it->second.extra_vertices.begin(),
                             it->second.extra_vertices.end());
                es = it->second.edges;
                gverts.insert(gverts.end(), it->second.extra_vertices.begin(),
                              it->second.extra_vertices.end());
                for (const Edge& e : es) gedges.push_back(e);
            }
            cell.subgraph = Graph(verts, es);
            int na = (q == 1) ? 1 : (q == 2 ? 2 : q);
            for (int i = 0; i < na; ++i) {
                int a = cell.nodes[i % q], b = cell.nodes[(i + 1) % q];
                // Uniform per-node pattern: outgoing arc before incoming.
                cell.arcs.push_back(fb.add_edge(a, b, {0, 0}, {0, 1}));
            }
            pending.push_back(std::move(cell));
            out.flap_cell[si] = static_cast<int>(pending.size()) - 1;
        } else if (seg.kind == SegKind::Vortex) {
            const Path& c0 = seg.nest[0];
            PendingCell cell;
            std::vector<Vertex> verts;
            for (Vertex v : c0) {
                cell.nodes.push_back(node_of.at(v));
                verts.push_back(v);
            }
            std::vector<Edge> es;
            auto it = vortex_guts.find(si);
            if (it != vortex_guts.end()) {
                verts.insert(verts.end(), it->second.extra_vertices.begin(),
                             it->second.extra_vertices.end());
                es = it->second.edges;
                gverts.insert(gverts.end(), it->second.extra_vertices.begin(),
                              it->second.extra_vertices.end());
                for (const Edge& e : es) gedges.push_back(e);
            }
            cell.subgraph = Graph(verts, es);
            int t = static_cast<int>(c0.size());
            for (int i = 0; i < t; ++i) {
                // The inner face of C_0 lies on the north side: the nest
                // node rotation is (E, W, S), so north keys sit between
                // east (0) and west (2). Outgoing before incoming.
                cell.arcs.push_back(
                    fb.add_edge(cell.nodes[i], cell.nodes[(i + 1) % t], {1, 0}, {1, 1}));
            }
            pending.push_back(std::move(cell));
            out.vortex_cell[si] = static_cast<int>(pending.size()) - 1;
        }
    }

    fb.finish();
    d.frame = std::move(fb.map);

    // Locate each cell's face (bounded exactly by its arcs).
    std::map<std::set<int>, int> face_by_arcs;
    for (int f = 0; f < d.frame.num_faces(); ++f) {
        std::set<int> fe;
        for (int dart : d.frame.faces()[f].darts) fe.insert(dart >> 1);
        face_by_arcs[fe] = f;
    }
    d.arc_cell.assign(d.frame.num_edges(), -1);
    for (auto& pc : pending) {
        DecompCell cell;
        cell.nodes = pc.nodes;
        cell.subgraph = pc.subgraph;
        cell.arcs = pc.arcs;
        auto it = face_by_arcs.find(std::set<int>(pc.arcs.begin(), pc.arcs.end()));
        if (it == face_by_arcs.end())
            throw IntegrityError("canonical decomposition: cell arcs bound no face");
        cell.face = it->second;
        int cid = static_cast<int>(d.cells.size());
        for (int a : pc.arcs) d.arc_cell[a] = cid;
        d.cells.push_back(std::move(cell));
    }
    // Tie-breakers for 2-node cells: the arc whose far side has the
    // smaller face id.
    for (int c = 0; c < static_cast<int>(d.cells.size()); ++c) {
        if (d.cells[c].arity() != 2) continue;
        int best = 0, best_face = INT32_MAX;
        for (int i = 0; i < 2; ++i) {
            int a = d.cells[c].arcs[i];
            for (int side = 0; side < 2; ++side) {
                int f = d.frame.face_of_slot(a, side);
                if (f != d.cells[c].face && f < best_face) {
                    best_face = f;
                    best = i;
                }
            }
        }
        d.tie_breaker[c] = best;
    }
    out.g = Graph(gverts, gedges);
    d.freeze();
    return out;
}

int frame_face_of_skeleton_face(const SigmaDecomposition& d, const WalloidHandle& w,
                                int skel_face) {
    // Underlying skeleton-edge multiset of a frame face must match the
    // skeleton face's boundary walk; frame arcs map to skeleton edges by
    // host endpoints.
    std::multiset<Edge> want;
    const auto& darts = w.skel.faces()[skel_face].darts;
    for (int dart : darts) {
        const auto& me = w.skel.edge(dart >> 1);
        want.insert(make_edge(w.skel_vertex[me.u], w.skel_vertex[me.v]));
    }
    for (int f = 0; f < d.frame.num_faces(); ++f) {
        const auto& fd = d.frame.faces()[f].darts;
        if (fd.size() != darts.size()) continue;
        std::multiset<Edge> got;
        bool clean = true;
        for (int dart : fd) {
            int e = dart >> 1;
            const auto& me = d.frame.edge(e);
            got.insert(make_edge(d.node_vertex[me.u], d.node_vertex[me.v]));
        }
        if (clean && got == want) {
            // Must not be a cell interior (2-gons share the multiset when
            // the face has two edges).
            bool is_cell_face = false;
            for (const auto& cell : d.cells)
                if (cell.face == f) is_cell_face = true;
            if (!is_cell_face) return f;
        }
    }
    throw InputError("no frame face matches the skeleton face");
}

int attach_brick_gut(CanonicalDecomp& cd, const WalloidHandle& w, int brick_face,
                     Vertex fresh_id) {
    if (cd.g.has_vertex(fresh_id)) throw InputError("attach_brick_gut: id in use");
    // Pick three branch vertices of the brick.
    std::vector<int> nodes;
    for (int mv : w.skel.faces()[brick_face].vertices) {
        if (static_cast<int>(w.skel.rotation(mv).size()) == 3) {
            Vertex hv = w.skel_vertex[mv];
            int n = cd.delta.node_of(hv);
            if (std::find(nodes.begin(), nodes.end(), n) == nodes.end())
                nodes.push_back(n);
        }
        if (nodes.size() == 3) break;
    }
    if (nodes.size() < 3) throw InputError("brick has too few branch vertices");
    int frame_face = frame_face_of_skeleton_face(cd.delta, w, brick_face);
    std::vector<Vertex> verts{fresh_id};
    std::vector<Edge> es;
    for (int n : nodes) {
        verts.push_back(cd.delta.node_vertex[n]);
        es.push_back(make_edge(fresh_id, cd.delta.node_vertex[n]));
    }
    int cid = attach_cell_in_face(cd.delta, frame_face, nodes, Graph(verts, es));
    std::vector<Vertex> gv = cd.g.vertices();
    gv.push_back(fresh_id);
    std::vector<Edge> ge = cd.g.edges();
    ge.insert(ge.end(), es.begin(), es.end());
    cd.g = Graph(gv, ge);
    return cid;
}

CylinderFixture cylinder_rendition(int rings, int spokes, int center_arity) {
    if (rings < 1 || spokes < 3) throw InputError("cylinder fixture too small");
    if (center_arity < 1 || center_arity > spokes)
        throw InputError("cylinder fixture: bad center arity");
    CylinderFixture out;
    auto id = [&](int k, int i) { return static_cast<Vertex>(k * spokes + i + 1); };
    std::vector<Vertex> vs;
    std::vector<Edge> es;
    for (int k = 0; k < rings; ++k) {
        std::vector<Vertex> ring;
        for (int i = 0; i < spokes; ++i) {
            vs.push_back(id(k, i));
            ring.push_back(id(k, i));
            es.push_back(make_edge(id(k, i), id(k, (i + 1) % spokes)));
            if (k + 1 < rings) es.push_back(make_edge(id(k, i), id(k + 1, i)));
        }
        out.rings.push_back(ring);
    }
    out.g = Graph(vs, es);
    for (int i = 0; i < spokes; ++i) out.omega.push_back(id(0, i));

    SigmaDecomposition& d = out.rho;
    d.is_rendition = true;
    FrameBuilder fb;
    for (Vertex v : vs) {
        d.node_vertex.push_back(v);
        d.node_index[v] = fb.add_vertex();
    }
    struct PendingCell {
        std::vector<int> nodes;
        Graph subgraph;
        std::vector<int> arcs;
    };
    std::vector<PendingCell> pending;
    // Directions at node (k, i): 0 = ring next (east), 2 = ring prev
    // (west), 1 = inward (north), 3 = outward/boundary (south).
    auto add_edge_cell = [&](Vertex a, Vertex b, std::pair<int, int> ka,
                             std::pair<int, int> kb) {
        int na = d.node_index.at(a), nb = d.node_index.at(b);
        int a0 = fb.add_edge(na, nb, {ka.first, 2 * ka.second},
                             {kb.first, 2 * kb.second + 1});
        int a1 = fb.add_edge(na, nb, {ka.first, 2 * ka.second + 1},
                             {kb.first, 2 * kb.second});
        PendingCell cell;
        cell.nodes = {na, nb};
        cell.subgraph = Graph({a, b}, {make_edge(a, b)});
        cell.arcs = {a0, a1};
        pending.push_back(std::move(cell));
    };
    for (int k = 0; k < rings; ++k)
        for (int i = 0; i < spokes; ++i) {
            add_edge_cell(id(k, i), id(k, (i + 1) % spokes), {0, 0}, {2, 0});
            if (k + 1 < rings) add_edge_cell(id(k, i), id(k + 1, i), {1, 0}, {3, 0});
        }
    // Disk boundary arcs along ring 0, south side; the outside face lies
    // beyond them, so the polygon is inserted with the reverse pattern.
    std::vector<int> bd_arcs;
    for (int i = 0; i < spokes; ++i) {
        int na = d.node_index.at(id(0, i));
        int nb = d.node_index.at(id(0, (i + 1) % spokes));
        bd_arcs.push_back(fb.add_edge(na, nb, {4, 1}, {4, 0}));
    }
    // Center cell on consecutive innermost-ring vertices, drawn inside.
    {
        PendingCell cell;
        std::vector<Vertex> verts;
        for (int i = 0; i < center_arity; ++i) {
            cell.nodes.push_back(d.node_index.at(id(rings - 1, i)));
            verts.push_back(id(rings - 1, i));
        }
        cell.subgraph = Graph(verts, {});
        int na = (center_arity == 1) ? 1 : (center_arity == 2 ? 2 : center_arity);
        for (int i = 0; i < na; ++i) {
            int a = cell.nodes[i % center_arity];
            int b = cell.nodes[(i + 1) % center_arity];
            cell.arcs.push_back(fb.add_edge(a, b, {1, 2}, {1, 3}));
        }
        pending.push_back(std::move(cell));
    }
    fb.finish();
    d.frame = std::move(fb.map);

    std::map<std::set<int>, int> face_by_arcs;
    for (int f = 0; f < d.frame.num_faces(); ++f) {
        std::set<int> fe;
        for (int dart : d.frame.faces()[f].darts) fe.insert(dart >> 1);
        face_by_arcs[fe] = f;
    }
    d.arc_cell.assign(d.frame.num_edges(), -1);
    for (auto& pc : pending) {
        DecompCell cell;
        cell.nodes = pc.nodes;
        cell.subgraph = pc.subgraph;
        cell.arcs = pc.arcs;
        auto it = face_by_arcs.find(std::set<int>(pc.arcs.begin(), pc.arcs.end()));
        if (it == face_by_arcs.end())
            throw IntegrityError("cylinder fixture: cell arcs bound no face");
        cell.face = it->second;
        int cid = static_cast<int>(d.cells.size());
        for (int a : pc.arcs) d.arc_cell[a] = cid;
        d.cells.push_back(std::move(cell));
        if (cell.nodes.size() == static_cast<size_t>(center_arity) &&
            &pc == &pending.back())
            out.center_cell = cid;
    }
    out.center_cell = static_cast<int>(d.cells.size()) - 1;
    {
        auto it = face_by_arcs.find(std::set<int>(bd_arcs.begin(), bd_arcs.end()));
        if (it == face_by_arcs.end())
            throw IntegrityError("cylinder fixture: outside face not found");
        d.outside_face = it->second;
    }
    for (Vertex v : out.omega) d.omega_nodes.push_back(d.node_index.at(v));
    for (int c = 0; c < static_cast<int>(d.cells.size()); ++c)
        if (d.cells[c].arity() == 2) d.tie_breaker[c] = 0;
    d.freeze();
    return out;
}

}  // namespace walloid

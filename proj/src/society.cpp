#include "walloid/society.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace walloid {

void Society::check() const {
    std::set<Vertex> seen;
    for (Vertex v : omega) {
        if (!g.has_vertex(v)) throw InputError("omega vertex not in the graph");
        if (!seen.insert(v).second) throw InputError("omega repeats a vertex");
    }
}

int Society::omega_pos(Vertex v) const {
    for (int i = 0; i < static_cast<int>(omega.size()); ++i)
        if (omega[i] == v) return i;
    return -1;
}

std::vector<int> OmegaSegment::positions(int n) const {
    std::vector<int> out;
    int i = first;
    while (true) {
        out.push_back(i);
        if (i == last) break;
        i = (i + 1) % n;
        if (static_cast<int>(out.size()) > n) throw InputError("bad segment");
    }
    return out;
}

bool OmegaSegment::contains(int pos, int n) const {
    int i = first;
    while (true) {
        if (i == pos) return true;
        if (i == last) return false;
        i = (i + 1) % n;
    }
}

// ---------------------------------------------------------------------------
// Crosses.

namespace {

bool two_disjoint_paths(const Graph& g, Vertex a, Vertex c, Vertex b, Vertex d,
                        const std::set<Vertex>& omega) {
    // Paths internally avoid omega; search the first path by DFS, check
    // the second by BFS in the remainder.
    std::vector<Vertex> stack{a};
    std::set<Vertex> used{a};
    std::function<bool()> dfs = [&]() -> bool {
        Vertex cur = stack.back();
        if (cur == c) {
            std::set<Vertex> blocked(used.begin(), used.end());
            for (Vertex w : omega)
                if (w != b && w != d) blocked.insert(w);
            if (blocked.count(b) || blocked.count(d)) return false;
            std::queue<Vertex> q;
            q.push(b);
            std::set<Vertex> seen{b};
            while (!q.empty()) {
                Vertex x = q.front();
                q.pop();
                if (x == d) return true;
                for (Vertex y : g.neighbors(x)) {
                    if (seen.count(y) || blocked.count(y)) continue;
                    if (y != d && omega.count(y)) continue;
                    seen.insert(y);
                    q.push(y);
                }
            }
            return false;
        }
        for (Vertex w : g.neighbors(cur)) {
            if (used.count(w)) continue;
            if (w != c && omega.count(w)) continue;
            used.insert(w);
            stack.push_back(w);
            if (dfs()) return true;
            stack.pop_back();
            used.erase(w);
        }
        return false;
    };
    return dfs();
}

std::optional<Path> one_path(const Graph& g, Vertex a, Vertex c,
                             const std::set<Vertex>& forbidden_internal) {
    std::map<Vertex, Vertex> parent;
    std::queue<Vertex> q;
    q.push(a);
    parent[a] = a;
    while (!q.empty()) {
        Vertex x = q.front();
        q.pop();
        if (x == c) {
            Path p;
            for (Vertex v = c;; v = parent[v]) {
                p.push_back(v);
                if (v == a) break;
            }
            std::reverse(p.begin(), p.end());
            return p;
        }
        for (Vertex y : g.neighbors(x)) {
            if (parent.count(y)) continue;
            if (y != c && forbidden_internal.count(y)) continue;
            parent[y] = x;
            q.push(y);
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::pair<Path, Path>> find_cross(const Society& s) {
    s.check();
    int m = static_cast<int>(s.omega.size());
    std::set<Vertex> omega_set(s.omega.begin(), s.omega.end());
    for (int p1 = 0; p1 < m; ++p1)
        for (int p2 = p1 + 1; p2 < m; ++p2)
            for (int p3 = p2 + 1; p3 < m; ++p3)
                for (int p4 = p3 + 1; p4 < m; ++p4) {
                    Vertex a = s.omega[p1], b = s.omega[p2];
                    Vertex c = s.omega[p3], d = s.omega[p4];
                    if (!two_disjoint_paths(s.g, a, c, b, d, omega_set)) continue;
                    // Reconstruct a witness pair.
                    std::set<Vertex> forb = omega_set;
                    std::function<std::optional<std::pair<Path, Path>>(Path&, std::set<Vertex>&)>
                        extend = [&](Path& cur, std::set<Vertex>& used)
                        -> std::optional<std::pair<Path, Path>> {
                        if (cur.back() == c) {
                            std::set<Vertex> blocked = used;
                            for (Vertex w : s.omega)
                                if (w != b && w != d) blocked.insert(w);
                            blocked.erase(b);
                            blocked.erase(d);
                            auto other = one_path(s.g, b, d, blocked);
                            if (other.has_value())
                                return std::make_pair(cur, *other);
                            return std::nullopt;
                        }
                        for (Vertex w : s.g.neighbors(cur.back())) {
                            if (used.count(w)) continue;
                            if (w != c && omega_set.count(w)) continue;
                            used.insert(w);
                            cur.push_back(w);
                            auto r = extend(cur, used);
                            if (r.has_value()) return r;
                            cur.pop_back();
                            used.erase(w);
                        }
                        return std::nullopt;
                    };
                    Path cur{a};
                    std::set<Vertex> used{a};
                    auto r = extend(cur, used);
                    if (r.has_value()) return r;
                }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Planar embedding of biconnected graphs (face list construction).

namespace {
using FaceWalk = std::vector<Vertex>;
}  // namespace

std::optional<std::vector<FaceWalk>> planar_embed_biconnected(const Graph& g) {
    if (g.num_vertices() < 3) return std::nullopt;
    if (g.num_edges() > 3 * g.num_vertices() - 6) return std::nullopt;

    // Initial cycle: DFS back edge to an ancestor on the recursion stack.
    Path cycle;
    {
        std::map<Vertex, Vertex> parent;
        std::set<Vertex> on_stack, visited;
        std::function<bool(Vertex)> dfs = [&](Vertex v) -> bool {
            visited.insert(v);
            on_stack.insert(v);
            for (Vertex w : g.neighbors(v)) {
                if (w == parent[v]) continue;
                if (on_stack.count(w)) {
                    for (Vertex x = v;; x = parent[x]) {
                        cycle.push_back(x);
                        if (x == w) break;
                    }
                    return true;
                }
                if (!visited.count(w)) {
                    parent[w] = v;
                    if (dfs(w)) return true;
                }
            }
            on_stack.erase(v);
            return false;
        };
        Vertex root = g.vertices()[0];
        parent[root] = root;
        if (!dfs(root)) return std::nullopt;  // forest
    }

    std::set<Vertex> hv(cycle.begin(), cycle.end());
    std::set<Edge> he;
    for (size_t i = 0; i < cycle.size(); ++i)
        he.insert(make_edge(cycle[i], cycle[(i + 1) % cycle.size()]));
    std::vector<FaceWalk> faces;
    faces.push_back(cycle);
    FaceWalk rev = cycle;
    std::reverse(rev.begin(), rev.end());
    faces.push_back(rev);

    auto embedded_all = [&]() { return static_cast<int>(he.size()) == g.num_edges(); };

    while (!embedded_all()) {
        // Fragments: chords and bridge components.
        struct Fragment {
            std::set<Vertex> inside;       // vertices outside H
            std::set<Vertex> attachments;  // vertices on H
            Edge chord{0, 0};
            bool is_chord = false;
        };
        std::vector<Fragment> fragments;
        for (const Edge& e : g.edges()) {
            if (he.count(e)) continue;
            if (hv.count(e.first) && hv.count(e.second)) {
                Fragment f;
                f.is_chord = true;
                f.chord = e;
                f.attachments = {e.first, e.second};
                fragments.push_back(f);
            }
        }
        std::set<Vertex> seen;
        for (Vertex v : g.vertices()) {
            if (hv.count(v) || seen.count(v)) continue;
            Fragment f;
            std::queue<Vertex> q;
            q.push(v);
            seen.insert(v);
            while (!q.empty()) {
                Vertex x = q.front();
                q.pop();
                f.inside.insert(x);
                for (Vertex y : g.neighbors(x)) {
                    if (hv.count(y)) f.attachments.insert(y);
                    else if (!seen.count(y)) {
                        seen.insert(y);
                        q.push(y);
                    }
                }
            }
            fragments.push_back(f);
        }
        if (fragments.empty()) throw IntegrityError("planarity: no fragments left");

        // Admissible faces per fragment.
        auto admissible = [&](const Fragment& f) {
            std::vector<int> out;
            for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
                std::set<Vertex> fv(faces[i].begin(), faces[i].end());
                bool all = true;
                for (Vertex a : f.attachments)
                    if (!fv.count(a)) all = false;
                if (all) out.push_back(i);
            }
            return out;
        };
        int pick = -1;
        std::vector<int> pick_adm;
        for (int i = 0; i < static_cast<int>(fragments.size()); ++i) {
            auto adm = admissible(fragments[i]);
            if (adm.empty()) return std::nullopt;  // non-planar
            if (pick < 0 || adm.size() < pick_adm.size()) {
                pick = i;
                pick_adm = adm;
            }
            if (pick_adm.size() == 1) break;
        }
        const Fragment& f = fragments[pick];
        if (f.attachments.size() < 2)
            throw IntegrityError("planarity: fragment with fewer than two attachments");

        // Alpha path through the fragment between two attachments.
        Path alpha;
        if (f.is_chord) {
            alpha = {f.chord.first, f.chord.second};
        } else {
            Vertex a = *f.attachments.begin();
            // BFS from a through inside vertices to another attachment.
            std::map<Vertex, Vertex> par;
            std::queue<Vertex> q;
            for (Vertex x : g.neighbors(a))
                if (f.inside.count(x) && !par.count(x)) {
                    par[x] = a;
                    q.push(x);
                }
            Vertex hit = -1;
            while (!q.empty() && hit < 0) {
                Vertex x = q.front();
                q.pop();
                for (Vertex y : g.neighbors(x)) {
                    if (y != a && f.attachments.count(y)) {
                        par[y] = x;
                        hit = y;
                        break;
                    }
                    if (f.inside.count(y) && !par.count(y)) {
                        par[y] = x;
                        q.push(y);
                    }
                }
            }
            if (hit < 0) throw IntegrityError("planarity: fragment path missing");
            for (Vertex v = hit;; v = par[v]) {
                alpha.push_back(v);
                if (v == a) break;
            }
            std::reverse(alpha.begin(), alpha.end());
        }

        // Embed alpha into the chosen face.
        int fi = pick_adm[0];
        FaceWalk face = faces[fi];
        int ia = -1, ib = -1;
        for (int i = 0; i < static_cast<int>(face.size()); ++i) {
            if (face[i] == alpha.front() && ia < 0) ia = i;
            if (face[i] == alpha.back() && ib < 0 && face[i] != alpha.front()) ib = i;
        }
        if (ia < 0 || ib < 0) throw IntegrityError("planarity: attachments left the face");
        // Face split: walk a..b plus reversed alpha; walk b..a plus alpha.
        FaceWalk f1, f2;
        for (int i = ia; i != ib; i = (i + 1) % face.size()) f1.push_back(face[i]);
        f1.push_back(face[ib]);
        for (int i = static_cast<int>(alpha.size()) - 2; i >= 1; --i)
            f1.push_back(alpha[i]);
        for (int i = ib; i != ia; i = (i + 1) % face.size()) f2.push_back(face[i]);
        f2.push_back(face[ia]);
        for (int i = 1; i + 1 < static_cast<int>(alpha.size()); ++i) f2.push_back(alpha[i]);
        faces[fi] = f1;
        faces.push_back(f2);
        for (size_t i = 0; i + 1 < alpha.size(); ++i)
            he.insert(make_edge(alpha[i], alpha[i + 1]));
        for (Vertex v : alpha) hv.insert(v);
    }
    // Euler check.
    if (static_cast<int>(faces.size()) != g.num_edges() - g.num_vertices() + 2)
        throw IntegrityError("planarity: face count fails Euler");
    return faces;
}

namespace {

// Rotation system from a face list (consistent orientation).
std::map<Vertex, std::vector<Vertex>> rotations_from_faces(
    const Graph& g, const std::vector<FaceWalk>& faces) {
    std::map<Vertex, std::map<Vertex, Vertex>> next_at;  // v: in-nbr -> out-nbr
    for (const auto& face : faces) {
        int n = static_cast<int>(face.size());
        for (int i = 0; i < n; ++i) {
            Vertex prev = face[(i - 1 + n) % n];
            Vertex v = face[i];
            Vertex nxt = face[(i + 1) % n];
            next_at[v][prev] = nxt;
        }
    }
    std::map<Vertex, std::vector<Vertex>> rot;
    for (Vertex v : g.vertices()) {
        const auto& nb = g.neighbors(v);
        if (nb.empty()) continue;
        std::vector<Vertex> order;
        Vertex cur = nb[0];
        for (size_t i = 0; i < nb.size(); ++i) {
            order.push_back(cur);
            cur = next_at[v][cur];
        }
        std::set<Vertex> chk(order.begin(), order.end());
        if (chk.size() != nb.size())
            throw IntegrityError("rotation from faces incomplete");
        rot[v] = order;
    }
    return rot;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rendition synthesis.

namespace {

struct Piece {
    std::set<Vertex> members;      // real vertices plus nested virtuals
    std::vector<Vertex> attach;    // real attachments, at most 3
};

SigmaDecomposition trivial_rendition(const Society& s) {
    SigmaDecomposition d;
    d.is_rendition = true;
    int m = static_cast<int>(s.omega.size());
    for (int i = 0; i < m; ++i) {
        d.node_index[s.omega[i]] = i;
        d.node_vertex.push_back(s.omega[i]);
        d.frame.add_vertex();
        d.omega_nodes.push_back(i);
    }
    // Inner polygon = cell boundary, outer polygon = disk boundary.
    DecompCell cell;
    for (int i = 0; i < m; ++i) cell.nodes.push_back(i);
    cell.subgraph = s.g;
    int na = (m == 1) ? 1 : (m == 2 ? 2 : m);
    std::vector<int> bd;
    std::vector<std::vector<int>> rot(m);
    for (int i = 0; i < na; ++i) {
        int a = i % m, b = (i + 1) % m;
        int e = d.frame.add_edge(a, b);
        cell.arcs.push_back(e);
    }
    for (int i = 0; i < na; ++i) {
        int a = i % m, b = (i + 1) % m;
        int e = d.frame.add_edge(a, b);
        bd.push_back(e);
    }
    // Rotation per node: cell-out, cell-in, bd-in, bd-out.
    for (int v = 0; v < m; ++v) {
        std::vector<int> darts;
        auto dart_at = [&](int e, int node) {
            return d.frame.edge(e).u == node ? 2 * e : 2 * e + 1;
        };
        if (m == 1) {
            darts = {2 * cell.arcs[0], 2 * cell.arcs[0] + 1, 2 * bd[0] + 1, 2 * bd[0]};
        } else if (m == 2) {
            darts = {dart_at(cell.arcs[v], v), dart_at(cell.arcs[1 - v], v),
                     dart_at(bd[1 - v], v), dart_at(bd[v], v)};
        } else {
            int out = cell.arcs[v];
            int in = cell.arcs[(v - 1 + m) % m];
            int bout = bd[v];
            int bin = bd[(v - 1 + m) % m];
            darts = {2 * out, 2 * in + 1, 2 * bin + 1, 2 * bout};
        }
        d.frame.set_rotation(v, darts);
    }
    // Identify faces.
    auto face_of = [&](const std::vector<int>& arcs) {
        std::set<int> want(arcs.begin(), arcs.end());
        for (int f = 0; f < d.frame.num_faces(); ++f) {
            std::set<int> fe;
            for (int dd : d.frame.faces()[f].darts) fe.insert(dd >> 1);
            if (fe == want) return f;
        }
        return -1;
    };
    cell.face = face_of(cell.arcs);
    d.outside_face = face_of(bd);
    if (cell.face < 0 || d.outside_face < 0) {
        // Orientation flip of the boundary polygon.
        for (int v = 0; v < m; ++v) {
            auto rot2 = d.frame.rotation(v);
            std::swap(rot2[2], rot2[3]);
            d.frame.set_rotation(v, rot2);
        }
        cell.face = face_of(cell.arcs);
        d.outside_face = face_of(bd);
        if (cell.face < 0 || d.outside_face < 0)
            throw IntegrityError("trivial rendition failed to close");
    }
    d.arc_cell.assign(d.frame.num_edges(), -1);
    for (int a : cell.arcs) d.arc_cell[a] = 0;
    d.cells.push_back(std::move(cell));
    if (d.cells[0].arity() == 2) d.tie_breaker[0] = 0;
    d.freeze();
    return d;
}

}  // namespace

std::optional<SigmaDecomposition> synthesize_disk_rendition(const Society& s) {
    s.check();
    int m = static_cast<int>(s.omega.size());
    if (m == 0) throw InputError("rendition synthesis needs a non-empty omega");
    if (m <= 3) return trivial_rendition(s);

    std::set<Vertex> omega_set(s.omega.begin(), s.omega.end());

    // Reduce: replace maximal omega-free chunks with <=3 real attachments
    // by virtual vertices; chunks with <=1 attachments are set aside.
    Graph cur = s.g;
    Vertex fresh = 0;
    for (Vertex v : s.g.vertices()) fresh = std::max(fresh, v);
    ++fresh;
    std::map<Vertex, Piece> pieces;           // virtual id -> piece
    std::vector<Piece> loose;                 // <=1 attachments
    std::set<Vertex> virtuals;

    while (true) {
        // Largest omega-free component X of cur - Z over small real Z.
        std::set<Vertex> bestx;
        std::vector<Vertex> bestz;
        std::vector<Vertex> verts = cur.vertices();
        auto consider = [&](const std::set<Vertex>& z) {
            Graph rest = cur.without_vertices(z);
            for (const auto& comp : rest.components()) {
                bool omega_free = true;
                for (Vertex v : comp)
                    if (omega_set.count(v)) omega_free = false;
                if (!omega_free) continue;
                if (comp.size() == 1 && virtuals.count(comp[0])) continue;
                // Attachments: members of z adjacent to the component.
                std::set<Vertex> attach;
                for (Vertex v : comp)
                    for (Vertex w : cur.neighbors(v))
                        if (z.count(w)) attach.insert(w);
                bool attach_real = true;
                for (Vertex a : attach)
                    if (virtuals.count(a)) attach_real = false;
                if (!attach_real) continue;
                if (attach.size() > 3) continue;
                if (comp.size() > bestx.size()) {
                    bestx = std::set<Vertex>(comp.begin(), comp.end());
                    bestz = std::vector<Vertex>(attach.begin(), attach.end());
                }
            }
        };
        int n = static_cast<int>(verts.size());
        consider({});
        for (int i = 0; i < n; ++i) {
            consider({verts[i]});
            for (int j = i + 1; j < n; ++j) {
                consider({verts[i], verts[j]});
                for (int k = j + 1; k < n; ++k)
                    consider({verts[i], verts[j], verts[k]});
            }
        }
        if (bestx.empty()) break;

        Piece piece;
        piece.members = bestx;
        piece.attach = bestz;
        if (piece.attach.size() <= 1) {
            loose.push_back(piece);
            cur = cur.without_vertices(bestx);
        } else {
            Vertex pv = fresh++;
            virtuals.insert(pv);
            std::set<Vertex> keep(cur.vertices().begin(), cur.vertices().end());
            for (Vertex v : bestx) keep.erase(v);
            Graph shrunk = cur.induced(keep);
            std::vector<Vertex> vs = shrunk.vertices();
            vs.push_back(pv);
            std::vector<Edge> es = shrunk.edges();
            for (Vertex z : piece.attach) es.push_back(make_edge(pv, z));
            cur = Graph(vs, es);
            pieces[pv] = piece;
        }
    }

    // Core plus rim plus apex.
    Vertex rim_base = fresh;
    std::vector<Vertex> rim;
    for (int i = 0; i < m; ++i) rim.push_back(fresh++);
    Vertex apex = fresh++;
    {
        std::vector<Vertex> vs = cur.vertices();
        std::vector<Edge> es = cur.edges();
        for (int i = 0; i < m; ++i) {
            vs.push_back(rim[i]);
            es.push_back(make_edge(s.omega[i], rim[i]));
            es.push_back(make_edge(rim[i], s.omega[(i + 1) % m]));
            es.push_back(make_edge(rim[i], apex));
        }
        vs.push_back(apex);
        cur = Graph(vs, es);
    }
    auto faces_opt = planar_embed_biconnected(cur);
    if (!faces_opt.has_value()) return std::nullopt;
    auto rot = rotations_from_faces(cur, *faces_opt);

    // Drop the apex from rotations.
    for (auto& [v, order] : rot)
        order.erase(std::remove(order.begin(), order.end(), apex), order.end());
    rot.erase(apex);

    // Build the rendition frame over real core vertices.
    std::vector<Vertex> real_nodes;
    for (Vertex v : cur.vertices())
        if (!virtuals.count(v) && v < rim_base && s.g.has_vertex(v))
            real_nodes.push_back(v);

    for (int polygon_flip = 0; polygon_flip < 2; ++polygon_flip) {
        SigmaDecomposition d;
        d.is_rendition = true;
        for (Vertex v : real_nodes) {
            d.node_index[v] = static_cast<int>(d.node_vertex.size());
            d.node_vertex.push_back(v);
            d.frame.add_vertex();
        }
        struct SlotKey {
            int pos;
            int sub;
            int dart;
        };
        std::vector<std::vector<SlotKey>> slots(real_nodes.size());
        auto pos_of = [&](Vertex v, Vertex nb) {
            const auto& order = rot.at(v);
            for (int i = 0; i < static_cast<int>(order.size()); ++i)
                if (order[i] == nb) return i;
            throw IntegrityError("rotation misses a neighbor");
        };
        std::vector<DecompCell> cells;
        std::vector<int> arc_owner;  // parallel to frame edges
        auto push_slot = [&](Vertex v, int pos, int sub, int dart) {
            slots[d.node_index.at(v)].push_back({pos, sub, dart});
        };
        // Real core edges: 2-gon cells.
        for (const Edge& e : cur.edges()) {
            Vertex u = e.first, v = e.second;
            if (u >= rim_base || v >= rim_base) continue;
            if (virtuals.count(u) || virtuals.count(v)) continue;
            int a0 = d.frame.add_edge(d.node_index.at(u), d.node_index.at(v));
            int a1 = d.frame.add_edge(d.node_index.at(u), d.node_index.at(v));
            push_slot(u, pos_of(u, v), 0, 2 * a0);
            push_slot(v, pos_of(v, u), 1, 2 * a0 + 1);
            push_slot(u, pos_of(u, v), 1, 2 * a1);
            push_slot(v, pos_of(v, u), 0, 2 * a1 + 1);
            DecompCell cell;
            cell.nodes = {d.node_index.at(u), d.node_index.at(v)};
            cell.subgraph = Graph({u, v}, {make_edge(u, v)});
            cell.arcs = {a0, a1};
            cells.push_back(std::move(cell));
            arc_owner.push_back(static_cast<int>(cells.size()) - 1);
            arc_owner.push_back(static_cast<int>(cells.size()) - 1);
        }
        // Boundary arcs through the rim positions.
        std::vector<int> bd_arcs;
        for (int i = 0; i < m; ++i) {
            Vertex u = s.omega[i], v = s.omega[(i + 1) % m];
            int a = d.frame.add_edge(d.node_index.at(u), d.node_index.at(v));
            push_slot(u, pos_of(u, rim[i]), polygon_flip, 2 * a);
            push_slot(v, pos_of(v, rim[i]), 1 - polygon_flip, 2 * a + 1);
            bd_arcs.push_back(a);
            arc_owner.push_back(-1);
        }
        // Piece cells at their virtual vertices.
        for (auto& [pv, piece] : pieces) {
            if (!cur.has_vertex(pv)) continue;  // swallowed by a later piece
            const auto& order = rot.at(pv);
            std::vector<Vertex> znodes(order.begin(), order.end());
            int k = static_cast<int>(znodes.size());
            DecompCell cell;
            for (Vertex z : znodes) cell.nodes.push_back(d.node_index.at(z));
            // Expand members recursively.
            std::set<Vertex> expanded;
            std::function<void(const Piece&)> expand = [&](const Piece& pc) {
                for (Vertex v : pc.members) {
                    if (virtuals.count(v)) expand(pieces.at(v));
                    else expanded.insert(v);
                }
            };
            expand(piece);
            std::set<Vertex> subv = expanded;
            for (Vertex z : znodes) subv.insert(z);
            std::vector<Edge> sube;
            for (const Edge& e : s.g.edges())
                if ((expanded.count(e.first) && subv.count(e.second)) ||
                    (expanded.count(e.second) && subv.count(e.first)))
                    sube.push_back(e);
            cell.subgraph = s.g.subgraph(subv, sube);
            int na = (k == 1) ? 1 : (k == 2 ? 2 : k);
            for (int i = 0; i < na; ++i) {
                Vertex a = znodes[i % k], b = znodes[(i + 1) % k];
                int arc = d.frame.add_edge(d.node_index.at(a), d.node_index.at(b));
                push_slot(a, pos_of(a, pv), (i == 0 && k == 1) ? 0 : polygon_flip,
                          2 * arc);
                push_slot(b, pos_of(b, pv),
                          (i == 0 && k == 1) ? 1 : 1 - polygon_flip, 2 * arc + 1);
                cell.arcs.push_back(arc);
                arc_owner.push_back(-2);  // patched below
            }
            for (int i = 0; i < na; ++i)
                arc_owner[arc_owner.size() - 1 - i] = static_cast<int>(cells.size());
            cells.push_back(std::move(cell));
        }
        for (int v = 0; v < static_cast<int>(real_nodes.size()); ++v) {
            auto order = slots[v];
            std::stable_sort(order.begin(), order.end(), [](auto& x, auto& y) {
                return std::tie(x.pos, x.sub) < std::tie(y.pos, y.sub);
            });
            std::vector<int> darts;
            for (auto& sk : order) darts.push_back(sk.dart);
            d.frame.set_rotation(v, darts);
        }
        // Validate: all cells bound faces, boundary bounds the outside.
        std::map<std::set<int>, std::vector<int>> face_by_arcs;
        for (int f = 0; f < d.frame.num_faces(); ++f) {
            std::set<int> fe;
            for (int dd : d.frame.faces()[f].darts) fe.insert(dd >> 1);
            face_by_arcs[fe].push_back(f);
        }
        bool ok = d.frame.connected() && d.frame.euler_genus() == 0;
        for (auto& cell : cells) {
            if (!ok) break;
            auto it = face_by_arcs.find(std::set<int>(cell.arcs.begin(), cell.arcs.end()));
            if (it == face_by_arcs.end()) {
                ok = false;
                break;
            }
            cell.face = it->second[0];
        }
        int outside = -1;
        {
            auto it = face_by_arcs.find(std::set<int>(bd_arcs.begin(), bd_arcs.end()));
            if (it != face_by_arcs.end()) outside = it->second[0];
            if (outside < 0) ok = false;
        }
        if (!ok) continue;

        d.cells = cells;
        d.outside_face = outside;
        d.arc_cell = arc_owner;
        for (Vertex v : s.omega) d.omega_nodes.push_back(d.node_index.at(v));
        // Loose pieces: 1-node cells at their attachment, or boundary-less
        // cells in a free face.
        for (const auto& piece : loose) {
            std::set<Vertex> expanded;
            std::function<void(const Piece&)> expand = [&](const Piece& pc) {
                for (Vertex v : pc.members) {
                    if (virtuals.count(v)) expand(pieces.at(v));
                    else expanded.insert(v);
                }
            };
            expand(piece);
            std::set<Vertex> subv = expanded;
            for (Vertex z : piece.attach) subv.insert(z);
            std::vector<Edge> sube;
            for (const Edge& e : s.g.edges())
                if ((expanded.count(e.first) && subv.count(e.second)) ||
                    (expanded.count(e.second) && subv.count(e.first)))
                    sube.push_back(e);
            Graph sub = s.g.subgraph(subv, sube);
            if (piece.attach.empty()) {
                // Any face not hosting a cell.
                std::set<int> hosted;
                for (auto& c : d.cells) hosted.insert(c.face);
                hosted.insert(d.outside_face);
                int face = -1;
                for (int f = 0; f < d.frame.num_faces(); ++f)
                    if (!hosted.count(f)) face = f;
                if (face < 0) throw IntegrityError("no free face for a floating piece");
                attach_cell_in_face(d, face, {}, sub);
            } else {
                int zn = d.node_index.at(piece.attach[0]);
                bool placed = false;
                for (int f = 0; f < d.frame.num_faces() && !placed; ++f) {
                    bool touches = false;
                    for (int c2 = 0;
                         c2 < static_cast<int>(d.frame.rotation(zn).size()); ++c2)
                        if (d.frame.face_at_corner(zn, c2) == f) touches = true;
                    std::set<int> hosted;
                    for (auto& c : d.cells) hosted.insert(c.face);
                    if (!touches || hosted.count(f) || f == d.outside_face) continue;
                    try {
                        attach_cell_in_face(d, f, {zn}, sub);
                        placed = true;
                    } catch (const InputError&) {
                    }
                }
                if (!placed) throw IntegrityError("no face for a pendant piece");
            }
        }
        for (int c = 0; c < static_cast<int>(d.cells.size()); ++c)
            if (d.cells[c].arity() == 2 && !d.tie_breaker.count(c)) {
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
        d.freeze();
        return d;
    }
    throw IntegrityError("rendition frame failed for both orientations");
}

// ---------------------------------------------------------------------------
// Depth and transactions.

int society_depth(const Society& s) {
    s.check();
    int m = static_cast<int>(s.omega.size());
    if (m < 2) return 0;
    int best = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            // Arcs (i..j-1) and (j..i-1).
            std::set<Vertex> a, b;
            for (int k = i; k != j; k = (k + 1) % m) a.insert(s.omega[k]);
            for (int k = j; k != i; k = (k + 1) % m) b.insert(s.omega[k]);
            best = std::max(best, max_disjoint_paths(s.g, a, b));
        }
    return best;
}

std::optional<Transaction> max_transaction(const Society& s, const OmegaSegment& a,
                                           const OmegaSegment& b) {
    s.check();
    int m = static_cast<int>(s.omega.size());
    std::set<Vertex> sa, sb;
    for (int p : a.positions(m)) sa.insert(s.omega[p]);
    for (int p : b.positions(m)) sb.insert(s.omega[p]);
    for (Vertex v : sa)
        if (sb.count(v)) throw InputError("transaction segments must be disjoint");
    int k = max_disjoint_paths(s.g, sa, sb);
    if (k == 0) return std::nullopt;
    Transaction t;
    t.seg_a = a;
    t.seg_b = b;
    t.linkage = *disjoint_paths(s.g, sa, sb, k);
    return t;
}

Society vortex_society(const SigmaDecomposition& d, int cell) {
    if (cell < 0 || cell >= static_cast<int>(d.cells.size()))
        throw InputError("vortex_society: unknown cell");
    Society s;
    s.g = d.cells[cell].subgraph;
    for (int n : d.cells[cell].nodes) s.omega.push_back(d.node_vertex[n]);
    return s;
}

// ---------------------------------------------------------------------------
// Classification.

std::vector<Path> planar_order(const Transaction& t, const Society& s) {
    int m = static_cast<int>(s.omega.size());
    std::vector<std::pair<int, Path>> keyed;
    for (const auto& p : t.linkage.paths) {
        Path q = p;
        int pa = s.omega_pos(q.front());
        int pb = s.omega_pos(q.back());
        if (pa < 0 || pb < 0) throw InputError("transaction path endpoint off omega");
        if (!t.seg_a.contains(pa, m)) {
            std::reverse(q.begin(), q.end());
            std::swap(pa, pb);
        }
        if (!t.seg_a.contains(pa, m) || !t.seg_b.contains(pb, m))
            throw InputError("transaction path endpoints outside the segments");
        // Key: distance from seg_a.first.
        int key = (pa - t.seg_a.first + m) % m;
        keyed.push_back({key, q});
    }
    std::sort(keyed.begin(), keyed.end(),
              [](auto& x, auto& y) { return x.first < y.first; });
    std::vector<Path> out;
    for (auto& [k, p] : keyed) out.push_back(p);
    return out;
}

namespace {

bool endpoints_interleave(int a1, int b1, int a2, int b2, int m) {
    // Do {a2, b2} separate a1 from b1 on the cycle?
    auto between = [&](int x, int lo, int hi) {
        for (int i = (lo + 1) % m; i != hi; i = (i + 1) % m)
            if (i == x) return true;
        return false;
    };
    bool a2_in = between(a2, a1, b1);
    bool b2_in = between(b2, a1, b1);
    return a2_in != b2_in;
}

// Strip region of a planar transaction: faces on the transaction side of
// the closed walk trace(P_first) + omega arc + trace(P_last) + omega arc.
std::set<int> strip_faces(const std::vector<Path>& ordered, const Society& s,
                          const SigmaDecomposition& rho) {
    const Path& first = ordered.front();
    const Path& last = ordered.back();
    Trace tf = trace_of(first, false, rho);
    Trace tl = trace_of(last, false, rho);
    // Boundary arcs between omega positions: map consecutive omega nodes to
    // their arc.
    int m = static_cast<int>(s.omega.size());
    std::map<std::pair<int, int>, int> bd_arc;  // (node, node) -> dart
    for (int e = 0; e < rho.frame.num_edges(); ++e) {
        if (rho.arc_cell[e] != -1) continue;
        bd_arc[{rho.frame.edge(e).u, rho.frame.edge(e).v}] = 2 * e;
        bd_arc[{rho.frame.edge(e).v, rho.frame.edge(e).u}] = 2 * e + 1;
    }
    auto omega_walk = [&](Vertex from, Vertex to, int dir) {
        // Walk boundary arcs from `from` to `to` stepping omega positions
        // by dir.
        std::vector<int> darts;
        int i = s.omega_pos(from);
        while (s.omega[i] != to) {
            int j = (i + dir + m) % m;
            int a = rho.node_index.at(s.omega[i]);
            int b = rho.node_index.at(s.omega[j]);
            auto it = bd_arc.find({a, b});
            if (it == bd_arc.end()) throw IntegrityError("missing boundary arc");
            darts.push_back(it->second);
            i = j;
        }
        return darts;
    };
    // Closed walk: first path forward, omega arc to the last path's far
    // endpoint, last path reversed, omega arc back. The omega stretches
    // must avoid the other transaction endpoints; try both directions.
    std::vector<int> walk;
    auto try_walk = [&](int dir_b, int dir_a) -> std::optional<std::vector<int>> {
        std::vector<int> w = tf.arc_walk;
        int pb_first = s.omega_pos(first.back());
        int pb_last = s.omega_pos(last.back());
        int pa_first = s.omega_pos(first.front());
        int pa_last = s.omega_pos(last.front());
        // The b-side stretch (the minimal arc through the b-endpoints) must
        // avoid the a-endpoints, and conversely.
        std::set<int> a_ends, b_ends;
        for (const auto& p : ordered) {
            a_ends.insert(s.omega_pos(p.front()));
            b_ends.insert(s.omega_pos(p.back()));
        }
        for (int i = pb_first; i != pb_last; i = (i + dir_b + m) % m)
            if (i != pb_first && a_ends.count(i)) return std::nullopt;
        for (int i = pa_last; i != pa_first; i = (i + dir_a + m) % m)
            if (i != pa_last && b_ends.count(i)) return std::nullopt;
        for (int dd : omega_walk(first.back(), last.back(), dir_b)) w.push_back(dd);
        std::vector<int> rev = tl.arc_walk;
        std::reverse(rev.begin(), rev.end());
        for (int dd : rev) w.push_back(dd ^ 1);
        for (int dd : omega_walk(last.front(), first.front(), dir_a)) w.push_back(dd);
        return w;
    };
    std::optional<std::vector<int>> walk_opt;
    for (int db : {1, -1})
        for (int da : {1, -1}) {
            if (walk_opt.has_value()) break;
            try {
                walk_opt = try_walk(db, da);
            } catch (const std::exception&) {
            }
        }
    if (!walk_opt.has_value()) throw InputError("strip walk construction failed");
    walk = *walk_opt;
    CutResult cut = cut_along(rho.frame, walk);
    if (!cut.two_sided) throw IntegrityError("strip walk does not separate");
    std::set<int> left(cut.left_faces.begin(), cut.left_faces.end());
    std::set<int> right(cut.right_faces.begin(), cut.right_faces.end());
    if (left.count(rho.outside_face)) return right;
    if (right.count(rho.outside_face)) return left;
    throw IntegrityError("outside face vanished from the strip cut");
}

}  // namespace

TransactionFlags classify(const Transaction& t, const Society& s,
                          const SigmaDecomposition* rho,
                          const std::vector<Path>* nest) {
    TransactionFlags out;
    int m = static_cast<int>(s.omega.size());
    const auto& paths = t.linkage.paths;
    // Planar: no two paths' endpoints interleave.
    out.planar = true;
    for (size_t i = 0; i < paths.size(); ++i)
        for (size_t j = i + 1; j < paths.size(); ++j) {
            int a1 = s.omega_pos(paths[i].front());
            int b1 = s.omega_pos(paths[i].back());
            int a2 = s.omega_pos(paths[j].front());
            int b2 = s.omega_pos(paths[j].back());
            if (endpoints_interleave(a1, b1, a2, b2, m)) out.planar = false;
        }
    // Peripheral elements.
    std::set<int> all_ends;
    for (const auto& p : paths) {
        all_ends.insert(s.omega_pos(p.front()));
        all_ends.insert(s.omega_pos(p.back()));
    }
    out.has_peripheral = false;
    for (const auto& p : paths) {
        int a = s.omega_pos(p.front());
        int b = s.omega_pos(p.back());
        // Peripheral if one of the two omega arcs between a and b contains
        // no other endpoint.
        bool side1 = true, side2 = true;
        for (int i = (a + 1) % m; i != b; i = (i + 1) % m)
            if (all_ends.count(i)) side1 = false;
        for (int i = (b + 1) % m; i != a; i = (i + 1) % m)
            if (all_ends.count(i)) side2 = false;
        if (side1 || side2) out.has_peripheral = true;
    }
    out.crooked = !out.has_peripheral;

    if (rho != nullptr && out.planar && paths.size() >= 2) {
        auto ordered = planar_order(t, s);
        bool grounded_ends = is_grounded(ordered.front(), false, *rho) &&
                             is_grounded(ordered.back(), false, *rho);
        bool no_vortex_edge = true;
        for (const auto& p : ordered)
            for (size_t i = 0; i + 1 < p.size(); ++i)
                if ((*rho).cells[(*rho).cell_of_edge(p[i], p[i + 1])].is_vortex())
                    no_vortex_edge = false;
        if (grounded_ends) {
            try {
                std::set<int> strip = strip_faces(ordered, s, *rho);
                bool vortex_free = true;
                for (int c : rho->vortex_cells())
                    if (strip.count(rho->cells[c].face)) vortex_free = false;
                out.proper = vortex_free && no_vortex_edge;
                if (out.proper && nest != nullptr && !nest->empty()) {
                    // Orthogonal: every nest cycle meets every path in
                    // exactly two pieces.
                    bool orth = true;
                    for (const auto& cyc : *nest) {
                        std::set<Vertex> cs(cyc.begin(), cyc.end());
                        for (const auto& p : ordered) {
                            int comps = 0;
                            bool in = false;
                            for (Vertex v : p) {
                                bool here = cs.count(v) > 0;
                                if (here && !in) ++comps;
                                in = here;
                            }
                            if (comps != 2) orth = false;
                        }
                    }
                    out.splitting = orth;
                }
            } catch (const std::exception&) {
                out.proper = false;
            }
        }
    }
    if (rho != nullptr && nest != nullptr && !nest->empty()) {
        // Exposed: an edge of every path drawn inside the omega-avoiding
        // disk of the innermost nest cycle.
        std::set<int> avoid(rho->omega_nodes.begin(), rho->omega_nodes.end());
        auto disk = avoiding_disk((*nest)[0], avoid, *rho);
        if (disk.has_value()) {
            out.exposed = true;
            for (const auto& p : paths) {
                bool inside = false;
                for (size_t i = 0; i + 1 < p.size(); ++i) {
                    int c = rho->cell_of_edge(p[i], p[i + 1]);
                    if (rho->cells[c].face >= 0 && disk->faces.count(rho->cells[c].face))
                        inside = true;
                }
                if (!inside) out.exposed = false;
            }
        }
    }
    return out;
}

Transaction extract_proper(const SigmaDecomposition& rho, const Society& s,
                           const Transaction& t, int p) {
    if (p < 2) throw InputError("extract_proper needs p >= 2");
    int x = std::max(1, rho.breadth());
    int y = 0;
    for (int c : rho.vortex_cells()) y = std::max(y, society_depth(vortex_society(rho, c)));
    y = std::max(y, 2);
    int need = (x + 1) * (2 * x * y + p);
    if (t.linkage.order() < need)
        throw RefusalError("extract_proper needs a transaction of order " +
                           std::to_string(need) + ", got " +
                           std::to_string(t.linkage.order()));
    auto ordered = planar_order(t, s);
    for (int start = 0; start + p <= static_cast<int>(ordered.size()); ++start) {
        Transaction sub;
        sub.seg_a = t.seg_a;
        sub.seg_b = t.seg_b;
        for (int i = start; i < start + p; ++i) sub.linkage.paths.push_back(ordered[i]);
        TransactionFlags flags = classify(sub, s, &rho);
        if (flags.proper) return sub;
    }
    throw IntegrityError("no proper subtransaction found despite the size bound");
}

// ---------------------------------------------------------------------------
// Parcels and homogeneous transactions.

namespace {

// Middle subpath: between the two components of p ∩ cycle.
Path middle_subpath(const Path& p, const std::set<Vertex>& cyc) {
    int first_end = -1, second_start = -1;
    bool in = false;
    int comp = 0;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        bool here = cyc.count(p[i]) > 0;
        if (here && !in) ++comp;
        if (comp == 1 && here) first_end = i;
        if (comp == 2 && here && second_start < 0) second_start = i;
        in = here;
    }
    if (comp != 2 || first_end < 0 || second_start < 0)
        throw InputError("path does not cross the cycle exactly twice");
    return Path(p.begin() + first_end, p.begin() + second_start + 1);
}

Path cycle_arc(const Path& cyc, Vertex from, Vertex to, const std::set<Vertex>& avoid) {
    int n = static_cast<int>(cyc.size());
    int i0 = -1, i1 = -1;
    for (int i = 0; i < n; ++i) {
        if (cyc[i] == from) i0 = i;
        if (cyc[i] == to) i1 = i;
    }
    if (i0 < 0 || i1 < 0) throw InputError("cycle_arc: endpoint off the cycle");
    for (int dir : {1, -1}) {
        Path arc;
        bool ok = true;
        for (int i = i0;; i = (i + dir + n) % n) {
            arc.push_back(cyc[i]);
            if (cyc[i] == to) break;
            if (i != i0 && avoid.count(cyc[i])) {
                ok = false;
                break;
            }
            if (static_cast<int>(arc.size()) > n) {
                ok = false;
                break;
            }
        }
        if (ok && arc.back() == to) return arc;
    }
    throw InputError("cycle_arc: no clean arc");
}

}  // namespace

std::vector<Path> parcels(const Transaction& t, const Society& s,
                          const SigmaDecomposition& rho, const Path& inner_cycle) {
    auto ordered = planar_order(t, s);
    std::set<Vertex> cyc(inner_cycle.begin(), inner_cycle.end());
    std::vector<Path> middles;
    for (const auto& p : ordered) middles.push_back(middle_subpath(p, cyc));
    std::vector<Path> out;
    std::set<Vertex> other_ends;
    for (const auto& mid : middles) {
        other_ends.insert(mid.front());
        other_ends.insert(mid.back());
    }
    (void)rho;
    for (size_t i = 0; i + 1 < middles.size(); ++i) {
        const Path& m1 = middles[i];
        const Path& m2 = middles[i + 1];
        std::set<Vertex> avoid = other_ends;
        avoid.erase(m1.front());
        avoid.erase(m1.back());
        avoid.erase(m2.front());
        avoid.erase(m2.back());
        Path arc_front = cycle_arc(inner_cycle, m1.front(), m2.front(), avoid);
        Path arc_back = cycle_arc(inner_cycle, m1.back(), m2.back(), avoid);
        // Cycle: m1 forward, arc from m1.back to m2.back, m2 reversed, arc
        // from m2.front back to m1.front.
        Path cycle = m1;
        for (size_t k = 1; k < arc_back.size(); ++k) cycle.push_back(arc_back[k]);
        for (int k = static_cast<int>(m2.size()) - 2; k >= 0; --k) cycle.push_back(m2[k]);
        Path back = arc_front;
        std::reverse(back.begin(), back.end());
        for (size_t k = 1; k + 1 < back.size(); ++k) cycle.push_back(back[k]);
        out.push_back(cycle);
    }
    return out;
}

Transaction extract_homogeneous(const Transaction& t, const Society& s,
                                const SigmaDecomposition& rho, const Path& inner_cycle,
                                const CellColoring& chi, int p) {
    int cap = chi.capacity();
    long long need = 1;
    for (int i = 0; i < (1 << cap); ++i) need *= p;
    if (t.linkage.order() < need)
        throw RefusalError("extract_homogeneous needs order " + std::to_string(need));
    auto ordered = planar_order(t, s);
    auto cycles = parcels(t, s, rho, inner_cycle);
    std::set<int> avoid(rho.omega_nodes.begin(), rho.omega_nodes.end());
    std::vector<ColorSet> colors;
    for (const auto& cyc : cycles) {
        std::set<Vertex> avoid_v;
        for (int n : avoid) avoid_v.insert(rho.node_vertex[n]);
        std::set<int> inf = influence(cyc, avoid_v, rho);
        ColorSet cs = 0;
        for (int c : inf) {
            auto it = chi.assignment.find(c);
            if (it != chi.assignment.end()) cs |= color_bit(it->second);
        }
        if (cs == 0) cs = color_bit(1);
        colors.push_back(cs);
    }
    auto idx = homogenize_ladder_select(colors, p);
    Transaction out;
    out.seg_a = t.seg_a;
    out.seg_b = t.seg_b;
    for (int i : idx) out.linkage.paths.push_back(ordered[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Coterminal radial linkages.

Linkage coterminal_radial_linkage(const Society& s, const std::vector<Path>& nest,
                                  const Linkage& from, const Linkage& to) {
    int k = static_cast<int>(nest.size());
    if (from.order() != k || to.order() != k)
        throw InputError("coterminal_radial_linkage: order mismatch");
    std::set<Vertex> omega_set(s.omega.begin(), s.omega.end());
    // Start set: the non-omega endpoints of `from`; end set: the omega
    // endpoints of `to`.
    std::set<Vertex> starts, ends;
    for (const auto& p : from.paths)
        starts.insert(omega_set.count(p.front()) ? p.back() : p.front());
    for (const auto& p : to.paths)
        ends.insert(omega_set.count(p.front()) ? p.front() : p.back());
    // Search inside the union of both linkages and the nest.
    std::set<Vertex> allowed;
    for (const auto& p : from.paths) allowed.insert(p.begin(), p.end());
    for (const auto& p : to.paths) allowed.insert(p.begin(), p.end());
    for (const auto& cyc : nest) allowed.insert(cyc.begin(), cyc.end());
    Graph sub = s.g.induced(allowed);
    auto link = disjoint_paths(sub, starts, ends, k);
    if (!link.has_value())
        throw IntegrityError("coterminal linkage infeasible despite orthogonal inputs");
    std::vector<Path> paths = link->paths;

    // Orthogonalize: shortcut multi-touch cycles along free arcs.
    auto components_on = [&](const Path& p, const std::set<Vertex>& cyc) {
        std::vector<std::pair<int, int>> comps;
        bool in = false;
        int start = -1;
        for (int i = 0; i < static_cast<int>(p.size()); ++i) {
            bool here = cyc.count(p[i]) > 0;
            if (here && !in) start = i;
            if (!here && in) comps.push_back({start, i - 1});
            in = here;
        }
        if (in) comps.push_back({start, static_cast<int>(p.size()) - 1});
        return comps;
    };
    bool changed = true;
    int guard = 0;
    while (changed) {
        if (++guard > 10000) throw IntegrityError("orthogonalization did not settle");
        changed = false;
        for (int pi = 0; pi < k && !changed; ++pi) {
            for (const auto& cyc : nest) {
                std::set<Vertex> cs(cyc.begin(), cyc.end());
                auto comps = components_on(paths[pi], cs);
                if (comps.size() <= 1) continue;
                int a = comps.front().first;
                int b = comps.back().second;
                std::set<Vertex> others;
                for (int pj = 0; pj < k; ++pj)
                    if (pj != pi)
                        others.insert(paths[pj].begin(), paths[pj].end());
                try {
                    Path arc = cycle_arc(cyc, paths[pi][a], paths[pi][b], others);
                    Path np(paths[pi].begin(), paths[pi].begin() + a);
                    np.insert(np.end(), arc.begin(), arc.end());
                    np.insert(np.end(), paths[pi].begin() + b + 1, paths[pi].end());
                    // Deduplicate accidental revisits.
                    std::set<Vertex> seen;
                    bool simple = true;
                    for (Vertex v : np)
                        if (!seen.insert(v).second) simple = false;
                    if (!simple) continue;
                    paths[pi] = np;
                    changed = true;
                    break;
                } catch (const InputError&) {
                }
            }
        }
    }
    Linkage out;
    out.paths = paths;
    if (!out.disjoint() || !out.paths_in(s.g))
        throw IntegrityError("coterminal linkage output invalid");
    for (const auto& cyc : nest) {
        std::set<Vertex> cs(cyc.begin(), cyc.end());
        for (const auto& p : out.paths) {
            int comps = 0;
            bool in = false;
            for (Vertex v : p) {
                bool here = cs.count(v) > 0;
                if (here && !in) ++comps;
                in = here;
            }
            if (comps != 1)
                throw IntegrityError("coterminal linkage is not orthogonal");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Storage segments.

std::vector<int> StorageSegment::plot_faces() const {
    if (wall.r != 2 * t + 1) throw InputError("storage segment needs 2t+1 rows");
    std::set<Vertex> strip;
    strip.insert(wall.rows[t - 1].begin(), wall.rows[t - 1].end());
    strip.insert(wall.rows[t].begin(), wall.rows[t].end());
    std::vector<int> out;
    for (int f : wall.brick_faces()) {
        bool ok = true;
        for (int mv : wall.skel.faces()[f].vertices)
            if (!strip.count(wall.skel_vertex[mv])) ok = false;
        if (ok) out.push_back(f);
    }
    return out;
}

std::vector<SegmentHandle> storage_to_flaps(const StorageSegment& st,
                                            const SigmaDecomposition& delta,
                                            const CellColoring& chi,
                                            const std::set<Vertex>& avoid, int b) {
    int T = st.t;
    int ft = T - 12;  // output flap order
    if (ft < 3) throw InputError("storage_to_flaps needs t >= 15 rows parameter");
    if (ft >= 6)
        throw RefusalError("storage routing implemented for flap orders 3..5");
    int p = st.wall.t;

    // Plot colors, left to right.
    auto plots = st.plot_faces();
    std::sort(plots.begin(), plots.end(), [&](int f1, int f2) {
        auto firstcol = [&](int f) {
            int best = INT32_MAX;
            for (int mv : st.wall.skel.faces()[f].vertices) {
                Vertex v = st.wall.skel_vertex[mv];
                for (int j = 0; j < st.wall.t; ++j) {
                    const Path& col = st.wall.cols[j];
                    if (std::find(col.begin(), col.end(), v) != col.end())
                        best = std::min(best, j);
                }
            }
            return best;
        };
        return firstcol(f1) < firstcol(f2);
    });
    std::set<int> color_seen;
    std::vector<std::set<int>> plot_cells;
    for (int f : plots) {
        Path cyc;
        for (int mv : st.wall.skel.faces()[f].vertices)
            cyc.push_back(st.wall.skel_vertex[mv]);
        std::set<int> inf = influence(cyc, avoid, delta);
        plot_cells.push_back(inf);
        for (int c : inf) {
            auto it = chi.assignment.find(c);
            if (it != chi.assignment.end()) color_seen.insert(it->second);
        }
    }
    std::vector<int> colors(color_seen.begin(), color_seen.end());
    int lstar = static_cast<int>(colors.size());
    int window_w = 2 * ft + 12;
    if (p < lstar * b * window_w)
        throw RefusalError("storage_to_flaps needs width >= " +
                           std::to_string(lstar * b * window_w));

    std::vector<SegmentHandle> out;
    for (int ci = 0; ci < lstar; ++ci) {
        for (int copy = 0; copy < b; ++copy) {
            int w0 = (ci * b + copy) * window_w;  // window column offset
            // Rainbow: path k from top of column w0+k down to row T+1+k,
            // across, and back up the mirrored column.
            SegmentHandle flap;
            flap.kind = SegKind::Flap;
            flap.t = ft;

            auto col_at = [&](int j) { return st.wall.cols[w0 + j]; };
            auto row_at = [&](int i) { return st.wall.rows[i]; };
            auto col_vertex_on_row = [&](int j, int i) {
                const Path& col = col_at(j);
                std::set<Vertex> row(row_at(i).begin(), row_at(i).end());
                for (Vertex v : col)
                    if (row.count(v)) return v;
                throw IntegrityError("column misses a row");
            };
            auto row_walk = [&](int i, Vertex from, Vertex to) {
                const Path& row = row_at(i);
                auto i0 = std::find(row.begin(), row.end(), from);
                auto i1 = std::find(row.begin(), row.end(), to);
                if (i0 == row.end() || i1 == row.end())
                    throw IntegrityError("row walk endpoints missing");
                Path out2;
                if (i0 <= i1) out2 = Path(i0, i1 + 1);
                else {
                    out2 = Path(i1, i0 + 1);
                    std::reverse(out2.begin(), out2.end());
                }
                return out2;
            };
            auto col_walk = [&](int j, int row_from, int row_to) {
                Vertex a = col_vertex_on_row(j, row_from);
                Vertex bb = col_vertex_on_row(j, row_to);
                const Path& col = col_at(j);
                auto i0 = std::find(col.begin(), col.end(), a);
                auto i1 = std::find(col.begin(), col.end(), bb);
                Path out2;
                if (i0 <= i1) out2 = Path(i0, i1 + 1);
                else {
                    out2 = Path(i1, i0 + 1);
                    std::reverse(out2.begin(), out2.end());
                }
                return out2;
            };
            for (int k = 1; k <= ft; ++k) {
                int dive = T + 1 + k;  // below the plot strip rows T, T+1
                Path pth = col_walk(k - 1, 0, dive - 1);
                Path across = row_walk(dive - 1, pth.back(),
                                       col_vertex_on_row(window_w - k, dive - 1));
                pth.insert(pth.end(), across.begin() + 1, across.end());
                Path up = col_walk(window_w - k, dive - 1, 0);
                // col_walk returns a path between the row vertices; orient.
                if (up.front() != pth.back()) std::reverse(up.begin(), up.end());
                pth.insert(pth.end(), up.begin() + 1, up.end());
                flap.rainbow.push_back(pth);
            }
            // Pick a cell of the target color under a middle plot.
            int cell = -1;
            for (size_t pi = 0; pi < plots.size(); ++pi) {
                // Plot within this window's middle columns.
                Path cyc;
                for (int mv : st.wall.skel.faces()[plots[pi]].vertices)
                    cyc.push_back(st.wall.skel_vertex[mv]);
                bool in_window = true;
                std::set<Vertex> mid;
                for (int j = ft; j < ft + 12 && w0 + j < st.wall.t; ++j)
                    mid.insert(col_at(j).begin(), col_at(j).end());
                for (Vertex v : cyc)
                    if (!mid.count(v)) in_window = false;
                if (!in_window) continue;
                for (int c : plot_cells[pi]) {
                    auto it = chi.assignment.find(c);
                    if (it != chi.assignment.end() && it->second == colors[ci]) cell = c;
                }
                if (cell >= 0) break;
            }
            if (cell < 0)
                throw IntegrityError("no cell of the target color under the window");
            // Pendants: disjoint paths from the cell boundary to the tops
            // of distinct middle columns, inside the middle strip.
            std::vector<Vertex> cbd;
            for (int n : delta.cells[cell].nodes) cbd.push_back(delta.node_vertex[n]);
            int q = static_cast<int>(cbd.size());
            std::set<Vertex> strip_verts;
            for (int j = ft; j < ft + 12; ++j)
                strip_verts.insert(col_at(j).begin(), col_at(j).end());
            for (Vertex v : cbd) strip_verts.insert(v);
            std::set<Vertex> strip_keep;
            // Keep rows 1..T+1 of the middle columns only.
            std::set<Vertex> upper;
            for (int i = 0; i <= T; ++i)
                upper.insert(row_at(i).begin(), row_at(i).end());
            for (Vertex v : strip_verts)
                if (upper.count(v) || std::find(cbd.begin(), cbd.end(), v) != cbd.end())
                    strip_keep.insert(v);
            Graph strip = st.wall.host.induced(strip_keep);
            std::set<Vertex> tops;
            for (int j = ft; j < ft + q; ++j) tops.insert(col_at(j).front());
            auto pend = disjoint_paths(strip, std::set<Vertex>(cbd.begin(), cbd.end()),
                                       tops, q);
            if (!pend.has_value())
                throw IntegrityError("pendant routing infeasible in the storage strip");
            // Base: rows 1..ft over this window's first/middle/last columns.
            flap.arity = q;
            for (auto& pp : pend->paths) {
                // Orient pendant from the top boundary vertex to the cell.
                if (tops.count(pp.back())) std::reverse(pp.begin(), pp.end());
                flap.pendants.push_back(pp);
                flap.hyperedge.push_back(pp.back());
            }
            // Base wall handle rows/cols.
            WallHandle base;
            base.kind = WallKind::WallSegment;
            base.r = ft;
            base.t = 2 * ft + q;
            std::vector<int> keep_cols;
            for (int j = 0; j < ft; ++j) keep_cols.push_back(j);
            for (int j = 0; j < q; ++j) keep_cols.push_back(ft + j);
            for (int j = window_w - ft; j < window_w; ++j) keep_cols.push_back(j);
            std::set<Vertex> base_verts;
            for (int i = 0; i < ft; ++i) {
                Vertex from = col_vertex_on_row(keep_cols.front(), i);
                Vertex to = col_vertex_on_row(keep_cols.back(), i);
                Path row = row_walk(i, from, to);
                base.rows.push_back(row);
                base_verts.insert(row.begin(), row.end());
            }
            for (int j : keep_cols) {
                Path col = col_walk(j, 0, ft - 1);
                base.cols.push_back(col);
                base_verts.insert(col.begin(), col.end());
            }
            for (int j : keep_cols) base.top_bd.push_back(col_at(j).front());
            base.host = st.wall.host;
            flap.base = base;
            out.push_back(std::move(flap));
        }
    }
    return out;
}

}  // namespace walloid

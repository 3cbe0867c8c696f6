#include "walloid/map.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <tuple>

namespace walloid {

int CombinatorialMap::add_vertex() {
    rot_.emplace_back();
    traced_ = false;
    return num_vertices() - 1;
}

int CombinatorialMap::add_edge(int u, int v, bool twisted) {
    if (u < 0 || u >= num_vertices() || v < 0 || v >= num_vertices())
        throw InputError("map edge references unknown vertex");
    int e = num_edges();
    edges_.push_back({u, v, twisted});
    rot_[u].push_back(2 * e);
    rot_[v].push_back(2 * e + 1);
    traced_ = false;
    return e;
}

void CombinatorialMap::set_rotation(int v, std::vector<int> darts) {
    std::vector<int> sorted = darts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> cur = rot_[v];
    std::sort(cur.begin(), cur.end());
    if (sorted != cur) throw InputError("set_rotation must permute the incident darts");
    rot_[v] = std::move(darts);
    traced_ = false;
}

void CombinatorialMap::set_twisted(int e, bool twisted) {
    edges_[e].twisted = twisted;
    traced_ = false;
}

namespace {
// Physical slot side of a trace state (dart, walking side).
inline int phys_side(const CombinatorialMap::MapEdge& e, int dart, int s) {
    return (dart & 1) ? (s ^ 1 ^ (e.twisted ? 1 : 0)) : s;
}
}  // namespace

void CombinatorialMap::trace() const {
    if (traced_) return;
    faces_.clear();
    slot_face_.assign(2 * num_edges(), -1);
    corner_face_.assign(num_vertices(), {});
    for (int v = 0; v < num_vertices(); ++v)
        corner_face_[v].assign(std::max<size_t>(rot_[v].size(), 1), -1);

    // Position of each dart in its tail's rotation.
    std::vector<int> pos(2 * num_edges(), -1);
    for (int v = 0; v < num_vertices(); ++v)
        for (int i = 0; i < static_cast<int>(rot_[v].size()); ++i) pos[rot_[v][i]] = i;

    int nstates = 4 * num_edges();
    std::vector<int> state_orbit(nstates, -1);
    struct Orbit {
        std::vector<int> states;
        std::vector<std::pair<int, int>> slots;  // (edge, side) sorted later
    };
    std::vector<Orbit> orbits;

    auto next_state = [&](int st) {
        int d = st >> 1, s = st & 1;
        const MapEdge& e = edges_[d >> 1];
        int a = s ^ 1 ^ (e.twisted ? 1 : 0);
        int r = d ^ 1;
        int v = tail(r);
        int deg = static_cast<int>(rot_[v].size());
        int i = pos[r];
        int nd, ns, corner;
        if (a == 0) {  // arrive on the successor side
            nd = rot_[v][(i + 1) % deg];
            ns = 1;
            corner = i;
        } else {
            nd = rot_[v][(i - 1 + deg) % deg];
            ns = 0;
            corner = (i - 1 + deg) % deg;
        }
        return std::tuple<int, int, int>(2 * nd + ns, v, corner);
    };

    // First pass: orbits.
    for (int st0 = 0; st0 < nstates; ++st0) {
        if (state_orbit[st0] >= 0) continue;
        int id = static_cast<int>(orbits.size());
        orbits.emplace_back();
        int st = st0;
        while (state_orbit[st] < 0) {
            state_orbit[st] = id;
            int d = st >> 1, s = st & 1;
            orbits[id].states.push_back(st);
            orbits[id].slots.push_back({d >> 1, phys_side(edges_[d >> 1], d, s)});
            st = std::get<0>(next_state(st));
        }
        if (st != st0) throw IntegrityError("face tracing: orbit is not a cycle");
    }

    // Pair orbits into faces by slot multiset.
    std::map<std::vector<std::pair<int, int>>, std::vector<int>> by_slots;
    for (int i = 0; i < static_cast<int>(orbits.size()); ++i) {
        auto key = orbits[i].slots;
        std::sort(key.begin(), key.end());
        by_slots[key].push_back(i);
    }
    std::vector<int> orbit_face(orbits.size(), -1);
    for (auto& [key, ids] : by_slots) {
        if (ids.size() % 2 != 0)
            throw IntegrityError("face tracing: unpaired orbit");
        // Each consecutive pair is one face (a slot multiset is shared by
        // exactly the two traversal directions of one face; multiple faces
        // with identical slot sets cannot happen since a slot has a unique
        // face).
        if (ids.size() != 2) throw IntegrityError("face tracing: slot set collision");
        int f = static_cast<int>(faces_.size());
        orbit_face[ids[0]] = orbit_face[ids[1]] = f;
        Face face;
        for (int st : orbits[ids[0]].states) {
            int d = st >> 1;
            face.darts.push_back(d);
            face.vertices.push_back(tail(d));
        }
        faces_.push_back(std::move(face));
        for (auto& [e, side] : orbits[ids[0]].slots) {
            if (slot_face_[2 * e + side] != -1 && slot_face_[2 * e + side] != f)
                throw IntegrityError("face tracing: slot in two faces");
            slot_face_[2 * e + side] = f;
        }
    }

    // Second pass: corners.
    for (const auto& orbit : orbits) {
        int f = orbit_face[&orbit - orbits.data()];
        for (int st : orbit.states) {
            auto [nxt, v, corner] = next_state(st);
            (void)nxt;
            if (!rot_[v].empty()) corner_face_[v][corner] = f;
        }
    }
    // Isolated vertices: they sit in some face; leave -1 (no corner).
    for (int s = 0; s < 2 * num_edges(); ++s)
        if (slot_face_[s] < 0) throw IntegrityError("face tracing: slot missed");
    traced_ = true;
}

const std::vector<CombinatorialMap::Face>& CombinatorialMap::faces() const {
    trace();
    return faces_;
}

int CombinatorialMap::face_of_slot(int edge, int side) const {
    trace();
    return slot_face_[2 * edge + side];
}

int CombinatorialMap::face_at_corner(int v, int corner) const {
    trace();
    return corner_face_[v][corner];
}

bool CombinatorialMap::connected() const {
    if (num_vertices() == 0) return true;
    std::vector<char> seen(num_vertices(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    std::vector<std::vector<int>> adj(num_vertices());
    for (int e = 0; e < num_edges(); ++e) {
        adj[edges_[e].u].push_back(edges_[e].v);
        adj[edges_[e].v].push_back(edges_[e].u);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                q.push(w);
            }
    }
    return count == num_vertices();
}

int CombinatorialMap::euler_genus() const {
    trace();
    if (!connected())
        throw InputError("euler_genus requires a connected map");
    return 2 - num_vertices() + num_edges() - num_faces();
}

std::optional<std::vector<char>> CombinatorialMap::orientation_flips() const {
    std::vector<char> flip(num_vertices(), -1);
    std::vector<std::vector<std::pair<int, int>>> adj(num_vertices());
    for (int e = 0; e < num_edges(); ++e) {
        if (edges_[e].u == edges_[e].v) {
            if (edges_[e].twisted) return std::nullopt;  // twisted loop
            continue;
        }
        adj[edges_[e].u].push_back({edges_[e].v, edges_[e].twisted ? 1 : 0});
        adj[edges_[e].v].push_back({edges_[e].u, edges_[e].twisted ? 1 : 0});
    }
    for (int s = 0; s < num_vertices(); ++s) {
        if (flip[s] >= 0) continue;
        flip[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (auto [w, t] : adj[v]) {
                char want = flip[v] ^ t;
                if (flip[w] < 0) {
                    flip[w] = want;
                    q.push(w);
                } else if (flip[w] != want) {
                    return std::nullopt;
                }
            }
        }
    }
    return flip;
}

bool CombinatorialMap::orientable() const { return orientation_flips().has_value(); }

CutResult cut_along(const CombinatorialMap& m, const std::vector<int>& walk) {
    if (walk.empty()) throw InputError("cut_along: empty walk");
    std::set<int> walk_edges;
    std::set<int> walk_vertices;
    for (size_t i = 0; i < walk.size(); ++i) {
        int d = walk[i];
        if (!walk_edges.insert(d >> 1).second)
            throw InputError("cut_along: walk repeats an edge");
        if (!walk_vertices.insert(m.tail(d)).second)
            throw InputError("cut_along: walk repeats a vertex");
        if (m.head(d) != m.tail(walk[(i + 1) % walk.size()]))
            throw InputError("cut_along: walk is not closed");
    }

    // Left/right slots while carrying twist parity along the walk.
    std::vector<std::pair<int, int>> left_slots, right_slots;
    int side = 0;
    for (int d : walk) {
        const auto& e = m.edge(d >> 1);
        int sl = (d & 1) ? (side ^ 1 ^ (e.twisted ? 1 : 0)) : side;
        left_slots.push_back({d >> 1, sl});
        right_slots.push_back({d >> 1, sl ^ 1});
        side ^= e.twisted ? 1 : 0;
    }

    // Union faces across non-walk edges.
    int nf = m.num_faces();
    std::vector<int> parent(nf);
    for (int i = 0; i < nf; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int e = 0; e < m.num_edges(); ++e) {
        if (walk_edges.count(e)) continue;
        int a = find(m.face_of_slot(e, 0)), b = find(m.face_of_slot(e, 1));
        parent[a] = b;
    }

    std::set<int> left_roots, right_roots;
    for (auto [e, s] : left_slots) left_roots.insert(find(m.face_of_slot(e, s)));
    for (auto [e, s] : right_slots) right_roots.insert(find(m.face_of_slot(e, s)));

    CutResult out;
    for (int r : left_roots)
        if (right_roots.count(r)) return out;  // one-sided or non-separating
    out.two_sided = true;

    std::vector<int> face_side(nf, 0);  // 0 unknown, 1 left, 2 right
    for (int f = 0; f < nf; ++f) {
        int r = find(f);
        if (left_roots.count(r)) face_side[f] = 1;
        else if (right_roots.count(r)) face_side[f] = 2;
    }
    // Faces in neither flood touch no walk slot; they belong to whichever
    // side their component was merged into — unreachable components can
    // appear only if the map is disconnected, which we reject.
    for (int f = 0; f < nf; ++f) {
        if (face_side[f] == 1) out.left_faces.push_back(f);
        if (face_side[f] == 2) out.right_faces.push_back(f);
    }

    auto analyze = [&](const std::vector<int>& faces, std::set<int>& inner, bool& disk,
                       const std::set<int>& roots) {
        std::set<int> fset(faces.begin(), faces.end());
        // Inner vertices: off the walk, with an incident corner face inside.
        for (int v = 0; v < m.num_vertices(); ++v) {
            if (walk_vertices.count(v)) continue;
            bool in = false;
            for (int c = 0; c < static_cast<int>(m.rotation(v).size()); ++c)
                if (fset.count(m.face_at_corner(v, c))) in = true;
            if (in) inner.insert(v);
        }
        int e_in = 0;
        for (int e = 0; e < m.num_edges(); ++e) {
            if (walk_edges.count(e)) continue;
            if (fset.count(m.face_of_slot(e, 0))) ++e_in;
        }
        int vprime = static_cast<int>(inner.size() + walk_vertices.size());
        int eprime = e_in + static_cast<int>(walk_edges.size());
        int chi = vprime - eprime + static_cast<int>(faces.size());
        disk = (roots.size() == 1) && (chi == 1);
    };
    analyze(out.left_faces, out.left_inner_vertices, out.left_is_disk, left_roots);
    analyze(out.right_faces, out.right_inner_vertices, out.right_is_disk, right_roots);
    return out;
}

}  // namespace walloid

#include "walloid/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace walloid {

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::map<Vertex, int> ranking;
    int r = 1;
    for (Vertex v : vertices) ranking[v] = r++;
    *this = Graph(std::move(vertices), std::move(edges), std::move(ranking));
}

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
             std::map<Vertex, int> ranking)
    : verts_(std::move(vertices)), ranking_(std::move(ranking)) {
    std::sort(verts_.begin(), verts_.end());
    verts_.erase(std::unique(verts_.begin(), verts_.end()), verts_.end());
    for (int i = 0; i < static_cast<int>(verts_.size()); ++i) index_[verts_[i]] = i;

    for (Edge& e : edges) e = make_edge(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adj_.resize(verts_.size());
    for (const Edge& e : edges_) {
        if (!has_vertex(e.first) || !has_vertex(e.second))
            throw InputError("edge references unknown vertex");
        adj_[index_.at(e.first)].push_back(e.second);
        adj_[index_.at(e.second)].push_back(e.first);
    }
    for (auto& ns : adj_) std::sort(ns.begin(), ns.end());

    if (ranking_.size() != verts_.size())
        throw InputError("ranking does not cover the vertex set");
    std::vector<char> seen(verts_.size() + 1, 0);
    for (const auto& [v, r] : ranking_) {
        if (!has_vertex(v)) throw InputError("ranking references unknown vertex");
        if (r < 1 || r > num_vertices() || seen[r])
            throw InputError("ranking is not a bijection onto 1..n");
        seen[r] = 1;
    }
}

bool Graph::has_edge(Vertex a, Vertex b) const {
    if (!has_vertex(a) || !has_vertex(b) || a == b) return false;
    const auto& ns = adj_[index_.at(a)];
    return std::binary_search(ns.begin(), ns.end(), b);
}

int Graph::index_of(Vertex v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw InputError("unknown vertex id " + std::to_string(v));
    return it->second;
}

const std::vector<Vertex>& Graph::neighbors(Vertex v) const {
    return adj_[index_of(v)];
}

int Graph::rank(Vertex v) const {
    auto it = ranking_.find(v);
    if (it == ranking_.end()) throw InputError("unknown vertex id " + std::to_string(v));
    return it->second;
}

Graph Graph::with_edge(Vertex a, Vertex b) const {
    auto es = edges_;
    es.push_back(make_edge(a, b));
    return Graph(verts_, std::move(es), ranking_);
}

Graph Graph::without_vertices(const std::set<Vertex>& drop) const {
    std::set<Vertex> keep(verts_.begin(), verts_.end());
    for (Vertex v : drop) keep.erase(v);
    return induced(keep);
}

Graph Graph::induced(const std::set<Vertex>& keep) const {
    std::vector<Vertex> vs(keep.begin(), keep.end());
    for (Vertex v : vs)
        if (!has_vertex(v)) throw InputError("induced: unknown vertex");
    std::vector<Edge> es;
    for (const Edge& e : edges_)
        if (keep.count(e.first) && keep.count(e.second)) es.push_back(e);
    std::map<Vertex, int> rk;
    std::vector<std::pair<int, Vertex>> order;
    for (Vertex v : vs) order.emplace_back(rank(v), v);
    std::sort(order.begin(), order.end());
    int r = 1;
    for (auto& [_, v] : order) rk[v] = r++;
    return Graph(std::move(vs), std::move(es), std::move(rk));
}

Graph Graph::subgraph(const std::set<Vertex>& vs, const std::vector<Edge>& es) const {
    std::set<Vertex> all(vs);
    for (const Edge& e : es) {
        all.insert(e.first);
        all.insert(e.second);
    }
    for (Vertex v : all)
        if (!has_vertex(v)) throw InputError("subgraph: unknown vertex");
    for (const Edge& e : es)
        if (!has_edge(e.first, e.second)) throw InputError("subgraph: unknown edge");
    std::vector<Vertex> vlist(all.begin(), all.end());
    std::map<Vertex, int> rk;
    std::vector<std::pair<int, Vertex>> order;
    for (Vertex v : vlist) order.emplace_back(rank(v), v);
    std::sort(order.begin(), order.end());
    int r = 1;
    for (auto& [_, v] : order) rk[v] = r++;
    return Graph(std::move(vlist), es, std::move(rk));
}

std::vector<std::vector<Vertex>> Graph::components() const {
    std::vector<std::vector<Vertex>> comps;
    std::vector<char> seen(verts_.size(), 0);
    for (int s = 0; s < static_cast<int>(verts_.size()); ++s) {
        if (seen[s]) continue;
        std::vector<Vertex> comp;
        std::queue<int> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            comp.push_back(verts_[i]);
            for (Vertex w : adj_[i]) {
                int j = index_.at(w);
                if (!seen[j]) {
                    seen[j] = 1;
                    q.push(j);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

bool Graph::is_connected() const {
    return num_vertices() <= 1 || components().size() == 1;
}

void ExtendedGraph::check() const {
    for (const auto& he : hyperedges)
        for (Vertex v : he)
            if (!base.has_vertex(v))
                throw InputError("hyperedge references unknown vertex");
}

int Separation::order() const {
    int n = 0;
    for (Vertex v : a)
        if (b.count(v)) ++n;
    return n;
}

bool Separation::valid_for(const Graph& g) const {
    for (Vertex v : g.vertices())
        if (!a.count(v) && !b.count(v)) return false;
    for (const Edge& e : g.edges()) {
        bool ua = a.count(e.first) && !b.count(e.first);
        bool vb = b.count(e.second) && !a.count(e.second);
        bool ub = b.count(e.first) && !a.count(e.first);
        bool va = a.count(e.second) && !b.count(e.second);
        if ((ua && vb) || (ub && va)) return false;
    }
    return true;
}

std::set<Vertex> Linkage::vertex_set() const {
    std::set<Vertex> out;
    for (const auto& p : paths) out.insert(p.begin(), p.end());
    return out;
}

bool Linkage::disjoint() const {
    std::set<Vertex> seen;
    for (const auto& p : paths) {
        std::set<Vertex> here(p.begin(), p.end());
        if (here.size() != p.size()) return false;
        for (Vertex v : here)
            if (!seen.insert(v).second) return false;
    }
    return true;
}

bool Linkage::paths_in(const Graph& g) const {
    for (const auto& p : paths) {
        if (p.empty()) return false;
        for (size_t i = 0; i + 1 < p.size(); ++i)
            if (!g.has_edge(p[i], p[i + 1])) return false;
    }
    return true;
}

namespace {

// Unit-vertex-capacity flow network: vertex v splits into v_in (2i) and
// v_out (2i+1). Augmentation order is by ranking, so extracted linkages
// are reproducible.
struct FlowNet {
    struct Arc {
        int to;
        int cap;
        int rev;
    };
    std::vector<std::vector<Arc>> arcs;
    int source, sink;

    explicit FlowNet(int nodes) : arcs(nodes) {}

    void add(int from, int to, int cap) {
        arcs[from].push_back({to, cap, static_cast<int>(arcs[to].size())});
        arcs[to].push_back({from, 0, static_cast<int>(arcs[from].size()) - 1});
    }
};

bool augment(FlowNet& net, int u, std::vector<char>& seen) {
    if (u == net.sink) return true;
    seen[u] = 1;
    for (auto& arc : net.arcs[u]) {
        if (arc.cap > 0 && !seen[arc.to] && augment(net, arc.to, seen)) {
            arc.cap--;
            net.arcs[arc.to][arc.rev].cap++;
            return true;
        }
    }
    return false;
}

FlowNet build_net(const Graph& g, const std::set<Vertex>& a, const std::set<Vertex>& b) {
    for (Vertex v : a)
        if (!g.has_vertex(v)) throw InputError("disjoint_paths: unknown vertex in A");
    for (Vertex v : b)
        if (!g.has_vertex(v)) throw InputError("disjoint_paths: unknown vertex in B");
    int n = g.num_vertices();
    FlowNet net(2 * n + 2);
    net.source = 2 * n;
    net.sink = 2 * n + 1;
    // Deterministic arc order: vertices by ranking, neighbors by ranking.
    std::vector<Vertex> by_rank = g.vertices();
    std::sort(by_rank.begin(), by_rank.end(),
              [&](Vertex x, Vertex y) { return g.rank(x) < g.rank(y); });
    for (Vertex v : by_rank) {
        int i = g.index_of(v);
        net.add(2 * i, 2 * i + 1, 1);
        if (a.count(v)) net.add(net.source, 2 * i, 1);
        if (b.count(v)) net.add(2 * i + 1, net.sink, 1);
    }
    for (Vertex v : by_rank) {
        int i = g.index_of(v);
        std::vector<Vertex> ns = g.neighbors(v);
        std::sort(ns.begin(), ns.end(),
                  [&](Vertex x, Vertex y) { return g.rank(x) < g.rank(y); });
        for (Vertex w : ns) net.add(2 * i + 1, 2 * g.index_of(w), 1);
    }
    return net;
}

}  // namespace

int max_disjoint_paths(const Graph& g, const std::set<Vertex>& a,
                       const std::set<Vertex>& b) {
    FlowNet net = build_net(g, a, b);
    int flow = 0;
    while (true) {
        std::vector<char> seen(net.arcs.size(), 0);
        if (!augment(net, net.source, seen)) break;
        ++flow;
    }
    return flow;
}

std::optional<Linkage> disjoint_paths(const Graph& g, const std::set<Vertex>& a,
                                      const std::set<Vertex>& b, int k) {
    if (k < 1) throw InputError("disjoint_paths: k must be >= 1");
    FlowNet net = build_net(g, a, b);
    int flow = 0;
    while (flow < k) {
        std::vector<char> seen(net.arcs.size(), 0);
        if (!augment(net, net.source, seen)) break;
        ++flow;
    }
    if (flow < k) return std::nullopt;

    // Decompose the flow into vertex sequences.
    Linkage out;
    for (const auto& arc : net.arcs[net.source]) {
        if (arc.cap != 0) continue;  // unused source arc
        std::vector<Vertex> path;
        int u = arc.to;  // some v_in
        while (u != net.sink) {
            if (u % 2 == 0) path.push_back(g.vertex_at(u / 2));
            int next = -1;
            for (auto& e : net.arcs[u]) {
                // Saturated forward arc: cap 0 on an arc we created with cap 1.
                if (e.cap == 0 && net.arcs[e.to][e.rev].cap == 1 && e.to != net.source) {
                    next = e.to;
                    // Consume so a later path cannot reuse it.
                    e.cap = -1;
                    break;
                }
            }
            if (next < 0) throw IntegrityError("flow decomposition lost its way");
            u = next;
        }
        out.paths.push_back(std::move(path));
        if (out.order() == k) break;
    }
    if (out.order() != k) throw IntegrityError("flow decomposition path count mismatch");

    // Trim each path to its last A-vertex .. first B-vertex after it, so
    // paths are internally disjoint from A ∪ B.
    for (auto& p : out.paths) {
        int last_a = 0;
        for (int i = 0; i < static_cast<int>(p.size()); ++i)
            if (a.count(p[i])) last_a = i;
        int first_b = -1;
        for (int i = last_a; i < static_cast<int>(p.size()); ++i)
            if (b.count(p[i])) {
                first_b = i;
                break;
            }
        if (first_b < 0) throw IntegrityError("flow path misses B");
        p = std::vector<Vertex>(p.begin() + last_a, p.begin() + first_b + 1);
    }
    if (!out.disjoint() || !out.paths_in(g))
        throw IntegrityError("extracted linkage is not a linkage");
    return out;
}

bool is_minor_model(const Graph& host, const MinorModel& model) {
    std::set<Vertex> pat(model.pattern.vertices().begin(), model.pattern.vertices().end());
    for (const auto& [pv, bs] : model.branch) {
        if (!pat.count(pv)) throw InputError("branch map keys must be pattern vertices");
        for (Vertex hv : bs)
            if (!host.has_vertex(hv))
                throw InputError("branch set references unknown host vertex");
    }
    for (Vertex pv : model.pattern.vertices())
        if (!model.branch.count(pv) || model.branch.at(pv).empty()) return false;

    std::set<Vertex> used;
    for (const auto& [pv, bs] : model.branch) {
        for (Vertex hv : bs)
            if (!used.insert(hv).second) return false;  // overlap
        if (!host.induced(bs).is_connected()) return false;
    }
    for (const Edge& e : model.pattern.edges()) {
        const auto& bu = model.branch.at(e.first);
        const auto& bv = model.branch.at(e.second);
        bool found = false;
        for (Vertex x : bu) {
            for (Vertex y : host.neighbors(x))
                if (bv.count(y)) {
                    found = true;
                    break;
                }
            if (found) break;
        }
        if (!found) return false;
    }
    return true;
}

std::vector<Separation> enumerate_separations(const Graph& g, int k, int vertex_cap) {
    if (g.num_vertices() > vertex_cap)
        throw RefusalError("separation enumeration capped at " +
                           std::to_string(vertex_cap) + " vertices (got " +
                           std::to_string(g.num_vertices()) + ")");
    const auto& vs = g.vertices();
    int n = static_cast<int>(vs.size());
    std::vector<Separation> out;
    std::vector<int> sep;

    std::function<void(int)> rec = [&](int start) {
        // Current separator S = {vs[i] : i in sep}; split components of G - S.
        std::set<Vertex> s;
        for (int i : sep) s.insert(vs[i]);
        Graph rest = g.without_vertices(s);
        auto comps = rest.components();
        int c = static_cast<int>(comps.size());
        if (c <= 60) {  // guard; desk-scale graphs stay tiny
            for (uint64_t mask = 0; mask < (1ULL << c); ++mask) {
                Separation sp;
                sp.a = s;
                sp.b = s;
                for (int i = 0; i < c; ++i) {
                    auto& side = (mask >> i & 1) ? sp.a : sp.b;
                    side.insert(comps[i].begin(), comps[i].end());
                }
                // Only keep (A, B) whose separator is exactly S, otherwise the
                // same separation is produced again for a smaller S.
                if (sp.order() == static_cast<int>(s.size())) out.push_back(std::move(sp));
            }
        } else {
            throw RefusalError("separation enumeration: too many components");
        }
        if (static_cast<int>(sep.size()) + 1 <= k - 1) {
            for (int i = start; i < n; ++i) {
                sep.push_back(i);
                rec(i + 1);
                sep.pop_back();
            }
        }
    };
    rec(0);
    return out;
}

namespace {

// Multigraph on branch vertices obtained by suppressing degree-2 vertices.
struct Suppressed {
    std::vector<Vertex> branch;                              // degree != 2 vertices
    // Each suppressed edge: endpoints plus the full vertex path in h.
    std::vector<std::pair<Edge, std::vector<Vertex>>> paths;
    std::vector<std::vector<Vertex>> pure_cycles;            // all-degree-2 components
    bool has_loop = false;
};

Suppressed suppress(const Graph& h) {
    Suppressed s;
    for (Vertex v : h.vertices())
        if (h.degree(v) != 2) s.branch.push_back(v);
    std::set<Vertex> branch_set(s.branch.begin(), s.branch.end());
    std::set<std::pair<Vertex, Vertex>> used;  // directed first step from a branch vertex

    for (Vertex b : s.branch) {
        for (Vertex w : h.neighbors(b)) {
            if (used.count({b, w})) continue;
            std::vector<Vertex> path{b, w};
            Vertex prev = b, cur = w;
            while (!branch_set.count(cur)) {
                const auto& ns = h.neighbors(cur);
                Vertex nxt = (ns[0] == prev) ? ns[1] : ns[0];
                path.push_back(nxt);
                prev = cur;
                cur = nxt;
            }
            used.insert({b, w});
            used.insert({cur, prev});
            if (path.front() == path.back()) {
                s.has_loop = true;
            } else {
                s.paths.push_back({{path.front(), path.back()}, path});
            }
        }
    }
    // All-degree-2 components are cycles.
    std::set<Vertex> on_path;
    for (auto& [e, p] : s.paths) on_path.insert(p.begin(), p.end());
    for (const auto& comp : h.components()) {
        bool all2 = true;
        for (Vertex v : comp)
            if (h.degree(v) != 2) all2 = false;
        if (all2 && !comp.empty()) s.pure_cycles.push_back(comp);
    }
    return s;
}

}  // namespace

std::optional<SubdivisionWitness> is_subdivision(const Graph& h, const Graph& g) {
    for (Vertex v : g.vertices())
        if (g.degree(v) > 3) throw InputError("is_subdivision: pattern max degree must be <= 3");

    Suppressed s = suppress(h);
    if (s.has_loop) return std::nullopt;  // g is simple

    // Separate pure cycles: they must match cycle components of g with
    // length at most the subdivided cycle's length.
    std::vector<std::vector<Vertex>> g_cycles;
    std::vector<Vertex> g_rest_verts;
    std::set<Vertex> g_cycle_verts;
    for (const auto& comp : g.components()) {
        bool all2 = !comp.empty();
        for (Vertex v : comp)
            if (g.degree(v) != 2) all2 = false;
        if (all2) {
            g_cycles.push_back(comp);
            g_cycle_verts.insert(comp.begin(), comp.end());
        }
    }
    if (g_cycles.size() != s.pure_cycles.size()) return std::nullopt;
    std::sort(g_cycles.begin(), g_cycles.end(),
              [](auto& a, auto& b) { return a.size() < b.size(); });
    std::sort(s.pure_cycles.begin(), s.pure_cycles.end(),
              [](auto& a, auto& b) { return a.size() < b.size(); });
    // Greedy match by size (a cycle subdivides to any longer cycle).
    std::vector<char> taken(s.pure_cycles.size(), 0);
    std::vector<std::pair<int, int>> cycle_match;
    for (int i = static_cast<int>(g_cycles.size()) - 1; i >= 0; --i) {
        int pick = -1;
        for (int j = static_cast<int>(s.pure_cycles.size()) - 1; j >= 0; --j)
            if (!taken[j] && s.pure_cycles[j].size() >= g_cycles[i].size()) {
                pick = j;
                break;
            }
        if (pick < 0) return std::nullopt;
        taken[pick] = 1;
        cycle_match.push_back({i, pick});
    }

    // Remaining structure: match branch vertices by backtracking.
    std::vector<Vertex> g_branch;
    for (Vertex v : g.vertices())
        if (!g_cycle_verts.count(v)) g_branch.push_back(v);
    if (g_branch.size() != s.branch.size()) return std::nullopt;

    // Multiplicity maps between branch vertices.
    std::map<Edge, int> h_mult;
    std::map<Edge, std::vector<const std::vector<Vertex>*>> h_paths_by_pair;
    for (auto& [e, p] : s.paths) {
        Edge key = make_edge(e.first, e.second);
        h_mult[key]++;
        h_paths_by_pair[key].push_back(&p);
    }
    std::map<Edge, int> g_mult;
    for (const Edge& e : g.edges())
        if (!g_cycle_verts.count(e.first)) g_mult[e]++;
    {
        // Degree-profile quick reject.
        int total_g = 0, total_h = 0;
        for (auto& [e, m] : g_mult) total_g += m;
        for (auto& [e, m] : h_mult) total_h += m;
        if (total_g != total_h) return std::nullopt;
    }

    std::sort(g_branch.begin(), g_branch.end(), [&](Vertex a, Vertex b) {
        return g.degree(a) > g.degree(b);
    });
    std::map<Vertex, Vertex> assign;   // g branch -> h branch
    std::set<Vertex> used_h;

    std::function<bool(size_t)> match = [&](size_t i) -> bool {
        if (i == g_branch.size()) {
            // Verify multiplicities of every g pair.
            std::map<Edge, int> need;
            for (auto& [e, m] : g_mult)
                need[make_edge(assign.at(e.first), assign.at(e.second))] += m;
            return need == h_mult;
        }
        Vertex gv = g_branch[i];
        for (Vertex hv : s.branch) {
            if (used_h.count(hv)) continue;
            if (h.degree(hv) != g.degree(gv)) continue;
            bool ok = true;
            for (Vertex gw : g.neighbors(gv)) {
                if (!assign.count(gw)) continue;
                Edge key = make_edge(hv, assign.at(gw));
                if (!h_mult.count(key)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            assign[gv] = hv;
            used_h.insert(hv);
            if (match(i + 1)) return true;
            assign.erase(gv);
            used_h.erase(hv);
        }
        return false;
    };
    if (!match(0)) return std::nullopt;

    SubdivisionWitness w;
    w.branch = assign;
    std::map<Edge, int> consumed;
    for (auto& [e, m] : g_mult) {
        (void)m;
    }
    for (const Edge& ge : g.edges()) {
        if (g_cycle_verts.count(ge.first)) continue;
        Edge key = make_edge(assign.at(ge.first), assign.at(ge.second));
        auto& pool = h_paths_by_pair.at(key);
        int idx = consumed[key]++;
        if (idx >= static_cast<int>(pool.size()))
            throw IntegrityError("subdivision witness bookkeeping");
        std::vector<Vertex> path = *pool[idx];
        if (path.front() != assign.at(ge.first)) std::reverse(path.begin(), path.end());
        w.edge_paths[ge] = std::move(path);
    }
    for (auto& [gi, hi] : cycle_match) {
        // Map one cycle vertex and walk both cycles in parallel.
        const auto& gc = g_cycles[gi];
        const auto& hc = s.pure_cycles[hi];
        // Walk g cycle in order.
        std::vector<Vertex> gseq;
        {
            Vertex start = gc[0], prev = -1, cur = start;
            do {
                gseq.push_back(cur);
                const auto& ns = g.neighbors(cur);
                Vertex nxt = (ns[0] == prev) ? ns[1] : ns[0];
                prev = cur;
                cur = nxt;
            } while (cur != start);
        }
        std::vector<Vertex> hseq;
        {
            Vertex start = hc[0], prev = -1, cur = start;
            do {
                hseq.push_back(cur);
                const auto& ns = h.neighbors(cur);
                Vertex nxt = (ns[0] == prev) ? ns[1] : ns[0];
                prev = cur;
                cur = nxt;
            } while (cur != start);
        }
        // Distribute: g cycle vertex i -> h position; edges get the spans.
        size_t m = gseq.size(), n2 = hseq.size();
        std::vector<size_t> pos(m + 1);
        for (size_t i = 0; i <= m; ++i) pos[i] = i < m ? (i * n2) / m : n2;
        // Force distinct positions (n2 >= m).
        for (size_t i = 1; i < m; ++i)
            if (pos[i] <= pos[i - 1]) pos[i] = pos[i - 1] + 1;
        for (size_t i = 0; i < m; ++i) w.branch[gseq[i]] = hseq[pos[i]];
        for (size_t i = 0; i < m; ++i) {
            std::vector<Vertex> path;
            for (size_t j = pos[i]; j != pos[(i + 1) % m == 0 ? 0 : i + 1];
                 j = (j + 1) % n2) {
                path.push_back(hseq[j]);
                if (path.size() > n2 + 1) throw IntegrityError("cycle walk diverged");
            }
            path.push_back(hseq[pos[(i + 1) % m]]);
            w.edge_paths[make_edge(gseq[i], gseq[(i + 1) % m])] = std::move(path);
        }
    }
    return w;
}

}  // namespace walloid

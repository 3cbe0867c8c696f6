#include "walloid/wall.hpp"

#include <algorithm>
#include <functional>

namespace walloid {

namespace {

// Direction keys for rotation construction, counterclockwise: E, N, W, S.
enum Dir { E = 0, N = 1, W = 2, S = 3 };

struct MapBuilder {
    CombinatorialMap map;
    std::vector<Vertex> vert_of;
    std::map<Vertex, int> index_of;
    // Per vertex: (direction, dart) pairs; rotation = sorted by direction.
    std::vector<std::vector<std::pair<int, int>>> slots;

    int touch(Vertex v) {
        auto it = index_of.find(v);
        if (it != index_of.end()) return it->second;
        int i = map.add_vertex();
        index_of[v] = i;
        vert_of.push_back(v);
        slots.emplace_back();
        return i;
    }

    void add(Vertex a, Vertex b, int dir_a, int dir_b, bool twisted = false) {
        int ia = touch(a), ib = touch(b);
        int e = map.add_edge(ia, ib, twisted);
        slots[ia].push_back({dir_a, 2 * e});
        slots[ib].push_back({dir_b, 2 * e + 1});
    }

    // A decoration path between two junctions; interior vertices must end
    // up with degree exactly two. The first edge optionally carries the
    // twist.
    void add_path(const Path& p, int dir_first, int dir_last, bool twisted = false) {
        if (p.size() < 2) throw InputError("map path too short");
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            int da = (i == 0) ? dir_first : E;          // interior: arbitrary
            int db = (i + 2 == p.size()) ? dir_last : W;
            add(p[i], p[i + 1], da, db, twisted && i == 0);
        }
    }

    void finish() {
        for (int v = 0; v < map.num_vertices(); ++v) {
            auto order = slots[v];
            std::stable_sort(order.begin(), order.end(),
                             [](auto& x, auto& y) { return x.first < y.first; });
            if (order.size() > 2) {
                for (size_t i = 1; i < order.size(); ++i)
                    if (order[i].first == order[i - 1].first)
                        throw IntegrityError(
                            "two darts share a direction at a junction (vertex " +
                            std::to_string(vert_of[v]) + ", dir " +
                            std::to_string(order[i].first) + ")");
            }
            std::vector<int> rot;
            for (auto& [d, dart] : order) rot.push_back(dart);
            map.set_rotation(v, rot);
        }
    }
};

// (R x 2W)-grid minus the parity matching. 1-based coordinates; returned
// ids are offset + (i-1)*2W + j.
struct SegGrid {
    int rows = 0, width2 = 0;  // width2 = 2 * vertical path count
    Vertex offset = 0;
    std::vector<Path> row_paths;
    std::vector<Path> col_paths;  // staircase verticals
    std::vector<Vertex> top_bd, bot_bd;
    std::vector<Vertex> left_bd, right_bd;
    std::vector<Edge> edges;

    Vertex id(int i, int j) const { return offset + (i - 1) * width2 + j; }
    static bool removed(int i, int j) {
        return (j % 2 == 1 && i % 2 == 1) || (j % 2 == 0 && i % 2 == 0);
    }
};

SegGrid build_seg_grid(int rows, int width, Vertex offset) {
    SegGrid g;
    g.rows = rows;
    g.width2 = 2 * width;
    g.offset = offset;
    for (int i = 1; i <= rows; ++i) {
        Path row;
        for (int j = 1; j <= g.width2; ++j) {
            row.push_back(g.id(i, j));
            if (j < g.width2) g.edges.push_back({g.id(i, j), g.id(i, j + 1)});
            if (i < rows && !SegGrid::removed(i, j))
                g.edges.push_back({g.id(i, j), g.id(i + 1, j)});
        }
        g.row_paths.push_back(std::move(row));
        g.left_bd.push_back(g.id(i, 1));
        g.right_bd.push_back(g.id(i, g.width2));
    }
    // Boundary vertices: incident to removed matching edges on the top and
    // bottom rows.
    for (int j = 1; j <= g.width2; ++j) {
        if (SegGrid::removed(1, j)) g.top_bd.push_back(g.id(1, j));
        if (SegGrid::removed(rows - 1, j)) g.bot_bd.push_back(g.id(rows, j));
    }
    // Vertical staircases: band of columns {2k-1, 2k}, ending on the
    // band's bottom boundary vertex.
    for (int k = 1; k <= width; ++k) {
        Path q;
        int c = 2 * k - 1;
        q.push_back(g.id(1, c));
        for (int i = 1; i < rows; ++i) {
            if (SegGrid::removed(i, c)) {
                int c2 = (c == 2 * k - 1) ? 2 * k : 2 * k - 1;
                q.push_back(g.id(i, c2));
                c = c2;
            }
            q.push_back(g.id(i + 1, c));
        }
        int cstar = SegGrid::removed(rows - 1, 2 * k - 1) ? 2 * k - 1 : 2 * k;
        if (c != cstar) q.push_back(g.id(rows, cstar));
        g.col_paths.push_back(std::move(q));
    }
    return g;
}

void build_wall_map(WallHandle& w) {
    MapBuilder mb;
    std::set<Edge> row_edges;
    for (const auto& row : w.rows)
        for (size_t i = 0; i + 1 < row.size(); ++i)
            row_edges.insert(make_edge(row[i], row[i + 1]));
    if (w.annulus)
        for (const auto& row : w.rows)
            row_edges.insert(make_edge(row.front(), row.back()));
    for (const auto& row : w.rows) {
        for (size_t i = 0; i + 1 < row.size(); ++i) mb.add(row[i], row[i + 1], E, W);
        if (w.annulus) mb.add(row.back(), row.front(), E, W);
    }
    std::set<Edge> seen = row_edges;
    for (const auto& col : w.cols)
        for (size_t i = 0; i + 1 < col.size(); ++i) {
            Edge e = make_edge(col[i], col[i + 1]);
            if (seen.insert(e).second) mb.add(col[i], col[i + 1], S, N);
        }
    mb.finish();
    w.skel = std::move(mb.map);
    w.skel_vertex = std::move(mb.vert_of);
    w.skel_index = std::move(mb.index_of);
    w.edges_.clear();
    for (int e = 0; e < w.skel.num_edges(); ++e)
        w.edges_.insert(make_edge(w.skel_vertex[w.skel.edge(e).u],
                                  w.skel_vertex[w.skel.edge(e).v]));
    // Outer face: largest boundary walk.
    int best = -1, best_len = -1;
    for (int f = 0; f < w.skel.num_faces(); ++f)
        if (w.skel.face_degree(f) > best_len) {
            best_len = w.skel.face_degree(f);
            best = f;
        }
    w.outer_face = best;
}

}  // namespace

GridHandle elementary_grid(int n, int m) {
    if (n < 1 || m < 1) throw InputError("grid dimensions must be positive");
    GridHandle g;
    g.n = n;
    g.m = m;
    auto id = [m](int i, int j) { return static_cast<Vertex>((i - 1) * m + j); };
    std::vector<Vertex> vs;
    std::vector<Edge> es;
    for (int i = 1; i <= n; ++i) {
        Path row;
        for (int j = 1; j <= m; ++j) {
            vs.push_back(id(i, j));
            row.push_back(id(i, j));
            if (j < m) es.push_back({id(i, j), id(i, j + 1)});
            if (i < n) es.push_back({id(i, j), id(i + 1, j)});
        }
        g.row_paths.push_back(std::move(row));
    }
    for (int j = 1; j <= m; ++j) {
        Path col;
        for (int i = 1; i <= n; ++i) col.push_back(id(i, j));
        g.column_paths.push_back(std::move(col));
    }
    g.host = Graph(vs, es);
    return g;
}

WallHandle elementary_wall_segment(int r, int t) {
    if (r < 3 || t < 3) throw InputError("wall segment needs r,t >= 3");
    SegGrid sg = build_seg_grid(r, t, 0);
    WallHandle w;
    w.kind = WallKind::WallSegment;
    w.r = r;
    w.t = t;
    w.rows = sg.row_paths;
    w.cols = sg.col_paths;
    w.top_bd = sg.top_bd;
    w.bot_bd = sg.bot_bd;
    w.left_bd = sg.left_bd;
    w.right_bd = sg.right_bd;
    std::vector<Vertex> vs;
    for (const auto& row : sg.row_paths) vs.insert(vs.end(), row.begin(), row.end());
    w.host = Graph(vs, sg.edges);
    build_wall_map(w);
    return w;
}

WallHandle elementary_wall(int t, int z) {
    if (t < 3 || z < 3) throw InputError("wall needs t,z >= 3");
    WallHandle seg = elementary_wall_segment(t, z);
    std::set<Vertex> drop;
    Graph g = seg.host;
    while (true) {
        std::set<Vertex> now;
        for (Vertex v : g.vertices())
            if (g.degree(v) <= 1) now.insert(v);
        if (now.empty()) break;
        drop.insert(now.begin(), now.end());
        std::set<Vertex> keep(g.vertices().begin(), g.vertices().end());
        for (Vertex v : now) keep.erase(v);
        g = g.induced(keep);
    }
    WallHandle w;
    w.kind = WallKind::Wall;
    w.r = t;
    w.t = z;
    w.host = g;
    auto strip = [&](const Path& p) {
        Path q;
        for (Vertex v : p)
            if (!drop.count(v)) q.push_back(v);
        return q;
    };
    for (const auto& row : seg.rows) w.rows.push_back(strip(row));
    for (const auto& col : seg.cols) w.cols.push_back(strip(col));
    for (Vertex v : seg.top_bd)
        if (!drop.count(v)) w.top_bd.push_back(v);
    for (Vertex v : seg.bot_bd)
        if (!drop.count(v)) w.bot_bd.push_back(v);
    build_wall_map(w);
    return w;
}

WallHandle elementary_annulus_wall(int r, int t) {
    WallHandle w = elementary_wall_segment(r, t);
    w.kind = WallKind::AnnulusWall;
    w.annulus = true;
    std::vector<Edge> es = w.host.edges();
    for (int i = 0; i < r; ++i) es.push_back(make_edge(w.left_bd[i], w.right_bd[i]));
    w.host = Graph(w.host.vertices(), es);
    build_wall_map(w);
    return w;
}

namespace {

SegmentHandle decorate_segment(SegKind kind, int r, int t, int arity, int s) {
    int width;
    switch (kind) {
        case SegKind::Wall: width = t; break;
        case SegKind::Handle:
        case SegKind::Crosscap: width = 4 * t; break;
        case SegKind::Flap: width = 2 * t + arity; break;
        case SegKind::Vortex: width = t; break;
        default: throw InputError("bad segment kind");
    }
    SegmentHandle h;
    h.kind = kind;
    h.t = t;
    h.arity = arity;
    h.s = s;
    h.base = elementary_wall_segment(r, width);

    Vertex next = static_cast<Vertex>(2 * r * width + 1);
    std::vector<Vertex> vs = h.base.host.vertices();
    std::vector<Edge> es = h.base.host.edges();
    const auto& tb = h.base.top_bd;

    if (kind == SegKind::Handle) {
        for (int i = 1; i <= t; ++i) {
            es.push_back(make_edge(tb[i - 1], tb[3 * t - i]));      // v_i u_{t-i+1}
            h.rainbow.push_back({tb[i - 1], tb[3 * t - i]});
            es.push_back(make_edge(tb[t + i - 1], tb[4 * t - i]));  // v'_i u'_{t-i+1}
            h.rainbow_right.push_back({tb[t + i - 1], tb[4 * t - i]});
        }
    } else if (kind == SegKind::Crosscap) {
        for (int i = 1; i <= 2 * t; ++i) {
            es.push_back(make_edge(tb[i - 1], tb[2 * t + i - 1]));  // v_i u_i
            h.rainbow.push_back({tb[i - 1], tb[2 * t + i - 1]});
        }
    } else if (kind == SegKind::Flap) {
        if (arity < 1 || arity > 3) throw InputError("flap arity must be in [3]");
        for (int i = 1; i <= t; ++i) {
            es.push_back(make_edge(tb[i - 1], tb[t + arity + t - i]));
            h.rainbow.push_back({tb[i - 1], tb[t + arity + t - i]});
        }
        for (int j = 1; j <= arity; ++j) {
            Vertex z = next++;
            vs.push_back(z);
            es.push_back(make_edge(tb[t + j - 1], z));
            h.pendants.push_back({tb[t + j - 1], z});
            h.hyperedge.push_back(z);
        }
    } else if (kind == SegKind::Vortex) {
        if (t < 4) throw InputError("vortex segment needs t >= 4");
        if (s < 1) throw InputError("vortex segment needs s >= 1");
        std::vector<std::vector<Vertex>> cyc(s + 2);
        for (int k = 0; k <= s + 1; ++k) {
            for (int i = 0; i < t; ++i) {
                cyc[k].push_back(next++);
                vs.push_back(cyc[k][i]);
            }
            for (int i = 0; i < t; ++i)
                es.push_back(make_edge(cyc[k][i], cyc[k][(i + 1) % t]));
        }
        for (int k = 0; k <= s + 1; ++k) h.nest.push_back(cyc[k]);
        for (int i = 0; i < t; ++i) {
            Path radial{tb[i]};
            for (int k = s + 1; k >= 0; --k) {
                es.push_back(make_edge(radial.back(), cyc[k][i]));
                radial.push_back(cyc[k][i]);
            }
            h.radial.push_back(std::move(radial));
        }
        h.hyperedge = cyc[0];
    }
    h.base.host = Graph(vs, es);
    return h;
}

}  // namespace

SegmentHandle elementary_handle_segment(int r, int t) {
    if (r < 3 || t < 3) throw InputError("handle segment needs r,t >= 3");
    return decorate_segment(SegKind::Handle, r, t, 0, 0);
}
SegmentHandle elementary_crosscap_segment(int r, int t) {
    if (r < 3 || t < 3) throw InputError("crosscap segment needs r,t >= 3");
    return decorate_segment(SegKind::Crosscap, r, t, 0, 0);
}
SegmentHandle elementary_flap_segment(int r, int t, int q) {
    if (r < 3 || t < 3) throw InputError("flap segment needs r,t >= 3");
    return decorate_segment(SegKind::Flap, r, t, q, 0);
}
SegmentHandle elementary_vortex_segment(int r, int t, int s) {
    if (r < 3) throw InputError("vortex segment needs r >= 3");
    return decorate_segment(SegKind::Vortex, r, t, 0, s);
}

LadderHandle elementary_ladder(int t) {
    if (t < 2) throw InputError("ladder needs t >= 2");
    LadderHandle l;
    l.t = t;
    std::vector<Vertex> vs;
    std::vector<Edge> es;
    auto id = [](int i, int j) { return static_cast<Vertex>(2 * (i - 1) + j); };
    for (int i = 1; i <= t; ++i) {
        vs.push_back(id(i, 1));
        vs.push_back(id(i, 2));
        es.push_back({id(i, 1), id(i, 2)});
        l.rungs.push_back({id(i, 1), id(i, 2)});
        if (i < t) {
            es.push_back({id(i, 1), id(i + 1, 1)});
            es.push_back({id(i, 2), id(i + 1, 2)});
        }
    }
    Path rail1, rail2;
    for (int i = 1; i <= t; ++i) {
        rail1.push_back(id(i, 1));
        rail2.push_back(id(i, 2));
    }
    l.rails = {rail1, rail2};
    l.host = Graph(vs, es);
    return l;
}

Graph concatenate(const std::vector<SegmentHandle>& segments) {
    if (segments.empty()) throw InputError("concatenate: no segments");
    int r = segments[0].base.r;
    std::vector<Vertex> vs;
    std::vector<Edge> es;
    Vertex offset = 0;
    std::vector<std::vector<Vertex>> lefts, rights;
    for (const auto& seg : segments) {
        if (seg.base.r != r) throw InputError("concatenate: row counts differ");
        Vertex maxid = 0;
        for (Vertex v : seg.base.host.vertices()) {
            vs.push_back(v + offset);
            maxid = std::max(maxid, v);
        }
        for (const Edge& e : seg.base.host.edges())
            es.push_back({e.first + offset, e.second + offset});
        std::vector<Vertex> lb, rb;
        for (Vertex v : seg.base.left_bd) lb.push_back(v + offset);
        for (Vertex v : seg.base.right_bd) rb.push_back(v + offset);
        lefts.push_back(lb);
        rights.push_back(rb);
        offset += maxid + 1;
    }
    for (size_t k = 0; k + 1 < segments.size(); ++k)
        for (int i = 0; i < r; ++i)
            es.push_back(make_edge(rights[k][i], lefts[k + 1][i]));
    return Graph(vs, es);
}

namespace {

WalloidHandle build_walloid(const WalloidShape& shape) {
    int r = shape.r, t = shape.t, h = shape.h, c = shape.c, s = shape.s;
    if (t < 3) throw InputError("walloid needs t >= 3");
    if (shape.vortices > 0 && t < 4) throw InputError("vortex segments need t >= 4");
    if (shape.vortices > 0 && s < 1) throw InputError("vortex segments need s >= 1");
    int R = r + t;
    if (R < 3) throw InputError("walloid needs r + t >= 3");

    struct SegPlan {
        SegKind kind;
        int width;
        int arity;
    };
    std::vector<SegPlan> plan;
    plan.push_back({SegKind::Wall, R, 0});
    for (int i = 0; i < h; ++i) plan.push_back({SegKind::Handle, 4 * t, 0});
    for (int i = 0; i < c; ++i) plan.push_back({SegKind::Crosscap, 4 * t, 0});
    for (int q : shape.flap_arities) {
        if (q < 1 || q > 3) throw InputError("flap arity must be in [3]");
        plan.push_back({SegKind::Flap, 2 * t + q, q});
    }
    for (int i = 0; i < shape.vortices; ++i) plan.push_back({SegKind::Vortex, t, 0});

    WalloidHandle w;
    w.r = r;
    w.t = t;
    w.s = s;
    w.h = h;
    w.c = c;

    std::vector<Vertex> vs;
    std::vector<Edge> es;
    std::vector<SegGrid> grids;
    Vertex offset = 0;
    for (const auto& p : plan) {
        SegGrid g = build_seg_grid(R, p.width, offset);
        offset += static_cast<Vertex>(R * g.width2);
        for (int i = 1; i <= R; ++i)
            for (int j = 1; j <= g.width2; ++j) vs.push_back(g.id(i, j));
        es.insert(es.end(), g.edges.begin(), g.edges.end());
        grids.push_back(std::move(g));
    }
    Vertex next = offset + 1;

    int nseg = static_cast<int>(plan.size());
    std::vector<std::vector<Edge>> seam(nseg);
    for (int k = 0; k < nseg; ++k) {
        const SegGrid& a = grids[k];
        const SegGrid& b = grids[(k + 1) % nseg];
        for (int i = 0; i < R; ++i) {
            Edge e = make_edge(a.right_bd[i], b.left_bd[i]);
            seam[k].push_back(e);
            es.push_back(e);
        }
    }

    for (int k = 0; k < nseg; ++k) {
        const SegGrid& g = grids[k];
        WalloidSegmentRole role;
        role.kind = plan[k].kind;
        role.width = plan[k].width;
        role.arity = plan[k].arity;
        role.cols = g.col_paths;
        role.top_bd = g.top_bd;
        const auto& tb = g.top_bd;
        switch (plan[k].kind) {
            case SegKind::Wall:
                break;
            case SegKind::Handle:
                for (int i = 1; i <= t; ++i) {
                    role.rainbow.push_back({tb[i - 1], tb[3 * t - i]});
                    role.rainbow_right.push_back({tb[t + i - 1], tb[4 * t - i]});
                }
                break;
            case SegKind::Crosscap:
                for (int i = 1; i <= 2 * t; ++i)
                    role.rainbow.push_back({tb[i - 1], tb[2 * t + i - 1]});
                break;
            case SegKind::Flap: {
                int q = plan[k].arity;
                for (int i = 1; i <= t; ++i)
                    role.rainbow.push_back({tb[i - 1], tb[t + q + t - i]});
                for (int j = 1; j <= q; ++j) {
                    Vertex z = next++;
                    vs.push_back(z);
                    role.pendants.push_back({tb[t + j - 1], z});
                    role.hyperedge.push_back(z);
                }
                break;
            }
            case SegKind::Vortex: {
                std::vector<std::vector<Vertex>> cyc(s + 2);
                for (int kk = 0; kk <= s + 1; ++kk)
                    for (int i = 0; i < t; ++i) {
                        cyc[kk].push_back(next++);
                        vs.push_back(cyc[kk][i]);
                    }
                for (int kk = 0; kk <= s + 1; ++kk) role.nest.push_back(cyc[kk]);
                for (int i = 0; i < t; ++i) {
                    Path radial{tb[i]};
                    for (int kk = s + 1; kk >= 0; --kk) radial.push_back(cyc[kk][i]);
                    role.radial.push_back(std::move(radial));
                }
                role.hyperedge = cyc[0];
                break;
            }
        }
        auto add_path_edges = [&](const std::vector<Path>& paths) {
            for (const auto& p : paths)
                for (size_t i = 0; i + 1 < p.size(); ++i)
                    es.push_back(make_edge(p[i], p[i + 1]));
        };
        add_path_edges(role.rainbow);
        add_path_edges(role.rainbow_right);
        add_path_edges(role.pendants);
        add_path_edges(role.radial);
        for (const auto& cyc : role.nest)
            for (size_t i = 0; i < cyc.size(); ++i)
                es.push_back(make_edge(cyc[i], cyc[(i + 1) % cyc.size()]));
        w.segments.push_back(std::move(role));
    }
    w.host = Graph(vs, es);

    for (int i = 1; i <= R; ++i) {
        Path cyc;
        for (int k = 0; k < nseg; ++k) {
            const SegGrid& g = grids[k];
            for (int j = 1; j <= g.width2; ++j) cyc.push_back(g.id(i, j));
        }
        w.base_cycles.push_back(std::move(cyc));
    }
    w.big_enclosure = w.base_cycles.front();
    w.simple_cycle = w.base_cycles.back();

    // Skeleton map.
    MapBuilder mb;
    for (const auto& cyc : w.base_cycles)
        for (size_t i = 0; i < cyc.size(); ++i)
            mb.add(cyc[i], cyc[(i + 1) % cyc.size()], E, W);
    for (const auto& role : w.segments) {
        for (const auto& col : role.cols)
            for (size_t i = 0; i + 1 < col.size(); ++i) {
                Vertex a = col[i], b = col[i + 1];
                if (b - a != 1 && a - b != 1) mb.add(a, b, S, N);
            }
        bool twist = role.kind == SegKind::Crosscap;
        for (const auto& p : role.rainbow) mb.add_path(p, N, N, twist);
        for (const auto& p : role.rainbow_right) mb.add_path(p, N, N, false);
        if (role.kind == SegKind::Vortex) {
            for (const auto& cyc : role.nest)
                for (size_t i = 0; i < cyc.size(); ++i)
                    mb.add(cyc[i], cyc[(i + 1) % cyc.size()], E, W);
            // Radial edges cross the nest at degree-4 junctions: each
            // inter-cycle stretch goes in separately, pointing inward.
            for (const auto& p : role.radial)
                for (size_t i = 0; i + 1 < p.size(); ++i) mb.add(p[i], p[i + 1], N, S);
        }
    }
    mb.finish();
    w.skel = std::move(mb.map);
    w.skel_vertex = std::move(mb.vert_of);
    w.skel_index = std::move(mb.index_of);

    // Simple face: unique face containing every bottom-cycle vertex.
    {
        std::set<int> want;
        for (Vertex v : w.simple_cycle) want.insert(w.skel_index.at(v));
        std::vector<int> hits;
        for (int f = 0; f < w.skel.num_faces(); ++f) {
            std::set<int> fv(w.skel.faces()[f].vertices.begin(),
                             w.skel.faces()[f].vertices.end());
            bool all = true;
            for (int v : want)
                if (!fv.count(v)) {
                    all = false;
                    break;
                }
            if (all) hits.push_back(f);
        }
        if (hits.size() != 1) throw IntegrityError("simple face not unique");
        w.simple_face = hits[0];
    }

    // Exceptional face: incident to the top-row seam edge of every seam,
    // different from the simple face and from the seam bricks.
    {
        auto edge_id = [&](const Edge& he) {
            for (int e = 0; e < w.skel.num_edges(); ++e)
                if (make_edge(w.skel_vertex[w.skel.edge(e).u],
                              w.skel_vertex[w.skel.edge(e).v]) == he)
                    return e;
            throw IntegrityError("seam edge missing from skeleton");
        };
        std::set<int> cand;
        int e0 = edge_id(seam[0][0]);
        cand.insert(w.skel.face_of_slot(e0, 0));
        cand.insert(w.skel.face_of_slot(e0, 1));
        std::set<Vertex> row2(w.base_cycles[1].begin(), w.base_cycles[1].end());
        int pick = -1;
        for (int f : cand) {
            if (f == w.simple_face) continue;
            std::set<int> fe;
            for (int d : w.skel.faces()[f].darts) fe.insert(d >> 1);
            bool all = true;
            for (int k = 0; k < nseg; ++k)
                if (!fe.count(edge_id(seam[k][0]))) all = false;
            // The seam brick below dips into the second base cycle; the
            // exceptional face never does.
            bool touches_row2 = false;
            for (int mv : w.skel.faces()[f].vertices)
                if (row2.count(w.skel_vertex[mv])) touches_row2 = true;
            if (all && !touches_row2) {
                if (pick >= 0) throw IntegrityError("exceptional face ambiguous");
                pick = f;
            }
        }
        if (pick < 0) throw IntegrityError("exceptional face not found");
        w.exceptional_face = pick;
    }

    // Enclosures.
    w.enclosures.push_back(w.big_enclosure);
    const Path& toprow = w.base_cycles[0];
    auto pos = [&](Vertex v) {
        return std::find(toprow.begin(), toprow.end(), v) - toprow.begin();
    };
    auto row_stretch = [&](Vertex from, Vertex to, Path& out) {
        auto i = pos(from), j = pos(to);
        for (auto k = i; k != j; k += (j > i ? 1 : -1)) out.push_back(toprow[k]);
    };
    for (const auto& role : w.segments) {
        if (role.kind == SegKind::Handle) {
            for (const auto* fam : {&role.rainbow, &role.rainbow_right}) {
                Path cycle;
                const Path& outer = fam->front();  // v_1 -> u_t
                const Path& inner = fam->back();   // v_t -> u_1
                row_stretch(outer.front(), inner.front(), cycle);  // v_1 .. v_t
                cycle.push_back(inner.front());
                for (size_t i = 1; i + 1 < inner.size(); ++i) cycle.push_back(inner[i]);
                row_stretch(inner.back(), outer.back(), cycle);  // u_1 .. u_t
                cycle.push_back(outer.back());
                for (size_t i = outer.size() - 2; i >= 1; --i) cycle.push_back(outer[i]);
                w.enclosures.push_back(cycle);
            }
        } else if (role.kind == SegKind::Crosscap) {
            Path cycle;
            const Path& first = role.rainbow.front();  // v_1 -> u_1
            const Path& last = role.rainbow.back();    // v_2t -> u_2t
            row_stretch(first.front(), last.front(), cycle);  // v_1 .. v_2t
            cycle.push_back(last.front());
            for (size_t i = 1; i + 1 < last.size(); ++i) cycle.push_back(last[i]);
            row_stretch(last.back(), first.back(), cycle);  // u_2t .. u_1
            cycle.push_back(first.back());
            for (size_t i = first.size() - 2; i >= 1; --i) cycle.push_back(first[i]);
            w.enclosures.push_back(cycle);
        }
    }
    return w;
}

}  // namespace

WalloidHandle elementary_walloid(const WalloidShape& shape) { return build_walloid(shape); }

WallHandle wall_from_paths(const Graph& host, std::vector<Path> rows,
                           std::vector<Path> cols, WallKind kind) {
    WallHandle w;
    w.kind = kind;
    w.annulus = kind == WallKind::AnnulusWall;
    w.r = static_cast<int>(rows.size());
    w.t = static_cast<int>(cols.size());
    w.rows = std::move(rows);
    w.cols = std::move(cols);
    std::set<Vertex> vs;
    std::vector<Edge> es;
    std::set<Edge> eset;
    auto add = [&](const Path& p, bool cyclic) {
        vs.insert(p.begin(), p.end());
        size_t m = p.size() - (cyclic ? 0 : 1);
        for (size_t i = 0; i < m; ++i) {
            Edge e = make_edge(p[i], p[(i + 1) % p.size()]);
            if (eset.insert(e).second) es.push_back(e);
        }
    };
    for (const auto& p : w.rows) add(p, w.annulus);
    for (const auto& p : w.cols) add(p, false);
    w.host = host.subgraph(vs, es);
    build_wall_map(w);
    return w;
}

namespace {

// Enclosure cycle from rainbow paths plus top-cycle stretches. For a
// handle family pass the left or right rainbow; for a crosscap the whole
// one. Degree-3 order: starts v_1..v_k along the top, inner arc, u row
// (reversed for crosscaps by construction of the endpoints), outer arc.
Path enclosure_cycle(const Path& toprow, const std::vector<Path>& arcs) {
    auto pos = [&](Vertex v) {
        auto it = std::find(toprow.begin(), toprow.end(), v);
        if (it == toprow.end()) throw InputError("enclosure endpoint off the top cycle");
        return static_cast<int>(it - toprow.begin());
    };
    int n = static_cast<int>(toprow.size());
    auto stretch = [&](Vertex from, Vertex to, Path& out) {
        int i = pos(from), j = pos(to);
        int dir = 1;
        // Walk the short way that does not wrap past index 0 arbitrarily:
        // segments lay out contiguously, so pick the direction with the
        // shorter span.
        int fwd = (j - i + n) % n, bwd = (i - j + n) % n;
        dir = fwd <= bwd ? 1 : -1;
        for (int k2 = i; k2 != j; k2 = (k2 + dir + n) % n) out.push_back(toprow[k2]);
    };
    const Path& outer = arcs.front();
    const Path& inner = arcs.back();
    Path cycle;
    stretch(outer.front(), inner.front(), cycle);
    cycle.push_back(inner.front());
    for (size_t i = 1; i + 1 < inner.size(); ++i) cycle.push_back(inner[i]);
    stretch(inner.back(), outer.back(), cycle);
    cycle.push_back(outer.back());
    for (size_t i = outer.size() - 2; i >= 1; --i) cycle.push_back(outer[i]);
    return cycle;
}

}  // namespace

WalloidHandle assemble_walloid(const Graph& host, int r, int t, int s,
                               std::vector<WalloidSegmentRole> segments,
                               std::vector<Path> base_cycles,
                               const std::map<Vertex, int>& heights) {
    WalloidHandle w;
    w.host = host;
    w.r = r;
    w.t = t;
    w.s = s;
    for (const auto& seg : segments) {
        if (seg.kind == SegKind::Handle) ++w.h;
        if (seg.kind == SegKind::Crosscap) ++w.c;
    }
    w.segments = std::move(segments);
    w.base_cycles = std::move(base_cycles);
    w.big_enclosure = w.base_cycles.front();
    w.simple_cycle = w.base_cycles.back();

    MapBuilder mb;
    std::set<Edge> row_edges;
    std::vector<std::set<Vertex>> row_sets;
    for (const auto& cyc : w.base_cycles) {
        row_sets.emplace_back(cyc.begin(), cyc.end());
        for (size_t i = 0; i < cyc.size(); ++i) {
            mb.add(cyc[i], cyc[(i + 1) % cyc.size()], E, W);
            row_edges.insert(make_edge(cyc[i], cyc[(i + 1) % cyc.size()]));
        }
    }
    auto on_some_row = [&](Vertex v) {
        for (const auto& rs : row_sets)
            if (rs.count(v)) return true;
        return false;
    };
    // Junction vertices: base-cycle members plus nest members; decoration
    // paths split there so crossings become degree-4 junctions with
    // vertical keys.
    std::set<Vertex> nest_verts;
    for (const auto& role : w.segments)
        for (const auto& cyc : role.nest) nest_verts.insert(cyc.begin(), cyc.end());
    auto is_junction = [&](Vertex v) { return on_some_row(v) || nest_verts.count(v); };
    std::set<Edge> seen = row_edges;
    // Key a stretch end by where the in-stretch neighbor sits: below the
    // junction means the dart points south. Unknown heights attach north
    // (the top-boundary convention).
    auto end_key = [&](Vertex junction, Vertex inward) {
        auto hj = heights.find(junction);
        auto hw = heights.find(inward);
        if (hj != heights.end() && hw != heights.end() && hw->second != hj->second)
            return hw->second > hj->second ? S : N;
        return N;
    };
    auto add_split = [&](const Path& p, bool twist_first) {
        bool twisted = twist_first;
        size_t i = 0;
        while (i + 1 < p.size()) {
            size_t j = i + 1;
            while (j + 1 < p.size() && !is_junction(p[j])) ++j;
            Path stretch(p.begin() + i, p.begin() + j + 1);
            bool fresh = true;
            for (size_t k2 = 0; k2 + 1 < stretch.size(); ++k2)
                if (!seen.insert(make_edge(stretch[k2], stretch[k2 + 1])).second)
                    fresh = false;
            if (fresh) {
                int ka = end_key(stretch.front(), stretch[1]);
                int kb = end_key(stretch.back(), stretch[stretch.size() - 2]);
                for (size_t k2 = 0; k2 + 1 < stretch.size(); ++k2) {
                    int da = (k2 == 0) ? ka : E;
                    int db = (k2 + 2 == stretch.size()) ? kb : W;
                    mb.add(stretch[k2], stretch[k2 + 1], da, db, twisted && k2 == 0);
                }
                twisted = false;
            }
            i = j;
        }
    };
    for (const auto& role : w.segments) {
        for (const auto& col : role.cols)
            for (size_t i = 0; i + 1 < col.size(); ++i) {
                Edge e = make_edge(col[i], col[i + 1]);
                if (seen.insert(e).second) mb.add(col[i], col[i + 1], S, N);
            }
        for (const auto& cyc : role.nest)
            for (size_t i = 0; i < cyc.size(); ++i) {
                Vertex a = cyc[i], b = cyc[(i + 1) % cyc.size()];
                Edge e = make_edge(a, b);
                if (!seen.insert(e).second) continue;
                // Nest cycles weave: vertical pieces take vertical keys.
                auto ha = heights.find(a);
                auto hb = heights.find(b);
                if (ha != heights.end() && hb != heights.end() &&
                    ha->second != hb->second) {
                    if (hb->second > ha->second) mb.add(a, b, S, N);
                    else mb.add(a, b, N, S);
                } else {
                    mb.add(a, b, E, W);
                }
            }
    }
    for (const auto& role : w.segments) {
        bool twist = role.kind == SegKind::Crosscap;
        for (const auto& p : role.rainbow) add_split(p, twist);
        for (const auto& p : role.rainbow_right) add_split(p, false);
        for (const auto& p : role.radial) add_split(p, false);
    }
    mb.finish();
    w.skel = std::move(mb.map);
    w.skel_vertex = std::move(mb.vert_of);
    w.skel_index = std::move(mb.index_of);

    // Simple face: the unique face containing every bottom-cycle vertex.
    {
        std::set<int> want;
        for (Vertex v : w.simple_cycle) want.insert(w.skel_index.at(v));
        std::vector<int> hits;
        for (int f = 0; f < w.skel.num_faces(); ++f) {
            std::set<int> fv(w.skel.faces()[f].vertices.begin(),
                             w.skel.faces()[f].vertices.end());
            bool all = true;
            for (int v : want)
                if (!fv.count(v)) all = false;
            if (all) hits.push_back(f);
        }
        if (hits.size() != 1)
            throw IntegrityError("assemble_walloid: simple face not unique");
        w.simple_face = hits[0];
    }
    // Exceptional face: touches a top-cycle edge, avoids every deeper base
    // cycle, and meets every segment's top boundary.
    {
        std::set<Vertex> deeper;
        for (size_t i = 1; i < w.base_cycles.size(); ++i)
            deeper.insert(w.base_cycles[i].begin(), w.base_cycles[i].end());
        const Path& top = w.base_cycles[0];
        std::set<int> cands;
        for (size_t i = 0; i < top.size(); ++i) {
            int a = w.skel_index.at(top[i]);
            int b = w.skel_index.at(top[(i + 1) % top.size()]);
            for (int d : w.skel.rotation(a))
                if (w.skel.head(d) == b) {
                    cands.insert(w.skel.face_of_slot(d >> 1, 0));
                    cands.insert(w.skel.face_of_slot(d >> 1, 1));
                }
        }
        int pick = -1;
        for (int f : cands) {
            if (f == w.simple_face) continue;
            bool touches_deep = false;
            for (int mv : w.skel.faces()[f].vertices)
                if (deeper.count(w.skel_vertex[mv])) touches_deep = true;
            if (touches_deep) continue;
            std::set<Vertex> fv;
            for (int mv : w.skel.faces()[f].vertices) fv.insert(w.skel_vertex[mv]);
            bool all_segments = true;
            for (const auto& role : w.segments) {
                bool any = false;
                for (Vertex v : role.top_bd)
                    if (fv.count(v)) any = true;
                if (!any) all_segments = false;
            }
            if (!all_segments) continue;
            if (pick >= 0 && pick != f)
                throw IntegrityError("assemble_walloid: exceptional face ambiguous");
            pick = f;
        }
        if (pick < 0) throw IntegrityError("assemble_walloid: exceptional face missing");
        w.exceptional_face = pick;
    }
    w.enclosures.push_back(w.big_enclosure);
    for (const auto& role : w.segments) {
        if (role.kind == SegKind::Handle) {
            w.enclosures.push_back(enclosure_cycle(w.base_cycles[0], role.rainbow));
            w.enclosures.push_back(enclosure_cycle(w.base_cycles[0], role.rainbow_right));
        } else if (role.kind == SegKind::Crosscap) {
            w.enclosures.push_back(enclosure_cycle(w.base_cycles[0], role.rainbow));
        }
    }
    return w;
}

WalloidHandle cylindrical_closure(const std::vector<SegmentHandle>& segments) {
    if (segments.empty()) throw InputError("cylindrical_closure: no segments");
    WalloidShape shape;
    int stage = 0;
    int r = segments[0].base.r;
    int t = -1;
    int wall_count = 0;
    shape.s = 1;
    for (const auto& seg : segments) {
        if (seg.base.r != r) throw InputError("cylindrical_closure: row counts differ");
        switch (seg.kind) {
            case SegKind::Wall:
                if (stage != 0 || wall_count > 0)
                    throw InputError("cylindrical_closure: wall segment must come first");
                ++wall_count;
                break;
            case SegKind::Handle:
            case SegKind::Crosscap:
                if (stage > 1) throw InputError("cylindrical_closure: segment order");
                stage = 1;
                if (seg.kind == SegKind::Handle) ++shape.h;
                else ++shape.c;
                if (t < 0) t = seg.t;
                break;
            case SegKind::Flap:
                if (stage > 2) throw InputError("cylindrical_closure: segment order");
                stage = 2;
                shape.flap_arities.push_back(seg.arity);
                if (t < 0) t = seg.t;
                break;
            case SegKind::Vortex:
                stage = 3;
                ++shape.vortices;
                shape.s = seg.s;
                if (t < 0) t = seg.t;
                break;
        }
        if (t >= 0 && seg.kind != SegKind::Wall && seg.t != t)
            throw InputError("cylindrical_closure: segment orders differ");
    }
    if (wall_count != 1)
        throw InputError("cylindrical_closure: exactly one wall segment required");
    if (t < 0) {
        // Pure annulus: any split with t >= 3 works; take the smallest t.
        t = 3;
        r = segments[0].base.t - t;
        if (r < 0) throw InputError("cylindrical_closure: wall segment too narrow");
    }
    if (segments[0].base.t != r + t)
        throw InputError("cylindrical_closure: wall segment must be (r+t) wide");
    shape.r = r;
    shape.t = t;
    return build_walloid(shape);
}

// ---------------------------------------------------------------------------
// Face and brick machinery.

std::vector<int> WallHandle::brick_faces() const {
    // A standalone wall has no decorations: every inner face is a brick.
    // Annulus walls have two end faces instead of one outer face.
    std::set<int> skip;
    if (annulus) {
        std::set<Vertex> top(rows.front().begin(), rows.front().end());
        std::set<Vertex> bot(rows.back().begin(), rows.back().end());
        for (int f = 0; f < skel.num_faces(); ++f) {
            std::set<Vertex> fv;
            for (int mv : skel.faces()[f].vertices) fv.insert(skel_vertex[mv]);
            auto covers = [&](const std::set<Vertex>& want) {
                for (Vertex v : want)
                    if (!fv.count(v)) return false;
                return true;
            };
            if (covers(top) || covers(bot)) skip.insert(f);
        }
    } else {
        skip.insert(outer_face);
    }
    std::vector<int> out;
    for (int f = 0; f < skel.num_faces(); ++f)
        if (!skip.count(f)) out.push_back(f);
    return out;
}

std::vector<Path> WallHandle::brick_cycles() const {
    std::vector<Path> out;
    for (int f : brick_faces()) {
        Path p;
        for (int mv : skel.faces()[f].vertices) p.push_back(skel_vertex[mv]);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<int> WallHandle::walk_of_cycle(const std::vector<Vertex>& cycle) const {
    std::vector<int> walk;
    int n = static_cast<int>(cycle.size());
    for (int i = 0; i < n; ++i) {
        int a = skel_index.at(cycle[i]);
        int b = skel_index.at(cycle[(i + 1) % n]);
        int dart = -1;
        for (int d : skel.rotation(a))
            if (skel.head(d) == b && skel.tail(d) == a) dart = d;
        if (dart < 0) throw InputError("cycle edge missing from skeleton");
        walk.push_back(dart);
    }
    return walk;
}

std::set<int> WallHandle::bricks_inside_cycle(const std::vector<Vertex>& cycle) const {
    CutResult cut = cut_along(skel, walk_of_cycle(cycle));
    if (!cut.two_sided) throw IntegrityError("wall cycle should separate");
    std::set<int> left(cut.left_faces.begin(), cut.left_faces.end());
    std::set<int> right(cut.right_faces.begin(), cut.right_faces.end());
    const std::set<int>* inside = nullptr;
    if (!left.count(outer_face)) inside = &left;
    else if (!right.count(outer_face)) inside = &right;
    else throw IntegrityError("outer face on both sides");
    std::set<int> bricks;
    for (int f : brick_faces())
        if (inside->count(f)) bricks.insert(f);
    return bricks;
}

int WalloidHandle::num_flaps() const {
    int n = 0;
    for (const auto& seg : segments)
        if (seg.kind == SegKind::Flap) ++n;
    return n;
}

int WalloidHandle::num_vortices() const {
    int n = 0;
    for (const auto& seg : segments)
        if (seg.kind == SegKind::Vortex) ++n;
    return n;
}

std::set<Edge> WalloidHandle::skeleton_edges() const {
    std::set<Edge> out;
    for (int e = 0; e < skel.num_edges(); ++e)
        out.insert(make_edge(skel_vertex[skel.edge(e).u], skel_vertex[skel.edge(e).v]));
    return out;
}

int WalloidHandle::degree3_count(int f) const {
    std::set<int> verts(skel.faces()[f].vertices.begin(),
                        skel.faces()[f].vertices.end());
    int d3 = 0;
    for (int mv : verts)
        if (static_cast<int>(skel.rotation(mv).size()) == 3) ++d3;
    return d3;
}

std::vector<int> WalloidHandle::brick_faces() const {
    std::vector<int> out;
    for (int f = 0; f < skel.num_faces(); ++f)
        if (f != exceptional_face && f != simple_face && degree3_count(f) == 6)
            out.push_back(f);
    return out;
}

std::vector<Vertex> WalloidHandle::face_cycle(int f) const {
    std::vector<Vertex> p;
    for (int mv : skel.faces()[f].vertices) p.push_back(skel_vertex[mv]);
    return p;
}

std::vector<int> WalloidHandle::walk_of_cycle(const std::vector<Vertex>& cycle) const {
    std::vector<int> walk;
    int n = static_cast<int>(cycle.size());
    for (int i = 0; i < n; ++i) {
        int a = skel_index.at(cycle[i]);
        int b = skel_index.at(cycle[(i + 1) % n]);
        int dart = -1;
        for (int d : skel.rotation(a))
            if (skel.head(d) == b && skel.tail(d) == a) dart = d;
        if (dart < 0) throw InputError("cycle edge missing from walloid skeleton");
        walk.push_back(dart);
    }
    return walk;
}

Fence WalloidHandle::fence_of_face(int f) const {
    Fence fence;
    fence.cycle = face_cycle(f);
    fence.region_faces = {f};
    auto bricks = brick_faces();
    if (std::find(bricks.begin(), bricks.end(), f) != bricks.end()) fence.bricks.insert(f);
    for (size_t i = 0; i < fence.cycle.size(); ++i)
        fence.inside_edges.insert(
            make_edge(fence.cycle[i], fence.cycle[(i + 1) % fence.cycle.size()]));
    return fence;
}

Fence WalloidHandle::fence_of_bricks(const std::set<int>& bricks) const {
    if (bricks.empty()) throw InputError("fence_of_bricks: empty brick set");
    std::map<int, std::vector<int>> at_vertex;
    std::vector<int> boundary;
    for (int e = 0; e < skel.num_edges(); ++e) {
        bool a = bricks.count(skel.face_of_slot(e, 0)) > 0;
        bool b = bricks.count(skel.face_of_slot(e, 1)) > 0;
        if (a != b) boundary.push_back(e);
    }
    for (int e : boundary) {
        at_vertex[skel.edge(e).u].push_back(e);
        at_vertex[skel.edge(e).v].push_back(e);
    }
    for (auto& [v, es2] : at_vertex)
        if (es2.size() != 2)
            throw IntegrityError("fence boundary is not a disjoint cycle family");
    std::set<int> seen;
    Fence fence;
    bool found = false;
    for (int e0 : boundary) {
        if (seen.count(e0)) continue;
        std::vector<Vertex> cyc;
        int e = e0;
        int v = skel.edge(e).u;
        while (true) {
            seen.insert(e);
            cyc.push_back(skel_vertex[v]);
            int w2 = (skel.edge(e).u == v) ? skel.edge(e).v : skel.edge(e).u;
            const auto& es2 = at_vertex[w2];
            int nxt = (es2[0] == e) ? es2[1] : es2[0];
            v = w2;
            e = nxt;
            if (e == e0 && v == skel.edge(e0).u) break;
            if (cyc.size() > static_cast<size_t>(2 * skel.num_edges()))
                throw IntegrityError("fence boundary walk diverged");
        }
        CutResult cut = cut_along(skel, walk_of_cycle(cyc));
        if (!cut.two_sided) continue;
        std::set<int> left(cut.left_faces.begin(), cut.left_faces.end());
        std::set<int> right(cut.right_faces.begin(), cut.right_faces.end());
        const std::set<int>* inside = nullptr;
        if (!left.count(exceptional_face) && right.count(exceptional_face)) inside = &left;
        if (left.count(exceptional_face) && !right.count(exceptional_face)) inside = &right;
        if (!inside) continue;
        bool covers = true;
        for (int b : bricks)
            if (!inside->count(b)) covers = false;
        if (!covers) continue;
        if (found) throw IntegrityError("fence boundary ambiguous");
        found = true;
        fence.cycle = cyc;
        fence.region_faces = *inside;
        for (int b : brick_faces())
            if (inside->count(b)) fence.bricks.insert(b);
    }
    if (!found) throw IntegrityError("fence boundary not found");
    for (int e = 0; e < skel.num_edges(); ++e) {
        bool a = fence.region_faces.count(skel.face_of_slot(e, 0)) > 0;
        bool b = fence.region_faces.count(skel.face_of_slot(e, 1)) > 0;
        if (a || b)
            fence.inside_edges.insert(
                make_edge(skel_vertex[skel.edge(e).u], skel_vertex[skel.edge(e).v]));
    }
    return fence;
}

namespace {
std::set<Vertex> cycle_vertex_set(const std::vector<Vertex>& cyc) {
    return std::set<Vertex>(cyc.begin(), cyc.end());
}
}  // namespace

Fence WalloidHandle::fence_at_distance(const Fence& f, int d) const {
    Fence cur = f;
    std::set<Vertex> si = cycle_vertex_set(simple_cycle);
    std::set<Vertex> ex = cycle_vertex_set(face_cycle(exceptional_face));
    for (int step = 0; step < d; ++step) {
        for (Vertex v : cur.cycle)
            if (si.count(v) || ex.count(v))
                throw RefusalError("fence is not " + std::to_string(d) + "-internal");
        std::set<Vertex> touch;
        if (!cur.bricks.empty()) {
            for (int b : cur.bricks)
                for (int mv : skel.faces()[b].vertices) touch.insert(skel_vertex[mv]);
        } else {
            touch.insert(cur.cycle.begin(), cur.cycle.end());
        }
        std::set<int> grown = cur.bricks;
        for (int b : brick_faces())
            for (int mv : skel.faces()[b].vertices)
                if (touch.count(skel_vertex[mv])) {
                    grown.insert(b);
                    break;
                }
        cur = fence_of_bricks(grown);
    }
    return cur;
}

bool WalloidHandle::is_internal(const Fence& f, int d) const {
    try {
        fence_at_distance(f, d);
        return true;
    } catch (const RefusalError&) {
        return false;
    }
}

Fence WalloidHandle::fence_from_exceptional(int d) const {
    Fence f = fence_of_face(exceptional_face);
    std::set<Vertex> si = cycle_vertex_set(simple_cycle);
    for (int step = 0; step < d; ++step) {
        for (Vertex v : f.cycle)
            if (si.count(v)) throw RefusalError("fence growth reached the simple cycle");
        std::set<Vertex> touch;
        if (!f.bricks.empty()) {
            for (int b : f.bricks)
                for (int mv : skel.faces()[b].vertices) touch.insert(skel_vertex[mv]);
        } else {
            touch.insert(f.cycle.begin(), f.cycle.end());
        }
        std::set<int> grown = f.bricks;
        for (int b : brick_faces())
            for (int mv : skel.faces()[b].vertices)
                if (touch.count(skel_vertex[mv])) {
                    grown.insert(b);
                    break;
                }
        f = fence_of_bricks(grown);
    }
    return f;
}

std::vector<Vertex> WalloidHandle::internal_pegs(const Fence& f) const {
    std::set<Edge> cyc_edges;
    for (size_t i = 0; i < f.cycle.size(); ++i)
        cyc_edges.insert(make_edge(f.cycle[i], f.cycle[(i + 1) % f.cycle.size()]));
    std::set<Edge> brick_edges;
    for (int b : f.bricks) {
        const auto& verts = skel.faces()[b].vertices;
        for (size_t i = 0; i < verts.size(); ++i)
            brick_edges.insert(make_edge(skel_vertex[verts[i]],
                                         skel_vertex[verts[(i + 1) % verts.size()]]));
    }
    std::vector<Vertex> out;
    for (Vertex v : f.cycle) {
        int mv = skel_index.at(v);
        for (int dart : skel.rotation(mv)) {
            Vertex w2 = skel_vertex[skel.head(dart)];
            Edge e = make_edge(v, w2);
            if (!cyc_edges.count(e) && brick_edges.count(e)) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

std::vector<Vertex> WalloidHandle::external_pegs(const Fence& f) const {
    std::set<Edge> cyc_edges;
    for (size_t i = 0; i < f.cycle.size(); ++i)
        cyc_edges.insert(make_edge(f.cycle[i], f.cycle[(i + 1) % f.cycle.size()]));
    std::set<Edge> outside_brick_edges;
    for (int b : brick_faces()) {
        if (f.bricks.count(b)) continue;
        const auto& verts = skel.faces()[b].vertices;
        for (size_t i = 0; i < verts.size(); ++i)
            outside_brick_edges.insert(make_edge(
                skel_vertex[verts[i]], skel_vertex[verts[(i + 1) % verts.size()]]));
    }
    std::vector<Vertex> out;
    for (Vertex v : f.cycle) {
        int mv = skel_index.at(v);
        for (int dart : skel.rotation(mv)) {
            Vertex w2 = skel_vertex[skel.head(dart)];
            Edge e = make_edge(v, w2);
            if (!cyc_edges.count(e) && outside_brick_edges.count(e)) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recognizers.

bool recognize_grid(const GridHandle& g) {
    if (g.n < 1 || g.m < 1) return false;
    if (g.host.num_vertices() != g.n * g.m) return false;
    if (g.host.num_edges() != g.n * (g.m - 1) + g.m * (g.n - 1)) return false;
    if (static_cast<int>(g.row_paths.size()) != g.n) return false;
    if (static_cast<int>(g.column_paths.size()) != g.m) return false;
    for (int i = 0; i < g.n; ++i) {
        if (static_cast<int>(g.row_paths[i].size()) != g.m) return false;
        for (int j = 0; j + 1 < g.m; ++j)
            if (!g.host.has_edge(g.row_paths[i][j], g.row_paths[i][j + 1])) return false;
    }
    for (int j = 0; j < g.m; ++j) {
        if (static_cast<int>(g.column_paths[j].size()) != g.n) return false;
        for (int i = 0; i + 1 < g.n; ++i) {
            if (!g.host.has_edge(g.column_paths[j][i], g.column_paths[j][i + 1]))
                return false;
            if (g.column_paths[j][i] != g.row_paths[i][j]) return false;
        }
    }
    return true;
}

namespace {

bool paths_disjoint(const Graph& g, const std::vector<Path>& paths,
                    std::set<Vertex>* cover) {
    std::set<Vertex> seen;
    for (const auto& p : paths) {
        if (p.empty()) return false;
        for (size_t i = 0; i + 1 < p.size(); ++i)
            if (!g.has_edge(p[i], p[i + 1])) return false;
        for (Vertex v : p)
            if (!seen.insert(v).second) return false;
    }
    if (cover) cover->insert(seen.begin(), seen.end());
    return true;
}

}  // namespace

bool recognize_wall(const WallHandle& w) {
    try {
        if (static_cast<int>(w.rows.size()) != w.r) return false;
        if (static_cast<int>(w.cols.size()) != w.t) return false;
        // Rows are disjoint paths, columns are disjoint paths, and together
        // they cover every vertex (subdivision vertices may live on only
        // one of the two families).
        std::set<Vertex> cover;
        if (!paths_disjoint(w.host, w.rows, &cover)) return false;
        if (!paths_disjoint(w.host, w.cols, &cover)) return false;
        if (static_cast<int>(cover.size()) != w.host.num_vertices()) return false;
        std::set<Edge> ok;
        for (const auto& row : w.rows)
            for (size_t i = 0; i + 1 < row.size(); ++i)
                ok.insert(make_edge(row[i], row[i + 1]));
        if (w.annulus)
            for (const auto& row : w.rows) ok.insert(make_edge(row.front(), row.back()));
        for (const auto& col : w.cols)
            for (size_t i = 0; i + 1 < col.size(); ++i)
                ok.insert(make_edge(col[i], col[i + 1]));
        for (const Edge& e : w.host.edges())
            if (!ok.count(e)) return false;
        if (ok.size() != static_cast<size_t>(w.host.num_edges())) return false;
        for (Vertex v : w.host.vertices()) {
            int d = w.host.degree(v);
            if (d > 3) return false;
            if (d <= 1 && w.kind != WallKind::WallSegment) return false;
        }
        WallHandle copy = w;
        build_wall_map(copy);
        if (copy.skel.euler_genus() != 0) return false;
        int bricks = static_cast<int>(copy.brick_faces().size());
        int expected;
        switch (w.kind) {
            case WallKind::Wall:
            case WallKind::WallSegment: expected = (w.r - 1) * (w.t - 1); break;
            case WallKind::AnnulusWall: expected = (w.r - 1) * w.t; break;
            default: return false;
        }
        if (bricks != expected) return false;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool recognize_segment(const SegmentHandle& seg) {
    try {
        const WallHandle& b = seg.base;
        int t = seg.t;
        auto path_ok = [&](const Path& p) {
            for (size_t i = 0; i + 1 < p.size(); ++i)
                if (!b.host.has_edge(p[i], p[i + 1])) return false;
            return true;
        };
        for (const auto& row : b.rows)
            if (!path_ok(row)) return false;
        for (const auto& col : b.cols)
            if (!path_ok(col)) return false;
        for (const auto& p : seg.rainbow)
            if (!path_ok(p)) return false;
        for (const auto& p : seg.rainbow_right)
            if (!path_ok(p)) return false;
        for (const auto& p : seg.pendants)
            if (!path_ok(p)) return false;
        for (const auto& p : seg.radial)
            if (!path_ok(p)) return false;
        for (const auto& cyc : seg.nest) {
            if (cyc.size() < 3) return false;
            for (size_t i = 0; i < cyc.size(); ++i)
                if (!b.host.has_edge(cyc[i], cyc[(i + 1) % cyc.size()])) return false;
        }
        switch (seg.kind) {
            case SegKind::Wall:
                return recognize_wall(b);
            case SegKind::Handle: {
                if (static_cast<int>(seg.rainbow.size()) != t) return false;
                if (static_cast<int>(seg.rainbow_right.size()) != t) return false;
                const auto& tb = b.top_bd;
                for (int i = 1; i <= t; ++i) {
                    if (seg.rainbow[i - 1].front() != tb[i - 1]) return false;
                    if (seg.rainbow[i - 1].back() != tb[3 * t - i]) return false;
                    if (seg.rainbow_right[i - 1].front() != tb[t + i - 1]) return false;
                    if (seg.rainbow_right[i - 1].back() != tb[4 * t - i]) return false;
                }
                return true;
            }
            case SegKind::Crosscap: {
                if (static_cast<int>(seg.rainbow.size()) != 2 * t) return false;
                const auto& tb = b.top_bd;
                for (int i = 1; i <= 2 * t; ++i) {
                    if (seg.rainbow[i - 1].front() != tb[i - 1]) return false;
                    if (seg.rainbow[i - 1].back() != tb[2 * t + i - 1]) return false;
                }
                return true;
            }
            case SegKind::Flap: {
                if (seg.arity < 1 || seg.arity > 3) return false;
                if (static_cast<int>(seg.rainbow.size()) != t) return false;
                if (static_cast<int>(seg.pendants.size()) != seg.arity) return false;
                if (seg.hyperedge.size() != static_cast<size_t>(seg.arity)) return false;
                const auto& tb = b.top_bd;
                for (int i = 1; i <= t; ++i) {
                    if (seg.rainbow[i - 1].front() != tb[i - 1]) return false;
                    if (seg.rainbow[i - 1].back() != tb[t + seg.arity + t - i]) return false;
                }
                for (int j = 0; j < seg.arity; ++j) {
                    if (seg.pendants[j].front() != tb[t + j]) return false;
                    if (seg.pendants[j].back() != seg.hyperedge[j]) return false;
                }
                return true;
            }
            case SegKind::Vortex: {
                if (static_cast<int>(seg.nest.size()) != seg.s + 2) return false;
                if (static_cast<int>(seg.radial.size()) != t) return false;
                for (const auto& p : seg.radial) {
                    for (const auto& cyc : seg.nest) {
                        std::set<Vertex> cs(cyc.begin(), cyc.end());
                        int comps = 0;
                        bool in = false;
                        for (Vertex v : p) {
                            bool here = cs.count(v) > 0;
                            if (here && !in) ++comps;
                            in = here;
                        }
                        if (comps != 1) return false;
                    }
                    if (std::find(b.top_bd.begin(), b.top_bd.end(), p.front()) ==
                        b.top_bd.end())
                        return false;
                }
                std::set<Vertex> c0(seg.nest[0].begin(), seg.nest[0].end());
                for (Vertex v : seg.hyperedge)
                    if (!c0.count(v)) return false;
                return true;
            }
        }
        return false;
    } catch (const std::exception&) {
        return false;
    }
}

bool recognize_ladder(const LadderHandle& l) {
    if (l.t < 2) return false;
    if (static_cast<int>(l.rungs.size()) != l.t) return false;
    if (l.rails.size() != 2) return false;
    for (const auto& rung : l.rungs) {
        if (rung.size() < 2) return false;
        for (size_t i = 0; i + 1 < rung.size(); ++i)
            if (!l.host.has_edge(rung[i], rung[i + 1])) return false;
    }
    for (const auto& rail : l.rails)
        for (size_t i = 0; i + 1 < rail.size(); ++i)
            if (!l.host.has_edge(rail[i], rail[i + 1])) return false;
    for (int i = 0; i < l.t; ++i) {
        Vertex a = l.rungs[i].front(), b = l.rungs[i].back();
        auto pos0 = std::find(l.rails[0].begin(), l.rails[0].end(), a);
        auto pos1 = std::find(l.rails[1].begin(), l.rails[1].end(), b);
        if (pos0 == l.rails[0].end() || pos1 == l.rails[1].end()) return false;
        if (i > 0) {
            auto prev0 =
                std::find(l.rails[0].begin(), l.rails[0].end(), l.rungs[i - 1].front());
            auto prev1 =
                std::find(l.rails[1].begin(), l.rails[1].end(), l.rungs[i - 1].back());
            if (prev0 >= pos0 || prev1 >= pos1) return false;
        }
    }
    return true;
}

bool recognize_walloid(const WalloidHandle& w) {
    try {
        if (w.base_cycles.size() != static_cast<size_t>(w.r + w.t)) return false;
        int stage = 0;
        int walls = 0, handles = 0, caps = 0;
        for (const auto& seg : w.segments) {
            int want;
            switch (seg.kind) {
                case SegKind::Wall: want = 0; ++walls; break;
                case SegKind::Handle: want = 1; ++handles; break;
                case SegKind::Crosscap: want = 1; ++caps; break;
                case SegKind::Flap: want = 2; break;
                case SegKind::Vortex: want = 3; break;
                default: return false;
            }
            if (want < stage) return false;
            stage = want;
        }
        if (walls != 1 || handles != w.h || caps != w.c) return false;
        if (w.enclosures.size() != static_cast<size_t>(2 * w.h + w.c + 1)) return false;
        if (w.skel.euler_genus() != 2 * w.h + w.c) return false;
        for (const auto& cyc : w.base_cycles)
            for (size_t i = 0; i < cyc.size(); ++i)
                if (!w.host.has_edge(cyc[i], cyc[(i + 1) % cyc.size()])) return false;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Subwalls and subladders.

bool is_subwall(const WallHandle& sub, const WallHandle& whole) {
    auto is_subpath = [](const Path& small, const Path& big, bool cyclic) {
        if (small.empty()) return false;
        int n = static_cast<int>(big.size());
        for (int s = 0; s < n; ++s) {
            if (big[s] != small[0]) continue;
            for (int dirn : {1, -1}) {
                bool ok = true;
                for (size_t i = 1; i < small.size(); ++i) {
                    int idx = s + dirn * static_cast<int>(i);
                    if (cyclic) idx = ((idx % n) + n) % n;
                    if (idx < 0 || idx >= n || big[idx] != small[i]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) return true;
            }
        }
        return false;
    };
    for (const auto& row : sub.rows) {
        bool found = false;
        for (const auto& brow : whole.rows)
            if (is_subpath(row, brow, whole.annulus)) found = true;
        if (!found) return false;
    }
    for (const auto& col : sub.cols) {
        bool found = false;
        for (const auto& bcol : whole.cols)
            if (is_subpath(col, bcol, false)) found = true;
        if (!found) return false;
    }
    return true;
}

WallHandle take_subwall(const WallHandle& w, const std::vector<int>& row_idx,
                        const std::vector<int>& col_idx) {
    for (int i : row_idx)
        if (i < 0 || i >= w.r) throw InputError("take_subwall: row index out of range");
    for (int j : col_idx)
        if (j < 0 || j >= w.t) throw InputError("take_subwall: col index out of range");
    if (row_idx.size() < 3 || col_idx.size() < 3)
        throw InputError("take_subwall: need at least three rows and columns");

    auto position_in = [&](const Path& p, const std::set<Vertex>& target) {
        int first = -1, last = -1;
        for (int i = 0; i < static_cast<int>(p.size()); ++i)
            if (target.count(p[i])) {
                if (first < 0) first = i;
                last = i;
            }
        return std::make_pair(first, last);
    };
    std::set<Vertex> row_first(w.rows[row_idx.front()].begin(),
                               w.rows[row_idx.front()].end());
    std::set<Vertex> row_last(w.rows[row_idx.back()].begin(),
                              w.rows[row_idx.back()].end());
    std::vector<Path> cols;
    for (int j : col_idx) {
        const Path& col = w.cols[j];
        auto [f1, l1] = position_in(col, row_first);
        auto [f2, l2] = position_in(col, row_last);
        if (f1 < 0 || f2 < 0) throw InputError("take_subwall: column misses a row");
        int lo = std::min({f1, l1, f2, l2});
        int hi = std::max({f1, l1, f2, l2});
        cols.push_back(Path(col.begin() + lo, col.begin() + hi + 1));
    }
    std::set<Vertex> col_first(cols.front().begin(), cols.front().end());
    std::set<Vertex> col_last(cols.back().begin(), cols.back().end());
    std::vector<Path> rows;
    for (int i : row_idx) {
        const Path& p = w.rows[i];
        auto [f1, l1] = position_in(p, col_first);
        auto [f2, l2] = position_in(p, col_last);
        if (f1 < 0 || f2 < 0) throw InputError("take_subwall: row misses a column");
        int lo = std::min({f1, l1, f2, l2});
        int hi = std::max({f1, l1, f2, l2});
        rows.push_back(Path(p.begin() + lo, p.begin() + hi + 1));
    }
    std::set<Vertex> vs;
    std::vector<Edge> es;
    for (const auto& p : rows) {
        vs.insert(p.begin(), p.end());
        for (size_t i = 0; i + 1 < p.size(); ++i) es.push_back(make_edge(p[i], p[i + 1]));
    }
    for (const auto& p : cols) {
        vs.insert(p.begin(), p.end());
        for (size_t i = 0; i + 1 < p.size(); ++i) es.push_back(make_edge(p[i], p[i + 1]));
    }
    Graph g = w.host.subgraph(vs, es);
    while (true) {
        std::set<Vertex> drop;
        for (Vertex v : g.vertices())
            if (g.degree(v) <= 1) drop.insert(v);
        if (drop.empty()) break;
        std::set<Vertex> keep(g.vertices().begin(), g.vertices().end());
        for (Vertex v : drop) keep.erase(v);
        g = g.induced(keep);
        auto trim = [&](Path& p) {
            while (!p.empty() && drop.count(p.front())) p.erase(p.begin());
            while (!p.empty() && drop.count(p.back())) p.pop_back();
        };
        for (auto& p : rows) trim(p);
        for (auto& p : cols) trim(p);
    }

    WallHandle out;
    out.kind = WallKind::Wall;
    out.r = static_cast<int>(row_idx.size());
    out.t = static_cast<int>(col_idx.size());
    out.host = g;
    out.rows = rows;
    out.cols = cols;
    // Rebuild the skeleton map from the cropped paths.
    {
        MapBuilder mb;
        std::set<Edge> seen2;
        for (const auto& row : out.rows)
            for (size_t i = 0; i + 1 < row.size(); ++i) {
                mb.add(row[i], row[i + 1], E, W);
                seen2.insert(make_edge(row[i], row[i + 1]));
            }
        for (const auto& col : out.cols)
            for (size_t i = 0; i + 1 < col.size(); ++i) {
                Edge e = make_edge(col[i], col[i + 1]);
                if (seen2.insert(e).second) mb.add(col[i], col[i + 1], S, N);
            }
        mb.finish();
        out.skel = std::move(mb.map);
        out.skel_vertex = std::move(mb.vert_of);
        out.skel_index = std::move(mb.index_of);
        out.edges_.clear();
        for (int e = 0; e < out.skel.num_edges(); ++e)
            out.edges_.insert(make_edge(out.skel_vertex[out.skel.edge(e).u],
                                        out.skel_vertex[out.skel.edge(e).v]));
        int best = -1, best_len = -1;
        for (int f = 0; f < out.skel.num_faces(); ++f)
            if (out.skel.face_degree(f) > best_len) {
                best_len = out.skel.face_degree(f);
                best = f;
            }
        out.outer_face = best;
    }
    return out;
}

LadderHandle take_subladder(const LadderHandle& l, const std::vector<int>& rung_idx) {
    LadderHandle out;
    out.t = static_cast<int>(rung_idx.size());
    for (int i : rung_idx) {
        if (i < 0 || i >= l.t) throw InputError("take_subladder: rung out of range");
        out.rungs.push_back(l.rungs[i]);
    }
    out.rails = l.rails;
    out.host = l.host;
    return out;
}

}  // namespace walloid

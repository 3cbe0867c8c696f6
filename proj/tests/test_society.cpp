#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "oracles.hpp"
#include "walloid/fixtures.hpp"
#include "walloid/rng.hpp"
#include "walloid/society.hpp"

using namespace walloid;

namespace {

// Brute-force cross oracle: enumerate endpoint 4-tuples and all pairs of
// simple paths.
bool cross_oracle(const Society& s) {
    int m = static_cast<int>(s.omega.size());
    std::set<Vertex> omega(s.omega.begin(), s.omega.end());
    std::set<Vertex> non_omega;
    for (Vertex v : s.g.vertices())
        if (!omega.count(v)) non_omega.insert(v);
    for (int p1 = 0; p1 < m; ++p1)
        for (int p2 = p1 + 1; p2 < m; ++p2)
            for (int p3 = p2 + 1; p3 < m; ++p3)
                for (int p4 = p3 + 1; p4 < m; ++p4) {
                    Vertex a = s.omega[p1], b = s.omega[p2];
                    Vertex c = s.omega[p3], d = s.omega[p4];
                    bool found = false;
                    std::vector<Vertex> cur{a};
                    std::set<Vertex> used{a};
                    std::function<void()> rec = [&]() {
                        if (found) return;
                        if (cur.back() == c) {
                            // Enumerate second paths avoiding cur.
                            std::vector<Vertex> cur2{b};
                            std::set<Vertex> used2{b};
                            std::function<void()> rec2 = [&]() {
                                if (found) return;
                                if (cur2.back() == d) {
                                    found = true;
                                    return;
                                }
                                for (Vertex w : s.g.neighbors(cur2.back())) {
                                    if (found) return;
                                    if (used2.count(w) || used.count(w)) continue;
                                    if (w != d && omega.count(w)) continue;
                                    used2.insert(w);
                                    cur2.push_back(w);
                                    rec2();
                                    cur2.pop_back();
                                    used2.erase(w);
                                }
                            };
                            rec2();
                            return;
                        }
                        for (Vertex w : s.g.neighbors(cur.back())) {
                            if (found) return;
                            if (used.count(w)) continue;
                            if (w != c && omega.count(w)) continue;
                            used.insert(w);
                            cur.push_back(w);
                            rec();
                            cur.pop_back();
                            used.erase(w);
                        }
                    };
                    rec();
                    if (found) return true;
                }
    return false;
}

Society random_society(Rng& rng, int max_n, int max_omega) {
    int n = 3 + static_cast<int>(rng.below(max_n - 2));
    Graph g = oracle::random_graph(rng, n, 0.20 + 0.3 * (rng.below(100) / 100.0));
    int m = std::min(n, 2 + static_cast<int>(rng.below(std::max(1, max_omega - 1))));
    std::vector<Vertex> omega;
    std::vector<Vertex> pool = g.vertices();
    for (int i = 0; i < m; ++i) {
        int pick = static_cast<int>(rng.below(pool.size()));
        omega.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
    }
    return Society{g, omega};
}

}  // namespace

TEST_CASE("find_cross basics") {
    // K4 with omega (1,2,3,4): edges 13 and 24 cross.
    Graph k4({1, 2, 3, 4}, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    Society s{k4, {1, 2, 3, 4}};
    auto cross = find_cross(s);
    REQUIRE(cross.has_value());
    CHECK(cross->first.front() == 1);
    CHECK(cross->first.back() == 3);

    // A cycle in its own omega order has no cross.
    Graph c5({1, 2, 3, 4, 5}, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}});
    Society sc{c5, {1, 2, 3, 4, 5}};
    CHECK_FALSE(find_cross(sc).has_value());
}

TEST_CASE("find_cross agrees with the brute-force oracle") {
    Rng rng(2024);
    int crosses = 0;
    for (int trial = 0; trial < 300; ++trial) {
        Society s = random_society(rng, 9, 6);
        bool mine = find_cross(s).has_value();
        bool oracle = cross_oracle(s);
        CAPTURE(trial);
        CHECK(mine == oracle);
        if (mine) ++crosses;
    }
    CHECK(crosses > 10);  // the suite exercises both outcomes
}

TEST_CASE("synthesize: outerplanar society") {
    Graph c6({1, 2, 3, 4, 5, 6},
             {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {1, 6}, {2, 6}, {3, 5}});
    Society s{c6, {1, 2, 3, 4, 5, 6}};
    REQUIRE_FALSE(find_cross(s).has_value());
    auto rho = synthesize_disk_rendition(s);
    REQUIRE(rho.has_value());
    DecompReport rep = validate_decomposition(*rho, s.g);
    CHECK(rep.ok());
    CHECK(rep.breadth == 0);
    // Round trip: omega preserved in order.
    REQUIRE(rho->omega_nodes.size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(rho->node_vertex[rho->omega_nodes[i]] == s.omega[i]);
}

TEST_CASE("synthesize: K4 with 4 boundary vertices fails, cross found") {
    Graph k4({1, 2, 3, 4}, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    Society s{k4, {1, 2, 3, 4}};
    CHECK_FALSE(synthesize_disk_rendition(s).has_value());
    CHECK(find_cross(s).has_value());
}

TEST_CASE("synthesize: small omega always renders") {
    Graph k5({1, 2, 3, 4, 5}, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4},
                               {2, 5}, {3, 4}, {3, 5}, {4, 5}});
    Society s{k5, {1, 2, 3}};
    auto rho = synthesize_disk_rendition(s);
    REQUIRE(rho.has_value());
    CHECK(validate_decomposition(*rho, s.g).ok());
}

TEST_CASE("two paths equivalence on random societies") {
    Rng rng(77);
    for (int trial = 0; trial < 150; ++trial) {
        Society s = random_society(rng, 9, 6);
        bool cross = find_cross(s).has_value();
        auto rho = synthesize_disk_rendition(s);
        CAPTURE(trial);
        CHECK(cross == !rho.has_value());
        if (rho.has_value()) {
            DecompReport rep = validate_decomposition(*rho, s.g);
            CHECK(rep.ok());
            CHECK(rep.breadth == 0);
        }
    }
}

TEST_CASE("society depth") {
    // C6 with all vertices on omega: depth 2.
    Graph c6({1, 2, 3, 4, 5, 6}, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {1, 6}});
    Society s{c6, {1, 2, 3, 4, 5, 6}};
    CHECK(society_depth(s) == 2);

    Graph k2({1, 2}, {{1, 2}});
    Society s2{k2, {1, 2}};
    CHECK(society_depth(s2) == 1);

    // Depth is monotone under edge deletion.
    Graph c6minus({1, 2, 3, 4, 5, 6}, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}});
    Society s3{c6minus, {1, 2, 3, 4, 5, 6}};
    CHECK(society_depth(s3) <= 2);
}

TEST_CASE("classification basics") {
    // Hand-nested planar transaction: wider arcs dive deeper, so the
    // family nests cleanly on one side of the disk, center untouched.
    CylinderFixture fx = cylinder_rendition(5, 10, 4);
    Society s{fx.g, fx.omega};
    auto build = [&](int k, int depth, int to) {
        Path p;
        for (int r = 0; r <= depth; ++r) p.push_back(fx.rings[r][k]);
        for (int i = (k + 1) % 10;; i = (i + 1) % 10) {
            p.push_back(fx.rings[depth][i]);
            if (i == to) break;
        }
        for (int r = depth - 1; r >= 0; --r) p.push_back(fx.rings[r][to]);
        return p;
    };
    Transaction t;
    t.seg_a = {0, 2};
    t.seg_b = {5, 7};
    for (int k = 0; k < 3; ++k) t.linkage.paths.push_back(build(k, 3 - k, 7 - k));
    REQUIRE(t.linkage.disjoint());
    REQUIRE(t.linkage.paths_in(fx.g));
    TransactionFlags flags = classify(t, s, &fx.rho);
    CHECK(flags.planar);
    CHECK(flags.has_peripheral);
    CHECK_FALSE(flags.crooked);
    CHECK(flags.proper);

    // The max-flow transaction between the same segments may hug both
    // boundary sides; it is still planar.
    auto tf = max_transaction(s, t.seg_a, t.seg_b);
    REQUIRE(tf.has_value());
    CHECK(classify(*tf, s, &fx.rho).planar);

    // Interleaved endpoints: crossing pair on K4 society.
    Graph k4({1, 2, 3, 4}, {{1, 3}, {2, 4}, {1, 2}, {3, 4}});
    Society sk{k4, {1, 2, 3, 4}};
    Transaction tx;
    tx.seg_a = {0, 1};
    tx.seg_b = {2, 3};
    tx.linkage.paths = {{1, 3}, {2, 4}};
    TransactionFlags f2 = classify(tx, sk);
    CHECK_FALSE(f2.planar);
}

TEST_CASE("a transaction through the vortex is not proper") {
    CylinderFixture fx = cylinder_rendition(5, 10, 6);
    auto& cell = fx.rho.cells[fx.center_cell];
    std::vector<Vertex> bd;
    for (int n : cell.nodes) bd.push_back(fx.rho.node_vertex[n]);
    std::vector<Vertex> gv = fx.g.vertices();
    std::vector<Edge> ge = fx.g.edges();
    Edge chord = make_edge(bd[0], bd[3]);
    ge.push_back(chord);
    fx.g = Graph(gv, ge);
    {
        std::vector<Vertex> cv = cell.subgraph.vertices();
        std::vector<Edge> ce = cell.subgraph.edges();
        ce.push_back(chord);
        cell.subgraph = Graph(cv, ce);
        fx.rho.freeze();
    }
    Society s{fx.g, fx.omega};
    auto spoke_down = [&](int pos, int depth) {
        Path p;
        for (int r = 0; r <= depth; ++r) p.push_back(fx.rings[r][pos]);
        return p;
    };
    // Path A: position 0 through the vortex chord to position 3.
    Path through = spoke_down(0, 4);
    {
        Path other = spoke_down(3, 4);
        std::reverse(other.begin(), other.end());
        through.insert(through.end(), other.begin(), other.end());
    }
    // Path B: position 1 to position 2 along ring 3.
    Path shallow = spoke_down(1, 3);
    shallow.push_back(fx.rings[3][2]);
    for (int r = 2; r >= 0; --r) shallow.push_back(fx.rings[r][2]);
    Transaction t;
    t.seg_a = {0, 1};
    t.seg_b = {2, 3};
    t.linkage.paths = {through, shallow};
    REQUIRE(t.linkage.disjoint());
    REQUIRE(t.linkage.paths_in(fx.g));
    TransactionFlags flags = classify(t, s, &fx.rho);
    CHECK_FALSE(flags.proper);
}

TEST_CASE("extract_proper on cylinder fixtures with one vortex") {
    Rng rng(404);
    for (int trial = 0; trial < 6; ++trial) {
        int spokes = 30;
        CylinderFixture fx = cylinder_rendition(13, spokes, 6);
        auto& cell = fx.rho.cells[fx.center_cell];
        std::vector<Vertex> bd;
        for (int n : cell.nodes) bd.push_back(fx.rho.node_vertex[n]);
        std::vector<Vertex> gv = fx.g.vertices();
        std::vector<Edge> ge = fx.g.edges();
        Vertex fresh = 90000;
        std::vector<Edge> gut_edges;
        std::vector<Vertex> gut_verts;
        auto add_gut = [&](Vertex x, Vertex y) {
            Vertex mid = fresh++;
            gv.push_back(mid);
            gut_verts.push_back(mid);
            gut_edges.push_back(make_edge(x, mid));
            gut_edges.push_back(make_edge(mid, y));
        };
        add_gut(bd[0], bd[3]);
        add_gut(bd[1], bd[4]);
        for (const Edge& e : gut_edges) ge.push_back(e);
        fx.g = Graph(gv, ge);
        {
            std::vector<Vertex> cv = cell.subgraph.vertices();
            for (Vertex v : gut_verts) cv.push_back(v);
            std::vector<Edge> ce = cell.subgraph.edges();
            for (const Edge& e : gut_edges) ce.push_back(e);
            cell.subgraph = Graph(cv, ce);
            fx.rho.freeze();
        }
        Society s{fx.g, fx.omega};
        int p = 2 + static_cast<int>(rng.below(2));
        int need = 2 * (2 * 2 + p);  // (x+1)(2xy+p), x=1, y=2
        OmegaSegment a{0, need - 1}, b{spokes / 2, (spokes / 2 + need - 1) % spokes};
        auto t = max_transaction(s, a, b);
        REQUIRE(t.has_value());
        REQUIRE(t->linkage.order() >= need);
        t->linkage.paths.resize(need);
        Transaction sub = extract_proper(fx.rho, s, *t, p);
        CHECK(sub.linkage.order() == p);
        TransactionFlags flags = classify(sub, s, &fx.rho);
        CHECK(flags.proper);
        auto ordered = planar_order(*t, s);
        bool exists = false;
        for (int st = 0; st + p <= static_cast<int>(ordered.size()); ++st) {
            Transaction cand;
            cand.seg_a = t->seg_a;
            cand.seg_b = t->seg_b;
            for (int i = st; i < st + p; ++i) cand.linkage.paths.push_back(ordered[i]);
            if (classify(cand, s, &fx.rho).proper) exists = true;
        }
        CHECK(exists);
    }
}

TEST_CASE("refusal on undersized proper extraction") {
    CylinderFixture fx = cylinder_rendition(4, 12, 4);
    Society s{fx.g, fx.omega};
    OmegaSegment a{0, 2}, b{6, 8};
    auto t = max_transaction(s, a, b);
    REQUIRE(t.has_value());
    CHECK_THROWS_AS(extract_proper(fx.rho, s, *t, 3), RefusalError);
}

TEST_CASE("parcels and splitting classification") {
    // Nest rings 1..3 (innermost ring 3 first); paths dive to rings 4..6
    // with wider arcs deeper, crossing every nest cycle exactly twice.
    CylinderFixture fx = cylinder_rendition(8, 16, 4);
    Society s{fx.g, fx.omega};
    int S = 16;
    auto build = [&](int k, int depth, int to) {
        Path p;
        for (int r = 0; r <= depth; ++r) p.push_back(fx.rings[r][k]);
        for (int i = (k + 1) % S;; i = (i + 1) % S) {
            p.push_back(fx.rings[depth][i]);
            if (i == to) break;
        }
        for (int r = depth - 1; r >= 0; --r) p.push_back(fx.rings[r][to]);
        return p;
    };
    Transaction t;
    t.seg_a = {0, 2};
    t.seg_b = {8, 10};
    for (int k = 0; k < 3; ++k) t.linkage.paths.push_back(build(k, 6 - k, 10 - k));
    REQUIRE(t.linkage.disjoint());
    REQUIRE(t.linkage.paths_in(fx.g));
    std::vector<Path> nest{fx.rings[3], fx.rings[2], fx.rings[1]};
    TransactionFlags flags = classify(t, s, &fx.rho, &nest);
    CHECK(flags.planar);
    CHECK(flags.proper);
    CHECK(flags.exposed);
    CHECK(flags.splitting);
    auto cycles = parcels(t, s, fx.rho, nest[0]);
    CHECK(static_cast<int>(cycles.size()) == t.linkage.order() - 1);
}

TEST_CASE("extract_homogeneous picks a constant window") {
    // Capacity-1 coloring with p = 3 needs order 9.
    CylinderFixture fx = cylinder_rendition(12, 30, 4);
    Society s{fx.g, fx.omega};
    int S = 30;
    auto build = [&](int k, int depth, int to) {
        Path p;
        for (int r = 0; r <= depth; ++r) p.push_back(fx.rings[r][k]);
        for (int i = (k + 1) % S;; i = (i + 1) % S) {
            p.push_back(fx.rings[depth][i]);
            if (i == to) break;
        }
        for (int r = depth - 1; r >= 0; --r) p.push_back(fx.rings[r][to]);
        return p;
    };
    Transaction t;
    t.seg_a = {0, 8};
    t.seg_b = {15, 23};
    for (int k = 0; k < 9; ++k) t.linkage.paths.push_back(build(k, 10 - k, 23 - k));
    REQUIRE(t.linkage.disjoint());
    REQUIRE(t.linkage.paths_in(fx.g));
    std::vector<Path> nest{fx.rings[1]};
    CellColoring chi;
    for (int c : fx.rho.simple_cells()) chi.assignment[c] = 1;
    Transaction q = extract_homogeneous(t, s, fx.rho, nest[0], chi, 3);
    CHECK(q.linkage.order() == 3);
    auto qc = parcels(q, s, fx.rho, nest[0]);
    std::set<Vertex> avoid;
    for (int n : fx.rho.omega_nodes) avoid.insert(fx.rho.node_vertex[n]);
    ColorSet first = 0;
    bool got = false;
    for (const auto& cyc : qc) {
        ColorSet cs = 0;
        for (int c : influence(cyc, avoid, fx.rho)) {
            auto it = chi.assignment.find(c);
            if (it != chi.assignment.end()) cs |= color_bit(it->second);
        }
        if (!got) {
            first = cs;
            got = true;
        } else {
            CHECK(cs == first);
        }
    }
}

TEST_CASE("coterminal radial linkage") {
    CylinderFixture fx = cylinder_rendition(5, 9, 4);
    Society s{fx.g, fx.omega};
    // Nest: rings 1..3; radial linkages along spokes, rotated endpoints.
    std::vector<Path> nest{fx.rings[1], fx.rings[2], fx.rings[3]};
    auto spoke = [&](int i) {
        Path p;
        for (int k = 0; k < 5; ++k) p.push_back(fx.rings[k][i]);
        std::reverse(p.begin(), p.end());  // inner -> omega
        return p;
    };
    Linkage from, to;
    for (int i = 0; i < 3; ++i) from.paths.push_back(spoke(i));
    for (int i = 0; i < 3; ++i) to.paths.push_back(spoke((i + 4) % 9));
    // from == to qualifies trivially.
    Linkage same = coterminal_radial_linkage(s, nest, from, from);
    CHECK(same.order() == 3);
    Linkage q = coterminal_radial_linkage(s, nest, from, to);
    CHECK(q.order() == 3);
    // Orthogonality: each cycle meets each path once (checked internally,
    // assert endpoints).
    std::set<Vertex> starts, ends;
    for (const auto& p : from.paths) starts.insert(p.front());
    for (const auto& p : to.paths) ends.insert(p.back());
    for (const auto& p : q.paths) {
        CHECK(starts.count(p.front()));
        CHECK(ends.count(p.back()));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walloid/rng.hpp"
#include "walloid/wall.hpp"

using namespace walloid;

namespace {

// Independent census: grid minus parity matching, counted directly.
struct WallCensus {
    int vertices, edges;
};
WallCensus wall_segment_census(int r, int t) {
    int m = 2 * t;
    int v = r * m;
    int e = r * (m - 1);  // row edges
    for (int i = 1; i < r; ++i)
        for (int j = 1; j <= m; ++j) {
            bool removed = (j % 2 == 1 && i % 2 == 1) || (j % 2 == 0 && i % 2 == 0);
            if (!removed) ++e;
        }
    return {v, e};
}

}  // namespace

TEST_CASE("elementary grid censuses") {
    GridHandle g = elementary_grid(2, 2);
    CHECK(g.host.num_vertices() == 4);
    CHECK(g.host.num_edges() == 4);
    CHECK(recognize_grid(g));

    GridHandle big = elementary_grid(5, 10);
    CHECK(big.host.num_vertices() == 50);
    CHECK(recognize_grid(big));

    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng.below(7));
        int m = 1 + static_cast<int>(rng.below(7));
        GridHandle gh = elementary_grid(n, m);
        CHECK(gh.host.num_edges() == n * (m - 1) + m * (n - 1));
        CHECK(recognize_grid(gh));
    }
}

TEST_CASE("wall and wall segment censuses for small parameters") {
    for (int t = 3; t <= 6; ++t)
        for (int z = 3; z <= 6; ++z) {
            WallHandle seg = elementary_wall_segment(t, z);
            WallCensus c = wall_segment_census(t, z);
            CHECK(seg.host.num_vertices() == c.vertices);
            CHECK(seg.host.num_edges() == c.edges);
            CHECK(static_cast<int>(seg.top_bd.size()) == z);
            CHECK(static_cast<int>(seg.bot_bd.size()) == z);
            CHECK(static_cast<int>(seg.left_bd.size()) == t);
            CHECK(recognize_wall(seg));

            WallHandle w = elementary_wall(t, z);
            CHECK(w.host.num_vertices() == c.vertices - 2);
            CHECK(recognize_wall(w));
            int expected_bricks =
                (w.host.num_edges() - w.host.num_vertices() + 2) - 1;
            CHECK(static_cast<int>(w.brick_faces().size()) == expected_bricks);
            CHECK(expected_bricks == (t - 1) * (z - 1));
        }
}

TEST_CASE("the (5x5) wall comes from the (5x10) grid") {
    WallHandle w = elementary_wall(5, 5);
    GridHandle g = elementary_grid(5, 10);
    CHECK(w.host.num_vertices() == g.host.num_vertices() - 2);
    CHECK(recognize_wall(w));
    for (const Edge& e : w.host.edges()) CHECK(g.host.has_edge(e.first, e.second));
}

TEST_CASE("recognizer rejects single edge deletions") {
    WallHandle w = elementary_wall(4, 5);
    Rng rng(31);
    const auto& es = w.host.edges();
    for (int trial = 0; trial < 60; ++trial) {
        Edge gone = es[rng.below(es.size())];
        WallHandle broken = w;
        std::vector<Edge> keep;
        for (const Edge& e : es)
            if (e != gone) keep.push_back(e);
        broken.host = Graph(w.host.vertices(), keep);
        CHECK_FALSE(recognize_wall(broken));
    }
}

TEST_CASE("annulus wall closure") {
    WallHandle a = elementary_annulus_wall(5, 5);
    CHECK(recognize_wall(a));
    WallHandle seg = elementary_wall_segment(5, 5);
    CHECK(a.host.num_edges() == seg.host.num_edges() + 5);
    CHECK(static_cast<int>(a.brick_faces().size()) == 4 * 5);
    CHECK(a.skel.euler_genus() == 0);
}

TEST_CASE("segment constructors and their anatomy") {
    SegmentHandle h = elementary_handle_segment(5, 5);
    CHECK(recognize_segment(h));
    CHECK(h.rainbow.size() == 5);
    CHECK(h.rainbow_right.size() == 5);

    SegmentHandle cc = elementary_crosscap_segment(5, 5);
    CHECK(recognize_segment(cc));
    CHECK(cc.rainbow.size() == 10);  // single 2t-path linkage

    SegmentHandle fl = elementary_flap_segment(5, 5, 3);
    CHECK(recognize_segment(fl));
    CHECK(fl.hyperedge.size() == 3);
    CHECK_THROWS_AS(elementary_flap_segment(5, 5, 4), InputError);
    CHECK_THROWS_AS(elementary_flap_segment(5, 5, 0), InputError);

    SegmentHandle vx = elementary_vortex_segment(5, 5, 3);
    CHECK(recognize_segment(vx));
    CHECK(vx.nest.size() == 5);  // s + 2
    CHECK(vx.radial.size() == 5);
    CHECK_THROWS_AS(elementary_vortex_segment(5, 3, 3), InputError);
}

TEST_CASE("segment recognizers reject random edge deletions") {
    Rng rng(77);
    SegmentHandle vx = elementary_vortex_segment(4, 5, 2);
    for (int trial = 0; trial < 40; ++trial) {
        const auto& es = vx.base.host.edges();
        Edge gone = es[rng.below(es.size())];
        SegmentHandle broken = vx;
        std::vector<Edge> keep;
        for (const Edge& e : es)
            if (e != gone) keep.push_back(e);
        broken.base.host = Graph(vx.base.host.vertices(), keep);
        CHECK_FALSE(recognize_segment(broken));
    }
}

TEST_CASE("walloid closure: annulus case and census invariants") {
    SegmentHandle seg;
    seg.kind = SegKind::Wall;
    seg.base = elementary_wall_segment(5, 5);
    seg.t = 5;
    WalloidHandle w = cylindrical_closure({seg});
    CHECK(w.r + w.t == 5);
    CHECK(recognize_walloid(w));
    CHECK(w.enclosures.size() == 1);  // 2h + c + 1 with h = c = 0
    CHECK(w.skel.euler_genus() == 0);
    CHECK(w.host.num_edges() == seg.base.host.num_edges() + 5);
}

TEST_CASE("walloid shapes: enclosures and Euler genus") {
    Rng rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        WalloidShape shape;
        shape.r = 1 + static_cast<int>(rng.below(2));
        shape.t = 3 + static_cast<int>(rng.below(2));
        shape.h = static_cast<int>(rng.below(2));
        shape.c = static_cast<int>(rng.below(3));
        int flaps = static_cast<int>(rng.below(3));
        for (int i = 0; i < flaps; ++i)
            shape.flap_arities.push_back(1 + static_cast<int>(rng.below(3)));
        shape.vortices = static_cast<int>(rng.below(2));
        shape.s = 1 + static_cast<int>(rng.below(2));
        if (shape.vortices > 0) shape.t = 4;
        CAPTURE(shape.r);
        CAPTURE(shape.t);
        CAPTURE(shape.h);
        CAPTURE(shape.c);
        CAPTURE(flaps);
        CAPTURE(shape.vortices);
        WalloidHandle w = elementary_walloid(shape);
        CHECK(recognize_walloid(w));
        CHECK(static_cast<int>(w.enclosures.size()) == 2 * shape.h + shape.c + 1);
        CHECK(w.skel.euler_genus() == 2 * shape.h + shape.c);
    }
}

TEST_CASE("subwall extraction and recognition") {
    WallHandle w = elementary_wall(9, 9);
    CHECK(is_subwall(w, w));
    std::vector<int> rows{2, 3, 4}, cols{3, 4, 5};
    WallHandle sub = take_subwall(w, rows, cols);
    CHECK(sub.r == 3);
    CHECK(sub.t == 3);
    CHECK(recognize_wall(sub));
    CHECK(is_subwall(sub, w));
    CHECK(static_cast<int>(sub.brick_faces().size()) == 4);

    for (int i = 0; i + 3 <= 9; i += 3)
        for (int j = 0; j + 3 <= 9; j += 3) {
            WallHandle win = take_subwall(w, {i, i + 1, i + 2}, {j, j + 1, j + 2});
            CHECK(recognize_wall(win));
            CHECK(is_subwall(win, w));
        }

    WallHandle bogus = sub;
    Path mixed = w.rows[5];
    mixed.resize(mixed.size() / 2);
    Path tail = w.rows[6];
    mixed.insert(mixed.end(), tail.begin() + tail.size() / 2, tail.end());
    bogus.rows[1] = mixed;
    CHECK_FALSE(is_subwall(bogus, w));

    WallHandle sparse = take_subwall(w, {0, 4, 8}, {0, 4, 8});
    CHECK(recognize_wall(sparse));
    CHECK(is_subwall(sparse, w));
}

TEST_CASE("ladders") {
    LadderHandle l2 = elementary_ladder(2);
    CHECK(l2.num_bricks() == 1);
    CHECK(recognize_ladder(l2));
    for (int t = 2; t <= 6; ++t) {
        LadderHandle l = elementary_ladder(t);
        CHECK(l.num_bricks() == t - 1);
        CHECK(recognize_ladder(l));
    }
    LadderHandle l6 = elementary_ladder(6);
    LadderHandle sub = take_subladder(l6, {0, 2, 5});
    CHECK(recognize_ladder(sub));
    CHECK(sub.num_bricks() == 2);
}

TEST_CASE("fences: distance recursion and pegs") {
    WalloidShape shape;
    shape.r = 4;
    shape.t = 4;  // 8-row annulus: plenty of room
    WalloidHandle w = elementary_walloid(shape);
    auto bricks = w.brick_faces();
    REQUIRE_FALSE(bricks.empty());
    int pick = -1;
    for (int b : bricks) {
        auto cyc = w.face_cycle(b);
        std::set<Vertex> cs(w.base_cycles[3].begin(), w.base_cycles[3].end());
        std::set<Vertex> cs2(w.base_cycles[4].begin(), w.base_cycles[4].end());
        int on3 = 0, on4 = 0;
        for (Vertex v : cyc) {
            if (cs.count(v)) ++on3;
            if (cs2.count(v)) ++on4;
        }
        if (on3 >= 2 && on4 >= 2) {
            pick = b;
            break;
        }
    }
    REQUIRE(pick >= 0);
    Fence f0 = w.fence_of_face(pick);
    Fence same = w.fence_at_distance(f0, 0);
    CHECK(same.bricks == f0.bricks);
    Fence f1 = w.fence_at_distance(f0, 1);
    CHECK(f1.bricks.size() > f0.bricks.size());
    Fence f2a = w.fence_at_distance(f1, 1);
    Fence f2b = w.fence_at_distance(f0, 2);
    CHECK(f2a.bricks == f2b.bricks);
    auto ip = w.internal_pegs(f1);
    auto ep = w.external_pegs(f1);
    CHECK_FALSE(ip.empty());
    CHECK_FALSE(ep.empty());
}

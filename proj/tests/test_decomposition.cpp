#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walloid/decomposition.hpp"
#include "walloid/fixtures.hpp"
#include "walloid/rng.hpp"
#include "walloid/wall.hpp"

using namespace walloid;

TEST_CASE("trivial decomposition: one boundary-less cell holding everything") {
    Graph g({1, 2, 3}, {{1, 2}, {2, 3}});
    SigmaDecomposition d;
    // Frame: no nodes; one cell with empty boundary. The frame map needs
    // at least a face to host the cell, so give it a lone technical node.
    d.frame = CombinatorialMap(0);
    DecompCell cell;
    cell.subgraph = g;
    cell.face = 0;
    d.cells.push_back(cell);
    d.freeze();
    DecompReport rep = validate_decomposition(d, g);
    CHECK(rep.edges_covered);
    CHECK(rep.cells_meet_in_nodes);
    CHECK(rep.breadth == 0);  // empty boundary counts by arity: simple
}

TEST_CASE("canonical decomposition of a plain annulus walloid validates") {
    WalloidShape shape;
    shape.r = 2;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    DecompReport rep = validate_decomposition(cd.delta, cd.g);
    CHECK(rep.disjoint_interiors);
    CHECK(rep.boundaries_in_nodes);
    CHECK(rep.cells_meet_in_nodes);
    CHECK(rep.edges_covered);
    CHECK(rep.frame_consistent);
    CHECK(rep.breadth == 0);
    // Frame genus matches the walloid skeleton genus.
    CHECK(cd.delta.frame.euler_genus() == w.skel.euler_genus());
}

TEST_CASE("canonical decomposition with flaps and a vortex") {
    WalloidShape shape;
    shape.r = 1;
    shape.t = 4;
    shape.flap_arities = {3, 2};
    shape.vortices = 1;
    shape.s = 1;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    DecompReport rep = validate_decomposition(cd.delta, cd.g);
    CHECK(rep.ok());
    CHECK(rep.breadth == 1);  // the vortex hyperedge cell
    CHECK(cd.delta.frame.euler_genus() == w.skel.euler_genus());
    CHECK(cd.flap_cell.size() == 2);
    CHECK(cd.vortex_cell.size() == 1);
    int vc = cd.vortex_cell.begin()->second;
    CHECK(cd.delta.cells[vc].arity() == 4);
}

TEST_CASE("mutation: moving an edge into a second cell breaks condition 4") {
    WalloidShape shape;
    shape.r = 2;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    // Duplicate one edge into another cell's subgraph.
    Edge e = *w.skeleton_edges().begin();
    for (auto& cell : cd.delta.cells) {
        if (cell.subgraph.has_edge(e.first, e.second)) continue;
        if (cell.arity() != 2) continue;
        std::vector<Vertex> vs = cell.subgraph.vertices();
        vs.push_back(e.first);
        vs.push_back(e.second);
        std::vector<Edge> es = cell.subgraph.edges();
        es.push_back(e);
        cell.subgraph = Graph(vs, es);
        break;
    }
    DecompReport rep = validate_decomposition(cd.delta, cd.g);
    bool both = rep.edges_covered && rep.cells_meet_in_nodes;
    CHECK_FALSE(both);
}

TEST_CASE("grounded queries and traces on the canonical decomposition") {
    WalloidShape shape;
    shape.r = 2;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    // A base cycle: grounded (every edge in its own cell) and its trace
    // closes up.
    const Path& cyc = w.base_cycles[1];
    CHECK(is_grounded(cyc, true, cd.delta));
    Trace t = trace_of(cyc, true, cd.delta);
    CHECK(t.arc_walk.size() == cyc.size());
    CHECK(is_contractible(cyc, cd.delta));

    // Avoiding disk: the side of the middle cycle away from the bottom.
    std::set<int> avoid;
    for (Vertex v : w.simple_cycle) avoid.insert(cd.delta.node_of(v));
    auto disk = avoiding_disk(cyc, avoid, cd.delta);
    REQUIRE(disk.has_value());
    // The top cycle's nodes are inside that disk.
    for (Vertex v : w.big_enclosure) CHECK(disk->inner_nodes.count(cd.delta.node_of(v)));
}

TEST_CASE("influence of a brick fence") {
    WalloidShape shape;
    shape.r = 3;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    auto bricks = w.brick_faces();
    // A brick away from the simple cycle.
    std::set<Vertex> si(w.simple_cycle.begin(), w.simple_cycle.end());
    int pick = -1;
    for (int b : bricks) {
        bool touches = false;
        for (Vertex v : w.face_cycle(b))
            if (si.count(v)) touches = true;
        if (!touches) {
            pick = b;
            break;
        }
    }
    REQUIRE(pick >= 0);
    Fence f = w.fence_of_face(pick);
    std::set<Vertex> csi(w.simple_cycle.begin(), w.simple_cycle.end());
    std::set<int> inf = influence(f.cycle, csi, cd.delta);
    // Every fence-cycle edge's cell is in the influence.
    for (size_t i = 0; i < f.cycle.size(); ++i) {
        int c = cd.delta.cell_of_edge(f.cycle[i], f.cycle[(i + 1) % f.cycle.size()]);
        CHECK(inf.count(c));
    }
    CHECK_FALSE(inf.empty());

    // Disjoint fences have disjoint influences.
    int other = -1;
    std::set<Vertex> fverts(f.cycle.begin(), f.cycle.end());
    for (int b : bricks) {
        bool touches = false;
        for (Vertex v : w.face_cycle(b))
            if (si.count(v) || fverts.count(v)) touches = true;
        if (!touches && b != pick) {
            other = b;
            break;
        }
    }
    if (other >= 0) {
        Fence f2 = w.fence_of_face(other);
        std::set<int> inf2 = influence(f2.cycle, csi, cd.delta);
        for (int c : inf2) CHECK_FALSE(inf.count(c));
    }
}

TEST_CASE("a cell belongs to at most three brick-fence influences") {
    WalloidShape shape;
    shape.r = 2;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    std::set<Vertex> csi(w.simple_cycle.begin(), w.simple_cycle.end());
    std::map<int, int> hits;
    for (int b : w.brick_faces()) {
        Fence f = w.fence_of_face(b);
        bool ok = true;
        for (Vertex v : f.cycle)
            if (csi.count(v)) ok = false;
        auto exc = w.face_cycle(w.exceptional_face);
        std::set<Vertex> ex(exc.begin(), exc.end());
        for (Vertex v : f.cycle)
            if (ex.count(v)) ok = false;
        if (!ok) continue;
        for (int c : influence(f.cycle, csi, cd.delta)) hits[c]++;
    }
    for (auto& [c, n] : hits) CHECK(n <= 3);
}

TEST_CASE("attach_brick_gut yields a valid richer decomposition") {
    WalloidShape shape;
    shape.r = 2;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    CanonicalDecomp cd = canonical_decomposition(w);
    auto bricks = w.brick_faces();
    Vertex fresh = 100000;
    int added = 0;
    for (int b : bricks) {
        if (added == 3) break;
        attach_brick_gut(cd, w, b, fresh++);
        ++added;
    }
    DecompReport rep = validate_decomposition(cd.delta, cd.g);
    CHECK(rep.ok());
}

TEST_CASE("cylinder rendition fixture validates") {
    CylinderFixture fx = cylinder_rendition(3, 8, 4);
    DecompReport rep = validate_decomposition(fx.rho, fx.g);
    CHECK(rep.ok());
    CHECK(rep.breadth == 1);
    CHECK(fx.rho.frame.euler_genus() == 0);
    CHECK(fx.rho.outside_face >= 0);
    // Omega nodes in cyclic order on the boundary.
    CHECK(fx.rho.omega_nodes.size() == 8);
    // Rings are grounded contractible cycles.
    for (const auto& ring : fx.rings) {
        CHECK(is_grounded(ring, true, fx.rho));
        CHECK(is_contractible(ring, fx.rho));
    }
}

TEST_CASE("avoiding disk is unique on random cylinder cycles") {
    CylinderFixture fx = cylinder_rendition(4, 7, 3);
    std::set<int> avoid(fx.rho.omega_nodes.begin(), fx.rho.omega_nodes.end());
    for (int k = 1; k < 4; ++k) {
        auto disk = avoiding_disk(fx.rings[k], avoid, fx.rho);
        REQUIRE(disk.has_value());
        // Deeper rings are inside.
        for (int j = k + 1; j < 4; ++j)
            for (Vertex v : fx.rings[j])
                CHECK(disk->inner_nodes.count(fx.rho.node_of(v)));
    }
}

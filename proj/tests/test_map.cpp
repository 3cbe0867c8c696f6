#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walloid/map.hpp"

using namespace walloid;

TEST_CASE("cycle with planar rotation: 2 faces, genus 0") {
    for (int n = 3; n <= 7; ++n) {
        CombinatorialMap m(n);
        for (int i = 0; i < n; ++i) m.add_edge(i, (i + 1) % n);
        CHECK(m.num_faces() == 2);
        CHECK(m.euler_genus() == 0);
        CHECK(m.orientable());
    }
}

TEST_CASE("K4 with planar rotation: 4 faces, genus 0") {
    CombinatorialMap m(4);
    // Outer triangle 0-1-2 with 3 in the middle; rotations chosen planar.
    int e01 = m.add_edge(0, 1);
    int e12 = m.add_edge(1, 2);
    int e20 = m.add_edge(2, 0);
    int e03 = m.add_edge(0, 3);
    int e13 = m.add_edge(1, 3);
    int e23 = m.add_edge(2, 3);
    m.set_rotation(0, {2 * e01, 2 * e03, 2 * e20 + 1});
    m.set_rotation(1, {2 * e12, 2 * e13, 2 * e01 + 1});
    m.set_rotation(2, {2 * e20, 2 * e23, 2 * e12 + 1});
    m.set_rotation(3, {2 * e03 + 1, 2 * e13 + 1, 2 * e23 + 1});
    CHECK(m.num_faces() == 4);
    CHECK(m.euler_genus() == 0);
    CHECK(m.orientable());
}

TEST_CASE("K4 with one rotation flipped: torus") {
    CombinatorialMap m(4);
    int e01 = m.add_edge(0, 1);
    int e12 = m.add_edge(1, 2);
    int e20 = m.add_edge(2, 0);
    int e03 = m.add_edge(0, 3);
    int e13 = m.add_edge(1, 3);
    int e23 = m.add_edge(2, 3);
    m.set_rotation(0, {2 * e01, 2 * e03, 2 * e20 + 1});
    m.set_rotation(1, {2 * e12, 2 * e13, 2 * e01 + 1});
    m.set_rotation(2, {2 * e20, 2 * e23, 2 * e12 + 1});
    m.set_rotation(3, {2 * e03 + 1, 2 * e23 + 1, 2 * e13 + 1});
    // Still orientable (rotation systems always are), genus from tracing.
    CHECK(m.orientable());
    CHECK(m.euler_genus() == 2);  // torus has Euler genus 2
}

TEST_CASE("one twisted loop: projective plane") {
    CombinatorialMap m(1);
    m.add_edge(0, 0, true);
    CHECK(m.num_faces() == 1);
    CHECK(m.euler_genus() == 1);
    CHECK_FALSE(m.orientable());
}

TEST_CASE("untwisted loop: sphere") {
    CombinatorialMap m(1);
    m.add_edge(0, 0, false);
    CHECK(m.num_faces() == 2);
    CHECK(m.euler_genus() == 0);
}

TEST_CASE("two parallel edges: sphere 2-gon") {
    CombinatorialMap m(2);
    m.add_edge(0, 1);
    m.add_edge(0, 1);
    CHECK(m.num_faces() == 2);
    CHECK(m.euler_genus() == 0);
}

TEST_CASE("twisted edge in a theta graph makes it non-orientable") {
    CombinatorialMap m(2);
    m.add_edge(0, 1);
    m.add_edge(0, 1);
    m.add_edge(0, 1, true);
    CHECK_FALSE(m.orientable());
    CHECK(m.connected());
    CHECK(m.euler_genus() >= 1);
}

TEST_CASE("cut_along a planar cycle separates into two disks") {
    // 3x3 grid-ish planar map: a 4-cycle with a vertex inside and outside.
    CombinatorialMap m(6);
    int c01 = m.add_edge(0, 1);
    int c12 = m.add_edge(1, 2);
    int c23 = m.add_edge(2, 3);
    int c30 = m.add_edge(3, 0);
    int i04 = m.add_edge(0, 4);  // 4 inside
    int i24 = m.add_edge(2, 4);
    int o15 = m.add_edge(1, 5);  // 5 outside
    int o35 = m.add_edge(3, 5);
    m.set_rotation(0, {2 * c01, 2 * i04, 2 * c30 + 1});
    m.set_rotation(1, {2 * c12, 2 * c01 + 1, 2 * o15});
    m.set_rotation(2, {2 * c23, 2 * i24, 2 * c12 + 1});
    m.set_rotation(3, {2 * c30, 2 * c23 + 1, 2 * o35});
    m.set_rotation(4, {2 * i04 + 1, 2 * i24 + 1});
    m.set_rotation(5, {2 * o15 + 1, 2 * o35 + 1});
    REQUIRE(m.euler_genus() == 0);

    std::vector<int> walk{2 * c01, 2 * c12, 2 * c23, 2 * c30};
    CutResult cut = cut_along(m, walk);
    REQUIRE(cut.two_sided);
    CHECK(cut.left_is_disk);
    CHECK(cut.right_is_disk);
    std::set<int> inner_union;
    inner_union.insert(cut.left_inner_vertices.begin(), cut.left_inner_vertices.end());
    inner_union.insert(cut.right_inner_vertices.begin(), cut.right_inner_vertices.end());
    CHECK(inner_union == std::set<int>{4, 5});
    // 4 and 5 are on opposite sides.
    CHECK(cut.left_inner_vertices != cut.right_inner_vertices);
    CHECK(cut.left_inner_vertices.size() == 1);
}

TEST_CASE("cut_along a non-separating torus cycle reports one side") {
    // Torus as a single vertex with two untwisted loops interleaved.
    CombinatorialMap m(2);
    // Use a 2-vertex torus: edges a,b parallel and c,d parallel interleaved.
    int a = m.add_edge(0, 1);
    int b = m.add_edge(0, 1);
    int c = m.add_edge(0, 1);
    int d = m.add_edge(0, 1);
    m.set_rotation(0, {2 * a, 2 * b, 2 * c, 2 * d});
    m.set_rotation(1, {2 * a + 1, 2 * b + 1, 2 * c + 1, 2 * d + 1});
    // Rotations equal on both sides interleave the 2-gons: genus 2 (torus).
    REQUIRE(m.euler_genus() == 2);
    std::vector<int> walk{2 * a, 2 * b + 1};
    CutResult cut = cut_along(m, walk);
    CHECK_FALSE(cut.two_sided);
}

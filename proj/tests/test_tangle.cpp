#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walloid/rng.hpp"
#include "walloid/tangle.hpp"

using namespace walloid;

TEST_CASE("empty orientation fails axiom 1") {
    Graph g({1, 2, 3}, {{1, 2}, {2, 3}});
    CHECK_FALSE(is_tangle(g, {}, 1));
}

TEST_CASE("K3 order-1 tangle") {
    Graph k3({1, 2, 3}, {{1, 2}, {2, 3}, {1, 3}});
    // Only order-0 separations: (∅, V) and (V, ∅); orient ∅ small.
    std::vector<Separation> o{{{}, {1, 2, 3}}};
    CHECK(is_tangle(k3, o, 1));
    std::vector<Separation> bad{{{1, 2, 3}, {}}};
    CHECK_FALSE(is_tangle(k3, bad, 1));
}

TEST_CASE("wall tangles validate and flips break them") {
    for (int t : {3, 4}) {
        WallHandle w = elementary_wall(t, t);
        const Graph& g = w.host;
        Tangle tg = materialize_tangle(g, wall_tangle_rule(w), t, 64);
        CHECK(tg.order == t);
        CHECK(is_tangle(g, tg.oriented, t, 64));
        // Truncation of itself.
        CHECK(is_truncation(tg, tg));
        // Mutations: flipping any one orientation is rejected.
        Rng rng(t);
        for (int trial = 0; trial < 25; ++trial) {
            auto mutated = tg.oriented;
            size_t pick = rng.below(mutated.size());
            std::swap(mutated[pick].a, mutated[pick].b);
            CHECK_FALSE(is_tangle(g, mutated, t, 64));
        }
    }
}

TEST_CASE("subwall tangles are truncations") {
    WallHandle w = elementary_wall(4, 4);
    WallHandle sub = take_subwall(w, {0, 1, 2}, {0, 1, 2});
    const Graph& g = w.host;
    Tangle big = materialize_tangle(g, wall_tangle_rule(w), 4, 64);
    Tangle small = materialize_tangle(g, wall_tangle_rule(sub), 3, 64);
    CHECK(is_truncation(small, big));
    CHECK(controls_wall(g, big, sub, 64));
}

TEST_CASE("model control") {
    WallHandle w = elementary_wall(3, 3);
    const Graph& g = w.host;
    TangleRule rule = wall_tangle_rule(w);
    // K2 model with branch sets on two rows: controlled.
    Graph k2({1, 2}, {{1, 2}});
    MinorModel mu;
    mu.pattern = k2;
    mu.branch[1] = std::set<Vertex>(w.rows[0].begin(), w.rows[0].end());
    mu.branch[2] = std::set<Vertex>(w.rows[1].begin(), w.rows[1].end());
    auto verdict = controls_model(g, rule, mu, 64);
    CHECK(verdict.controlled);
    CHECK(verdict.mode == 'x');

    // Plant a branch set inside a corner: the corner separation hides it.
    MinorModel bad;
    bad.pattern = k2;
    // A corner piece: first two vertices of row 1 beyond the perimeter...
    // use a single perimeter subdivision vertex, separated by its two
    // neighbors (order 2 < 2 is false for K2, so grow the pattern).
    Graph k3({1, 2, 3}, {{1, 2}, {2, 3}, {1, 3}});
    bad.pattern = k3;
    Vertex corner = w.rows[0][0];
    bad.branch[1] = {corner};
    bad.branch[2] = std::set<Vertex>(w.rows[1].begin(), w.rows[1].end());
    bad.branch[3] = std::set<Vertex>(w.rows[2].begin(), w.rows[2].end());
    auto verdict2 = controls_model(g, rule, bad, 64);
    CHECK_FALSE(verdict2.controlled);

    // Certificate mode confirms the violation found.
    auto cert = check_control_certificate(g, rule, bad, verdict2.violation);
    CHECK_FALSE(cert.controlled);
    CHECK(cert.mode == 'c');
}

TEST_CASE("walloid tangle rule orients") {
    WalloidShape shape;
    shape.r = 1;
    shape.t = 3;
    WalloidHandle w = elementary_walloid(shape);
    const Graph& g = w.host;
    TangleRule rule = walloid_tangle_rule(w);
    // Low-order separations orient cleanly.
    for (const Separation& s : enumerate_separations(g, 3, 64))
        CHECK(rule(s) != 0);
}

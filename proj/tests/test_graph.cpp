#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "oracles.hpp"
#include "walloid/graph.hpp"
#include "walloid/rng.hpp"

using namespace walloid;

namespace {
Graph grid3x3() {
    std::vector<Vertex> vs;
    std::vector<Edge> es;
    auto id = [](int i, int j) { return 3 * i + j + 1; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) vs.push_back(id(i, j));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (j + 1 < 3) es.push_back(make_edge(id(i, j), id(i, j + 1)));
            if (i + 1 < 3) es.push_back(make_edge(id(i, j), id(i + 1, j)));
        }
    return Graph(vs, es);
}
}  // namespace

TEST_CASE("graph basics and invariants") {
    Graph g({1, 2, 3}, {{1, 2}, {2, 3}});
    CHECK(g.num_vertices() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.rank(1) == 1);
    CHECK(g.rank(3) == 3);
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(1, 3));
    CHECK_THROWS_AS(Graph({1}, {{1, 1}}), InputError);
    CHECK_THROWS_AS(Graph({1, 2}, {{1, 3}}), InputError);
}

TEST_CASE("disjoint_paths: unique path") {
    Graph g({1, 2, 3}, {{1, 2}, {2, 3}});
    auto l = disjoint_paths(g, {1}, {3}, 1);
    REQUIRE(l.has_value());
    CHECK(l->paths == std::vector<std::vector<Vertex>>{{1, 2, 3}});
    CHECK_FALSE(disjoint_paths(g, {1}, {3}, 2).has_value());
}

TEST_CASE("disjoint_paths: grid columns") {
    Graph g = grid3x3();
    std::set<Vertex> top{1, 2, 3}, bottom{7, 8, 9};
    auto l = disjoint_paths(g, top, bottom, 3);
    REQUIRE(l.has_value());
    CHECK(l->order() == 3);
    CHECK(l->disjoint());
    CHECK(l->paths_in(g));
    for (const auto& p : l->paths) {
        CHECK(top.count(p.front()) == 1);
        CHECK(bottom.count(p.back()) == 1);
    }
    CHECK_FALSE(disjoint_paths(g, top, bottom, 4).has_value());
}

TEST_CASE("disjoint_paths equals brute-force min cut on random graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 120; ++trial) {
        Graph g = oracle::random_graph(rng, 6 + static_cast<int>(rng.below(3)), 0.4);
        std::set<Vertex> a, b;
        for (Vertex v : g.vertices()) {
            if (rng.chance(0.35)) a.insert(v);
            if (rng.chance(0.35)) b.insert(v);
        }
        if (a.empty() || b.empty()) continue;
        int flow = max_disjoint_paths(g, a, b);
        int cut = oracle::min_vertex_cut(g, a, b);
        CHECK(flow == cut);
        if (flow > 0) {
            auto l = disjoint_paths(g, a, b, flow);
            REQUIRE(l.has_value());
            CHECK(l->disjoint());
            CHECK(l->paths_in(g));
            // Internal disjointness from A ∪ B.
            for (const auto& p : l->paths)
                for (size_t i = 1; i + 1 < p.size(); ++i) {
                    CHECK(a.count(p[i]) == 0);
                    CHECK(b.count(p[i]) == 0);
                }
        }
    }
}

TEST_CASE("is_minor_model basic") {
    Graph host = grid3x3();
    Graph k1({1}, {});
    MinorModel m{k1, {{1, {5}}}};
    CHECK(is_minor_model(host, m));

    Graph k2({1, 2}, {{1, 2}});
    MinorModel overlap{k2, {{1, {1, 2}}, {2, {2, 3}}}};
    CHECK_FALSE(is_minor_model(host, overlap));

    MinorModel ok{k2, {{1, {1, 2}}, {2, {3}}}};
    CHECK(is_minor_model(host, ok));
    MinorModel disconnected{k2, {{1, {1, 9}}, {2, {3}}}};
    CHECK_FALSE(is_minor_model(host, disconnected));
}

TEST_CASE("enumerate_separations small cases") {
    Graph g({1, 2, 3}, {{1, 2}, {2, 3}});
    auto seps = enumerate_separations(g, 1);
    REQUIRE(seps.size() == 2);  // (V, ∅) and (∅, V)
    for (auto& s : seps) CHECK(s.order() == 0);

    Graph k2({1, 2}, {{1, 2}});
    auto mine = enumerate_separations(k2, 3);
    auto brute = oracle::all_separations_brute(k2, 3);
    CHECK(mine.size() == brute.size());
    // (V, V) has order |V| and is excluded when k <= |V|.
    for (auto& s : enumerate_separations(k2, 2))
        CHECK_FALSE((s.a.size() == 2 && s.b.size() == 2));
}

TEST_CASE("enumerate_separations matches brute force on random graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = oracle::random_graph(rng, 4, 0.5);
        for (int k = 1; k <= 3; ++k) {
            auto mine = enumerate_separations(g, k);
            auto brute = oracle::all_separations_brute(g, k);
            auto key = [](const Separation& s) {
                return std::make_pair(std::vector<Vertex>(s.a.begin(), s.a.end()),
                                      std::vector<Vertex>(s.b.begin(), s.b.end()));
            };
            std::set<decltype(key(mine[0]))> ms, bs;
            for (auto& s : mine) ms.insert(key(s));
            for (auto& s : brute) bs.insert(key(s));
            CHECK(ms == bs);
        }
    }
}

TEST_CASE("separation enumeration is closed under side swap") {
    Rng rng(13);
    Graph g = oracle::random_graph(rng, 5, 0.5);
    auto seps = enumerate_separations(g, 3);
    std::set<std::pair<std::vector<Vertex>, std::vector<Vertex>>> keys;
    for (auto& s : seps)
        keys.insert({std::vector<Vertex>(s.a.begin(), s.a.end()),
                     std::vector<Vertex>(s.b.begin(), s.b.end())});
    for (auto& [a, b] : keys) CHECK(keys.count({b, a}) == 1);
}

TEST_CASE("enumeration cap refuses") {
    std::vector<Vertex> vs;
    for (int i = 0; i < 15; ++i) vs.push_back(i);
    Graph g(vs, {});
    CHECK_THROWS_AS(enumerate_separations(g, 2), RefusalError);
    CHECK_NOTHROW(enumerate_separations(g, 2, 20));
}

TEST_CASE("is_subdivision identity and cycles") {
    Graph g({1, 2, 3, 4}, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    auto w = is_subdivision(g, g);
    REQUIRE(w.has_value());
    CHECK(w->branch.size() == 4);

    Graph c3({1, 2, 3}, {{1, 2}, {2, 3}, {1, 3}});
    Graph c6({1, 2, 3, 4, 5, 6}, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {1, 6}});
    auto w2 = is_subdivision(c6, c3);
    REQUIRE(w2.has_value());
    CHECK(w2->edge_paths.size() == 3);
    size_t total = 0;
    for (auto& [e, p] : w2->edge_paths) total += p.size() - 1;
    CHECK(total == 6);
    CHECK_FALSE(is_subdivision(c3, c6).has_value());

    // K4 subdivided once per edge.
    Graph k4({1, 2, 3, 4}, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    std::vector<Vertex> vs = {1, 2, 3, 4};
    std::vector<Edge> es;
    int next = 10;
    for (const Edge& e : k4.edges()) {
        vs.push_back(next);
        es.push_back(make_edge(e.first, next));
        es.push_back(make_edge(next, e.second));
        ++next;
    }
    Graph k4sub(vs, es);
    CHECK(is_subdivision(k4sub, k4).has_value());
    CHECK_FALSE(is_subdivision(k4sub, c3).has_value());
}

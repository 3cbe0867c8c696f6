#pragma once
#include "walloid/graph.hpp"
#include "walloid/rng.hpp"
#include "walloid/society.hpp"
namespace {
walloid::Graph random_graph(walloid::Rng& rng, int n, double p) {
    std::vector<walloid::Vertex> vs;
    for (int i = 0; i < n; ++i) vs.push_back(i + 1);
    std::vector<walloid::Edge> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.chance(p)) es.push_back({vs[i], vs[j]});
    return walloid::Graph(vs, es);
}
walloid::Society random_society(walloid::Rng& rng, int max_n, int max_omega) {
    int n = 3 + static_cast<int>(rng.below(max_n - 2));
    walloid::Graph g = random_graph(rng, n, 0.20 + 0.3 * (rng.below(100) / 100.0));
    int m = std::min(n, 2 + static_cast<int>(rng.below(std::max(1, max_omega - 1))));
    std::vector<walloid::Vertex> omega;
    std::vector<walloid::Vertex> pool = g.vertices();
    for (int i = 0; i < m; ++i) {
        int pick = static_cast<int>(rng.below(pool.size()));
        omega.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
    }
    return walloid::Society{g, omega};
}
}

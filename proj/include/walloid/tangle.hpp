#pragma once

#include <functional>
#include <vector>

#include "walloid/graph.hpp"
#include "walloid/wall.hpp"

namespace walloid {

// Oriented low-order separations: exactly one of (A,B), (B,A) per
// separation of order < k, no three small sides covering the graph.
struct Tangle {
    int order = 0;
    std::vector<Separation> oriented;  // A small, B big
};

// Orientation rule: +1 when (A,B) is the tangle's orientation, -1 when
// (B,A) is, 0 when neither side qualifies (an integrity failure for the
// induced rules).
using TangleRule = std::function<int(const Separation&)>;

// Wall-induced: the big side minus the small one contains a full
// horizontal and a full vertical path.
TangleRule wall_tangle_rule(const WallHandle& w);
// Walloid-induced: the big side contains a full base cycle and a full
// vertical path of the base annulus.
TangleRule walloid_tangle_rule(const WalloidHandle& w);

Tangle materialize_tangle(const Graph& g, const TangleRule& rule, int k,
                          int vertex_cap = 14);

// Exhaustive verification of both tangle axioms.
bool is_tangle(const Graph& g, const std::vector<Separation>& oriented, int k,
               int vertex_cap = 14);

bool is_truncation(const Tangle& d, const Tangle& t);
// The wall's induced tangle is a truncation of t (same host graph).
bool controls_wall(const Graph& g, const Tangle& t, const WallHandle& w,
                   int vertex_cap = 14);

struct ControlVerdict {
    bool controlled = false;
    char mode = 'x';  // 'x' exhaustive, 'c' certificate
    Separation violation;  // populated when not controlled
};

// Exhaustive: no oriented (A,B) of order < |V(pattern)| hides a branch set
// inside A \ B.
ControlVerdict controls_model(const Graph& g, const TangleRule& rule,
                              const MinorModel& mu, int vertex_cap = 14);

// Grid version: the hidden set ranges over full rows and columns.
ControlVerdict controls_grid_model(const Graph& g, const TangleRule& rule,
                                   const MinorModel& mu,
                                   const std::vector<std::set<Vertex>>& lines,
                                   int grid_order, int vertex_cap = 14);

// Certificate mode: confirm a claimed violating separation.
ControlVerdict check_control_certificate(const Graph& g, const TangleRule& rule,
                                         const MinorModel& mu,
                                         const Separation& claimed);

}  // namespace walloid

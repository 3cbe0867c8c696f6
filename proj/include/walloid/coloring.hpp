#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "walloid/wall.hpp"

namespace walloid {

// Colors are small positive integers kept in bitsets so unions are O(1).
using ColorSet = uint32_t;
inline constexpr int kMaxColor = 30;

inline ColorSet color_bit(int color) {
    if (color < 1 || color > kMaxColor)
        throw InputError("color out of range 1..30");
    return 1u << (color - 1);
}
inline bool has_color(ColorSet s, int color) { return (s & color_bit(color)) != 0; }
int max_color(ColorSet s);

// Brick-coloring: non-empty color set per brick face of a wall skeleton.
struct BrickColoring {
    std::map<int, ColorSet> assignment;  // brick face id -> colors

    int capacity() const;
    void check_covers(const std::vector<int>& bricks) const;
};

// Cell-coloring: a single color per simple cell of a decomposition.
struct CellColoring {
    std::map<int, int> assignment;  // cell id -> color

    int capacity() const;
};

// Induced coloring: each subwall brick takes the union over the base-wall
// bricks that lie inside it.
BrickColoring induced_coloring(const WallHandle& base, const WallHandle& sub,
                               const BrickColoring& chi);

// Homogenization over walls: needs side lengths t^(2^cap) x z^(2^cap);
// crops to exactly that window, then recursively narrows to a (t x z)
// subwall whose induced brick colorings agree. Candidates are scanned
// preferring the boundary subwall, then smallest window.
WallHandle homogenize_wall(const WallHandle& w, const BrickColoring& chi, int t, int z);

// Ladder variant: brick colors are given per base brick (index i between
// rungs i and i+1); returns the chosen rung indices of a homogeneous
// t-subladder.
std::vector<int> homogenize_ladder_select(const std::vector<ColorSet>& brick_colors,
                                          int t);
LadderHandle homogenize_ladder(const LadderHandle& l,
                               const std::vector<ColorSet>& brick_colors, int t);

// Union of base brick colors over an index interval [lo, hi).
ColorSet interval_union(const std::vector<ColorSet>& colors, int lo, int hi);

}  // namespace walloid

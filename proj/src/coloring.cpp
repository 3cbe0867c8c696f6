#include "walloid/coloring.hpp"

#include <algorithm>
#include <functional>

namespace walloid {

int max_color(ColorSet s) {
    int m = 0;
    for (int c = 1; c <= kMaxColor; ++c)
        if (has_color(s, c)) m = c;
    return m;
}

int BrickColoring::capacity() const {
    int cap = 0;
    for (auto& [f, s] : assignment) {
        if (s == 0) throw InputError("brick coloring must assign non-empty sets");
        cap = std::max(cap, max_color(s));
    }
    return cap;
}

void BrickColoring::check_covers(const std::vector<int>& bricks) const {
    for (int b : bricks)
        if (!assignment.count(b))
            throw InputError("brick coloring misses a brick");
}

int CellColoring::capacity() const {
    int cap = 0;
    for (auto& [c, col] : assignment) {
        if (col < 1) throw InputError("cell colors are positive integers");
        cap = std::max(cap, col);
    }
    return cap;
}

BrickColoring induced_coloring(const WallHandle& base, const WallHandle& sub,
                               const BrickColoring& chi) {
    chi.check_covers(base.brick_faces());
    BrickColoring out;
    auto base_bricks = base.brick_faces();
    for (int f : sub.brick_faces()) {
        // The subwall brick cycle is a cycle in the base skeleton.
        Path cyc;
        for (int mv : sub.skel.faces()[f].vertices) cyc.push_back(sub.skel_vertex[mv]);
        std::set<int> inside = base.bricks_inside_cycle(cyc);
        ColorSet s = 0;
        for (int b : inside) s |= chi.assignment.at(b);
        if (s == 0) throw IntegrityError("subwall brick encloses no base brick");
        out.assignment[f] = s;
    }
    return out;
}

namespace {

int ipow(int base, int exp) {
    long long v = 1;
    for (int i = 0; i < exp; ++i) {
        v *= base;
        if (v > 1'000'000'000LL) throw RefusalError("homogenization size overflow");
    }
    return static_cast<int>(v);
}

// Required side length t^(2^level).
int side_needed(int x, int level) { return ipow(x, 1 << level); }

struct WallScan {
    const WallHandle* base;
    const BrickColoring* chi;
    int t, z;

    // Induced color of the subwall brick with the given boundary cycle.
    ColorSet brick_color(const Path& cyc) const {
        std::set<int> inside = base->bricks_inside_cycle(cyc);
        ColorSet s = 0;
        for (int b : inside) s |= chi->assignment.at(b);
        return s;
    }

    // rows/cols are index lists into the base wall; at level m the window
    // is (t^(2^m) x z^(2^m)) and color m is resolved: either it appears in
    // every brick of the boundary subwall (descend into it) or some window
    // is entirely free of it (descend there).
    std::pair<std::vector<int>, std::vector<int>> narrow(std::vector<int> rows,
                                                         std::vector<int> cols,
                                                         int m) const {
        if (m == 0) return {rows, cols};
        int T = side_needed(t, m - 1);
        int Z = side_needed(z, m - 1);
        auto boundaries = [](int span, int count) {
            std::vector<int> b;
            for (int k = 1; k <= count; ++k) b.push_back(k * (span - 1));
            return b;  // 0-based positions
        };
        std::vector<int> brow = boundaries(T, T);
        std::vector<int> bcol = boundaries(Z, Z);
        std::vector<int> prime_rows, prime_cols;
        for (int p : brow) prime_rows.push_back(rows[p]);
        for (int p : bcol) prime_cols.push_back(cols[p]);

        WallHandle prime = take_subwall(*base, prime_rows, prime_cols);
        auto row_pos = [&](Vertex v) {
            for (int i = 0; i < static_cast<int>(prime_rows.size()); ++i) {
                const Path& r = base->rows[prime_rows[i]];
                if (std::find(r.begin(), r.end(), v) != r.end()) return i;
            }
            return -1;
        };
        auto col_pos = [&](Vertex v) {
            for (int j = 0; j < static_cast<int>(prime_cols.size()); ++j) {
                const Path& c = base->cols[prime_cols[j]];
                if (std::find(c.begin(), c.end(), v) != c.end()) return j;
            }
            return -1;
        };
        std::vector<std::pair<int, int>> failing;
        for (int f : prime.brick_faces()) {
            Path cyc;
            for (int mv : prime.skel.faces()[f].vertices)
                cyc.push_back(prime.skel_vertex[mv]);
            if (!has_color(brick_color(cyc), m)) {
                int bi = -1, bj = -1;
                for (Vertex v : cyc) {
                    int i = row_pos(v);
                    int j = col_pos(v);
                    if (i >= 0) bi = (bi < 0) ? i : std::min(bi, i);
                    if (j >= 0) bj = (bj < 0) ? j : std::min(bj, j);
                }
                if (bi < 0 || bj < 0) throw IntegrityError("window brick unmapped");
                failing.push_back({bi, bj});
            }
        }
        if (failing.empty()) return narrow(prime_rows, prime_cols, m - 1);
        std::sort(failing.begin(), failing.end());
        auto [pi, pj] = failing.front();
        // Window between boundary rows pi and pi+1, columns pj and pj+1.
        std::vector<int> wrows(rows.begin() + brow[pi],
                               rows.begin() + brow[pi] + T);
        std::vector<int> wcols(cols.begin() + bcol[pj],
                               cols.begin() + bcol[pj] + Z);
        return narrow(wrows, wcols, m - 1);
    }
};

}  // namespace

WallHandle homogenize_wall(const WallHandle& w, const BrickColoring& chi, int t, int z) {
    if (t < 3 || z < 3) throw InputError("homogenize_wall needs t,z >= 3");
    chi.check_covers(w.brick_faces());
    int cap = chi.capacity();
    int level = std::max(cap, 0);
    int need_r = side_needed(t, level);
    int need_c = side_needed(z, level);
    if (w.r < need_r || w.t < need_c)
        throw RefusalError("homogenize_wall needs a (" + std::to_string(need_r) + " x " +
                           std::to_string(need_c) + ")-wall, got (" +
                           std::to_string(w.r) + " x " + std::to_string(w.t) + ")");

    // Crop to exactly the required size from the top-left.
    std::vector<int> rows(need_r), cols(need_c);
    for (int i = 0; i < need_r; ++i) rows[i] = i;
    for (int j = 0; j < need_c; ++j) cols[j] = j;

    WallScan scan{&w, &chi, t, z};
    auto rows_cols = scan.narrow(rows, cols, level);
    return take_subwall(w, rows_cols.first, rows_cols.second);
}

ColorSet interval_union(const std::vector<ColorSet>& colors, int lo, int hi) {
    ColorSet s = 0;
    for (int i = lo; i < hi; ++i) s |= colors[i];
    return s;
}

std::vector<int> homogenize_ladder_select(const std::vector<ColorSet>& brick_colors,
                                          int t) {
    if (t < 2) throw InputError("homogenize_ladder needs t >= 2");
    int cap = 0;
    for (ColorSet s : brick_colors) {
        if (s == 0) throw InputError("ladder brick colors must be non-empty");
        cap = std::max(cap, max_color(s));
    }
    int rungs = static_cast<int>(brick_colors.size()) + 1;
    int need = side_needed(t, cap);
    if (rungs < need)
        throw RefusalError("homogenize_ladder needs a " + std::to_string(need) +
                           "-ladder, got " + std::to_string(rungs));

    // Work on rung index lists into the base ladder.
    std::vector<int> idx(need);
    for (int i = 0; i < need; ++i) idx[i] = i;

    std::function<std::vector<int>(std::vector<int>, int)> run =
        [&](std::vector<int> cur, int m) -> std::vector<int> {
        if (m == 0) return cur;
        long long tt = 1;
        for (int i = 0; i < (1 << (m - 1)); ++i) tt *= t;
        int T = static_cast<int>(tt);
        std::vector<int> bpos;
        for (int k = 1; k <= T; ++k) bpos.push_back(k * (T - 1));  // 0-based
        // Boundary subladder brick i: between cur[bpos[i]] and cur[bpos[i+1]].
        bool prime_ok = true;
        int fail = -1;
        for (int i = 0; i + 1 < T; ++i) {
            ColorSet s = interval_union(brick_colors, cur[bpos[i]], cur[bpos[i + 1]]);
            if (!has_color(s, m)) {
                prime_ok = false;
                if (fail < 0) fail = i;
            }
        }
        if (prime_ok) {
            std::vector<int> next;
            for (int p : bpos) next.push_back(cur[p]);
            return run(next, m - 1);
        }
        std::vector<int> window(cur.begin() + bpos[fail], cur.begin() + bpos[fail + 1] + 1);
        return run(window, m - 1);
    };
    return run(idx, cap == 0 ? 0 : cap);
}

LadderHandle homogenize_ladder(const LadderHandle& l,
                               const std::vector<ColorSet>& brick_colors, int t) {
    if (static_cast<int>(brick_colors.size()) != l.num_bricks())
        throw InputError("homogenize_ladder: one color set per brick required");
    auto idx = homogenize_ladder_select(brick_colors, t);
    return take_subladder(l, idx);
}

}  // namespace walloid

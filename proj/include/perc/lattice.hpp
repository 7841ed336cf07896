#pragma once

// Triangular-lattice geometry realized on the integer grid.  A site (x, y)
// has six neighbors: the four axis steps plus the two anti-diagonal steps
// (+1,-1) and (-1,+1).  Drawn with straight segments these edges triangulate
// the plane (each unit cell is cut by its anti-diagonal), so two paths can
// only cross at a shared site.  That planarity is what later makes the
// open/closed crossing duality exact.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace perc {

struct Site {
    int x = 0;
    int y = 0;

    friend bool operator==(const Site& a, const Site& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
    // Row-major order: by y, then x.  Used wherever site lists are sorted.
    friend bool operator<(const Site& a, const Site& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

// Neighbor offsets in documented, fixed order: E, W, N, S, SE, NW.
inline constexpr std::array<std::array<int, 2>, 6> neighbor_offsets = {{
    {{1, 0}}, {{-1, 0}}, {{0, 1}}, {{0, -1}}, {{1, -1}}, {{-1, 1}},
}};

inline std::array<Site, 6> neighbors(const Site& v) {
    std::array<Site, 6> out;
    for (std::size_t i = 0; i < 6; ++i)
        out[i] = Site{v.x + neighbor_offsets[i][0], v.y + neighbor_offsets[i][1]};
    return out;
}

enum class Boundary { Left, Right, Top, Bottom };

// Axis-aligned rectangle of sites [x_min, x_max] x [y_min, y_max], inclusive.
struct Region {
    int x_min, x_max, y_min, y_max;

    Region(int x_lo, int x_hi, int y_lo, int y_hi)
        : x_min(x_lo), x_max(x_hi), y_min(y_lo), y_max(y_hi) {
        if (x_hi < x_lo || y_hi < y_lo)
            throw std::domain_error("Region: empty extent");
    }

    static Region square(int n) { return Region(0, n, 0, n); }          // [0,n]^2
    static Region centered_square(int n) { return Region(-n, n, -n, n); } // [-n,n]^2

    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    std::int64_t site_count() const {
        return static_cast<std::int64_t>(width()) * height();
    }

    bool contains(const Site& v) const {
        return v.x >= x_min && v.x <= x_max && v.y >= y_min && v.y <= y_max;
    }
    bool contains(const Region& r) const {
        return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min &&
               r.y_max <= y_max;
    }

    // Row-major site index; the stable enumeration order used for sampling.
    std::int64_t index(const Site& v) const {
        return static_cast<std::int64_t>(v.y - y_min) * width() + (v.x - x_min);
    }
    Site site_at(std::int64_t i) const {
        const int w = width();
        return Site{x_min + static_cast<int>(i % w),
                    y_min + static_cast<int>(i / w)};
    }

    bool on_boundary(const Site& v, Boundary side) const {
        switch (side) {
            case Boundary::Left: return v.x == x_min;
            case Boundary::Right: return v.x == x_max;
            case Boundary::Top: return v.y == y_max;
            case Boundary::Bottom: return v.y == y_min;
        }
        return false;
    }

    // Sites of one boundary segment, in ascending coordinate order.
    std::vector<Site> boundary(Boundary side) const {
        std::vector<Site> out;
        if (side == Boundary::Left || side == Boundary::Right) {
            const int x = side == Boundary::Left ? x_min : x_max;
            out.reserve(static_cast<std::size_t>(height()));
            for (int y = y_min; y <= y_max; ++y) out.push_back(Site{x, y});
        } else {
            const int y = side == Boundary::Bottom ? y_min : y_max;
            out.reserve(static_cast<std::size_t>(width()));
            for (int x = x_min; x <= x_max; ++x) out.push_back(Site{x, y});
        }
        return out;
    }

    friend bool operator==(const Region& a, const Region& b) {
        return a.x_min == b.x_min && a.x_max == b.x_max && a.y_min == b.y_min &&
               a.y_max == b.y_max;
    }
    friend bool operator!=(const Region& a, const Region& b) { return !(a == b); }
};

// Neighbors of v that fall inside r, preserving the global offset order.
inline std::vector<Site> region_neighbors(const Region& r, const Site& v) {
    if (!r.contains(v))
        throw std::domain_error("region_neighbors: site outside region");
    std::vector<Site> out;
    out.reserve(6);
    for (const Site& w : neighbors(v))
        if (r.contains(w)) out.push_back(w);
    return out;
}

}  // namespace perc

template <>
struct std::hash<perc::Site> {
    std::size_t operator()(const perc::Site& v) const noexcept {
        return std::hash<std::uint64_t>{}(
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)) << 32) ^
            static_cast<std::uint32_t>(v.y));
    }
};

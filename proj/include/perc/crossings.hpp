#pragma once

// Crossing detectors.
//
// A crossing of color k between two opposite boundary segments is a path of
// k-colored sites whose first site lies in the start segment and whose last
// site lies in the end segment; every site of the path, endpoints included,
// has color k.  A single site lying in both segments is a crossing by itself.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/clusters.hpp"
#include "perc/configuration.hpp"
#include "perc/lattice.hpp"
#include "perc/union_find.hpp"

namespace perc {

enum class Direction { LeftRight, TopBottom };

struct CrossingQuery {
    Region region;
    Direction direction = Direction::LeftRight;
    Color color = Color::Open;
};

namespace detail {

// Boundary-contact bits, stored per component root.
enum : std::uint8_t {
    touch_left = 1,
    touch_right = 2,
    touch_top = 4,
    touch_bottom = 8,
};

// Union-find over the sites of one color with boundary-contact flags.
// state(i) must return the open/closed bit for row-major index i; the scan
// never materializes a Configuration, so experiments can run it directly on
// buffered uniform draws.
template <class StateFn>
class ComponentFlags {
  public:
    ComponentFlags(const Region& r, StateFn state, Color color, DisjointSets& uf)
        : region_(r), state_(state), open_color_(color == Color::Open), uf_(uf) {
        const std::int64_t n = r.site_count();
        uf_.reset(static_cast<std::size_t>(n));
        flags_.assign(static_cast<std::size_t>(n), 0);
        auto is_color = [&](std::int64_t i) { return state_(i) == open_color_; };
        EdgeScan(r).for_each_edge(is_color, [&](std::int64_t a, std::int64_t b) {
            uf_.unite(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
        });
        const int w = r.width(), h = r.height();
        for (int y = 0; y < h; ++y) {
            mark(static_cast<std::int64_t>(y) * w, touch_left, is_color);
            mark(static_cast<std::int64_t>(y) * w + w - 1, touch_right, is_color);
        }
        for (int x = 0; x < w; ++x) {
            mark(x, touch_bottom, is_color);
            mark(static_cast<std::int64_t>(h - 1) * w + x, touch_top, is_color);
        }
    }

    bool in_color(std::int64_t i) const { return state_(i) == open_color_; }
    std::uint8_t flags_at(std::int64_t i) {
        return flags_[static_cast<std::size_t>(
            uf_.find(static_cast<std::int32_t>(i)))];
    }
    bool any_component_with(std::uint8_t a, std::uint8_t b) {
        const std::int64_t n = region_.site_count();
        for (std::int64_t i = 0; i < n; ++i)
            if (in_color(i)) {
                const std::uint8_t f = flags_at(i);
                if ((f & a) && (f & b)) return true;
            }
        return false;
    }

  private:
    template <class IsColor>
    void mark(std::int64_t i, std::uint8_t bit, IsColor is_color) {
        if (is_color(i))
            flags_[static_cast<std::size_t>(
                uf_.find(static_cast<std::int32_t>(i)))] |= bit;
    }

    const Region& region_;
    StateFn state_;
    bool open_color_;
    DisjointSets& uf_;
    std::vector<std::uint8_t> flags_;
};

template <class StateFn>
bool crossing_scan(const Region& r, StateFn state, Direction dir, Color color,
                   DisjointSets& uf) {
    ComponentFlags<StateFn> comp(r, state, color, uf);
    return dir == Direction::LeftRight
               ? comp.any_component_with(touch_left, touch_right)
               : comp.any_component_with(touch_top, touch_bottom);
}

}  // namespace detail

inline bool has_crossing(const Configuration& c, const CrossingQuery& q) {
    if (q.region != c.region())
        throw std::domain_error("has_crossing: query region differs from "
                                "configuration region");
    DisjointSets uf;
    auto state = [&](std::int64_t i) { return c.is_open(i); };
    return detail::crossing_scan(c.region(), state, q.direction, q.color, uf);
}

// True iff the closed sites of the annulus outer minus inner contain a
// circuit surrounding inner.  Evaluated through the separation criterion: on
// this lattice a surrounding closed circuit exists exactly when no open path
// inside the annulus joins the sites adjacent to inner to the outer rim.
// inner must lie strictly inside outer, and outer within c's region.
inline bool closed_circuit_in_annulus(const Configuration& c,
                                      const Region& inner, const Region& outer) {
    if (!c.region().contains(outer))
        throw std::domain_error("closed_circuit_in_annulus: outer outside region");
    if (!(inner.x_min > outer.x_min && inner.x_max < outer.x_max &&
          inner.y_min > outer.y_min && inner.y_max < outer.y_max))
        throw std::domain_error(
            "closed_circuit_in_annulus: inner not strictly inside outer");

    auto in_annulus = [&](const Site& s) {
        return outer.contains(s) && !inner.contains(s);
    };
    auto on_rim = [&](const Site& s) {
        return s.x == outer.x_min || s.x == outer.x_max || s.y == outer.y_min ||
               s.y == outer.y_max;
    };

    std::vector<char> seen(static_cast<std::size_t>(outer.site_count()), 0);
    std::vector<Site> stack;
    // Seeds: open annulus sites adjacent to the inner block.
    for (int x = inner.x_min; x <= inner.x_max; ++x)
        for (int y = inner.y_min; y <= inner.y_max; ++y)
            for (const Site& w : neighbors(Site{x, y})) {
                if (!in_annulus(w) || !c.is_open(w)) continue;
                const auto j = static_cast<std::size_t>(outer.index(w));
                if (seen[j]) continue;
                seen[j] = 1;
                stack.push_back(w);
            }
    while (!stack.empty()) {
        const Site s = stack.back();
        stack.pop_back();
        if (on_rim(s)) return false;
        for (const Site& w : neighbors(s)) {
            if (!in_annulus(w) || !c.is_open(w)) continue;
            const auto j = static_cast<std::size_t>(outer.index(w));
            if (seen[j]) continue;
            seen[j] = 1;
            stack.push_back(w);
        }
    }
    return true;
}

}  // namespace perc

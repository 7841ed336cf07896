#pragma once

// Cluster labeling and single-cluster queries.
//
// Only three of the six neighbor directions (E, N, NW) are scanned when
// joining sites: each lattice edge is visited from exactly one endpoint.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/configuration.hpp"
#include "perc/lattice.hpp"
#include "perc/union_find.hpp"

namespace perc {

enum class Color { Open, Closed };

inline bool has_color(const Configuration& c, std::int64_t index, Color color) {
    return c.is_open(index) == (color == Color::Open);
}

struct ClusterLabeling {
    Region region;
    Color color;
    std::vector<std::int32_t> label;  // per site index; -1 for the other color
    std::vector<std::int64_t> sizes;  // per label

    std::int32_t n_clusters() const {
        return static_cast<std::int32_t>(sizes.size());
    }
};

namespace detail {

// Directed neighbor index offsets covering each edge once, for a row-major
// region of width w: E = +1, N = +w, NW = +w-1.
struct EdgeScan {
    int w, h;
    explicit EdgeScan(const Region& r) : w(r.width()), h(r.height()) {}

    template <class IsColor, class Join>
    void for_each_edge(IsColor is_color, Join join) const {
        const std::int64_t n = static_cast<std::int64_t>(w) * h;
        for (std::int64_t i = 0; i < n; ++i) {
            if (!is_color(i)) continue;
            const int x = static_cast<int>(i % w);
            const bool up = i + w < n;
            if (x + 1 < w && is_color(i + 1)) join(i, i + 1);
            if (up && is_color(i + w)) join(i, i + w);
            if (up && x > 0 && is_color(i + w - 1)) join(i, i + w - 1);
        }
    }
};

}  // namespace detail

inline ClusterLabeling label_clusters(const Configuration& c, Color color) {
    const Region& r = c.region();
    const std::int64_t n = r.site_count();
    DisjointSets uf(static_cast<std::size_t>(n));
    auto is_color = [&](std::int64_t i) { return has_color(c, i, color); };
    detail::EdgeScan(r).for_each_edge(is_color, [&](std::int64_t a, std::int64_t b) {
        uf.unite(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
    });

    ClusterLabeling out{r, color, std::vector<std::int32_t>(
                                      static_cast<std::size_t>(n), -1),
                        {}};
    std::vector<std::int32_t> root_label(static_cast<std::size_t>(n), -1);
    for (std::int64_t i = 0; i < n; ++i) {
        if (!is_color(i)) continue;
        const auto root = static_cast<std::size_t>(
            uf.find(static_cast<std::int32_t>(i)));
        if (root_label[root] < 0) {
            root_label[root] = static_cast<std::int32_t>(out.sizes.size());
            out.sizes.push_back(0);
        }
        out.label[static_cast<std::size_t>(i)] = root_label[root];
        ++out.sizes[static_cast<std::size_t>(root_label[root])];
    }
    return out;
}

// Size of the open cluster containing v, zero when v is closed.
inline std::int64_t cluster_size_at(const Configuration& c, const Site& v) {
    const Region& r = c.region();
    if (!r.contains(v))
        throw std::domain_error("cluster_size_at: site outside region");
    if (!c.is_open(v)) return 0;
    std::vector<char> seen(static_cast<std::size_t>(r.site_count()), 0);
    std::vector<std::int64_t> stack{r.index(v)};
    seen[static_cast<std::size_t>(r.index(v))] = 1;
    std::int64_t count = 0;
    while (!stack.empty()) {
        const std::int64_t i = stack.back();
        stack.pop_back();
        ++count;
        const Site s = r.site_at(i);
        for (const Site& w : neighbors(s)) {
            if (!r.contains(w)) continue;
            const std::int64_t j = r.index(w);
            if (seen[static_cast<std::size_t>(j)] || !c.is_open(j)) continue;
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(j);
        }
    }
    return count;
}

// True iff the open cluster of v, taken inside the subregion sub, touches the
// topological boundary of sub.  sub must lie within c's region and contain v.
inline bool radius_reached(const Configuration& c, const Site& v,
                           const Region& sub) {
    if (!c.region().contains(sub))
        throw std::domain_error("radius_reached: subregion outside region");
    if (!sub.contains(v))
        throw std::domain_error("radius_reached: site outside subregion");
    if (!c.is_open(v)) return false;
    auto on_rim = [&](const Site& s) {
        return s.x == sub.x_min || s.x == sub.x_max || s.y == sub.y_min ||
               s.y == sub.y_max;
    };
    if (on_rim(v)) return true;
    std::vector<char> seen(static_cast<std::size_t>(sub.site_count()), 0);
    std::vector<Site> stack{v};
    seen[static_cast<std::size_t>(sub.index(v))] = 1;
    while (!stack.empty()) {
        const Site s = stack.back();
        stack.pop_back();
        for (const Site& w : neighbors(s)) {
            if (!sub.contains(w)) continue;
            const std::int64_t j = sub.index(w);
            if (seen[static_cast<std::size_t>(j)] || !c.is_open(w)) continue;
            if (on_rim(w)) return true;
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

}  // namespace perc

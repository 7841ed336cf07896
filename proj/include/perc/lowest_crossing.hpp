#pragma once

// The lowest left-right crossing and the top/bottom partition it induces.
//
// Among all open LR crossings the lowest one has a below-region contained
// in every other crossing's below-region; as a site set it equals
//
//     {open sites on some self-avoiding LR path}  intersected with
//     {open sites on the bottom row, or adjacent to a closed cluster that
//      reaches the bottom row}.
//
// Both filters are one linear pass (see backbone.hpp for the first), and
// the small-region enumeration oracle pins this construction exhaustively.
// The sketch of why the intersection cannot overshoot: a closed cluster W
// reaching the bottom row lies strictly below every crossing, because a
// closed path cannot share a site with an open path and edges of the
// lattice meet only at sites, so any site adjacent to W sits weakly below
// every crossing; a site of some crossing that lies weakly below every
// crossing belongs to the minimal one.
//
// Face assignment for the partition is exact for arbitrary crossings, not
// just the lowest one.  A crossing can seal pockets that no flood fill from
// the top or bottom row reaches (it may even brush a boundary column in
// mid-path), so unreached components are assigned by ray parity against
// the crossing's polyline, which is the plane-topology definition of
// "above" and "below".

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perc/backbone.hpp"
#include "perc/crossings.hpp"

namespace perc {

struct Crossing {
    std::vector<Site> path;  // self-avoiding, consecutive sites adjacent
    Color color = Color::Open;
    Direction direction = Direction::LeftRight;
};

struct CrossingPartition {
    std::vector<Site> top_interior;
    std::vector<Site> bottom_interior;
    Crossing crossing;
};

namespace detail {

// Side of each region site relative to a left-right crossing polyline.
enum : std::uint8_t { face_on_path = 0, face_bottom = 1, face_top = 2 };

// Count crossings of the polyline by a downward ray cast just right of u.
// Vertical segments are parallel to the ray; a horizontal segment is hit
// when it starts in u's column strictly below u; a diagonal segment is hit
// when its upper endpoint is in u's column at or below u (that endpoint
// cannot be u itself, u is off the path).  One extra crossing accounts for
// the boundary closure running right from the path's final site, so that
// even parity means the bottom face.
inline bool below_polyline(const Region& r, const std::vector<Site>& path, Site u) {
    int hits = 0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const Site a = path[k], b = path[k + 1];
        if (a.y == b.y) {
            if (std::min(a.x, b.x) == u.x && a.y < u.y) ++hits;
        } else if (a.x != b.x) {
            const Site upper = a.y > b.y ? a : b;
            if (upper.x == u.x && upper.y <= u.y) ++hits;
        }
    }
    if (u.x == r.x_max && path.back().y < u.y) ++hits;
    return hits % 2 == 0;
}

inline std::vector<std::uint8_t> crossing_faces(const Region& r,
                                                const std::vector<Site>& path) {
    const int w = r.width(), h = r.height();
    const std::int64_t n = r.site_count();
    std::vector<std::uint8_t> face(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> assigned(static_cast<std::size_t>(n), 0);
    for (const Site& v : path) assigned[static_cast<std::size_t>(r.index(v))] = 1;

    std::vector<std::int32_t> queue;
    auto flood = [&](std::int32_t seed, std::uint8_t side) {
        queue.assign(1, seed);
        assigned[static_cast<std::size_t>(seed)] = 1;
        face[static_cast<std::size_t>(seed)] = side;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::int32_t i = queue[head];
            const int x = i % w, y = i / w;
            for (const auto& o : neighbor_offsets) {
                const int nx = x + o[0], ny = y + o[1];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const std::int32_t j = ny * w + nx;
                if (assigned[static_cast<std::size_t>(j)]) continue;
                assigned[static_cast<std::size_t>(j)] = 1;
                face[static_cast<std::size_t>(j)] = side;
                queue.push_back(j);
            }
        }
    };
    for (int x = 0; x < w; ++x) {
        const std::int32_t top = (h - 1) * w + x;
        if (!assigned[static_cast<std::size_t>(top)]) flood(top, face_top);
        if (!assigned[static_cast<std::size_t>(x)]) flood(x, face_bottom);
    }
    for (std::int32_t i = 0; i < n; ++i) {
        if (assigned[static_cast<std::size_t>(i)]) continue;
        const Site u{r.x_min + i % w, r.y_min + i / w};
        flood(i, below_polyline(r, path, u) ? face_bottom : face_top);
    }
    return face;
}

// Orders a crossing site set into a self-avoiding left-right path.  The
// set of the lowest crossing is known to admit such an ordering; shortcut
// chords inside the set only add backtracking.  Starts are tried bottom-up
// and neighbors bottom-up then left-to-right, which fixes the emitted
// order when the set happens to admit several.
inline std::vector<Site> order_crossing_set(const Region& r,
                                            const std::vector<std::int32_t>& members) {
    const int w = r.width();
    std::vector<std::int32_t> slot(static_cast<std::size_t>(r.site_count()), -1);
    for (std::size_t k = 0; k < members.size(); ++k)
        slot[static_cast<std::size_t>(members[k])] = static_cast<std::int32_t>(k);

    const std::size_t m = members.size();
    std::vector<std::vector<std::int32_t>> nbrs(m);
    std::vector<std::int32_t> starts;
    for (std::size_t k = 0; k < m; ++k) {
        const std::int32_t i = members[k];
        const int x = i % w, y = i / w;
        for (const auto& o : neighbor_offsets) {
            const int nx = x + o[0], ny = y + o[1];
            if (!r.contains(Site{r.x_min + nx, r.y_min + ny})) continue;
            const std::int32_t j = slot[static_cast<std::size_t>(ny * w + nx)];
            if (j >= 0) nbrs[k].push_back(j);
        }
        std::sort(nbrs[k].begin(), nbrs[k].end(), [&](std::int32_t a, std::int32_t b) {
            const std::int32_t ia = members[static_cast<std::size_t>(a)];
            const std::int32_t ib = members[static_cast<std::size_t>(b)];
            return std::pair(ia / w, ia % w) < std::pair(ib / w, ib % w);
        });
        if (x == 0) starts.push_back(static_cast<std::int32_t>(k));
    }
    std::sort(starts.begin(), starts.end(), [&](std::int32_t a, std::int32_t b) {
        return members[static_cast<std::size_t>(a)] < members[static_cast<std::size_t>(b)];
    });

    std::vector<std::uint8_t> used(m, 0);
    std::vector<std::pair<std::int32_t, std::size_t>> stack;
    std::int64_t budget = std::max<std::int64_t>(
        1'000'000, 5'000 * static_cast<std::int64_t>(m));
    for (const std::int32_t s : starts) {
        stack.assign(1, {s, 0});
        used.assign(m, 0);
        used[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (stack.size() == m &&
                members[static_cast<std::size_t>(v)] % w == w - 1) {
                std::vector<Site> path;
                path.reserve(m);
                for (const auto& [k, ignored] : stack) {
                    const std::int32_t i = members[static_cast<std::size_t>(k)];
                    path.push_back(Site{r.x_min + i % w, r.y_min + i / w});
                }
                return path;
            }
            if (--budget < 0)
                throw std::logic_error("order_crossing_set: search budget exhausted");
            bool advanced = false;
            while (next < nbrs[static_cast<std::size_t>(v)].size()) {
                const std::int32_t u = nbrs[static_cast<std::size_t>(v)][next++];
                if (used[static_cast<std::size_t>(u)]) continue;
                used[static_cast<std::size_t>(u)] = 1;
                stack.push_back({u, 0});
                advanced = true;
                break;
            }
            if (!advanced) {
                used[static_cast<std::size_t>(v)] = 0;
                stack.pop_back();
            }
        }
    }
    throw std::logic_error("order_crossing_set: no left-right ordering exists");
}

}  // namespace detail

// Absent iff the configuration has no open left-right crossing; otherwise
// the unique crossing whose below-region is contained in the below-region
// of every other open LR crossing.
inline std::optional<Crossing> lowest_crossing(const Configuration& c) {
    const Region& r = c.region();
    const std::vector<std::uint8_t> backbone = detail::open_lr_backbone(c);
    if (std::find(backbone.begin(), backbone.end(), std::uint8_t{1}) == backbone.end())
        return std::nullopt;

    const int w = r.width(), h = r.height();
    const std::int64_t n = r.site_count();

    // Closed sites connected to the bottom row through closed sites.
    std::vector<std::uint8_t> wet(static_cast<std::size_t>(n), 0);
    std::vector<std::int32_t> queue;
    for (int x = 0; x < w; ++x)
        if (!c.is_open(x)) {
            wet[static_cast<std::size_t>(x)] = 1;
            queue.push_back(x);
        }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::int32_t i = queue[head];
        const int x = i % w, y = i / w;
        for (const auto& o : neighbor_offsets) {
            const int nx = x + o[0], ny = y + o[1];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::int32_t j = ny * w + nx;
            if (wet[static_cast<std::size_t>(j)] || c.is_open(j)) continue;
            wet[static_cast<std::size_t>(j)] = 1;
            queue.push_back(j);
        }
    }

    std::vector<std::int32_t> members;
    for (std::int32_t i = 0; i < n; ++i) {
        if (!backbone[static_cast<std::size_t>(i)]) continue;
        const int x = i % w, y = i / w;
        bool anchored = y == 0;
        for (std::size_t d = 0; d < 6 && !anchored; ++d) {
            const int nx = x + neighbor_offsets[d][0], ny = y + neighbor_offsets[d][1];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            anchored = wet[static_cast<std::size_t>(ny * w + nx)] != 0;
        }
        if (anchored) members.push_back(i);
    }
    if (members.empty())
        throw std::logic_error("lowest_crossing: crossing exists but site set is empty");
    return Crossing{detail::order_crossing_set(r, members), Color::Open,
                    Direction::LeftRight};
}

inline std::optional<Crossing> lowest_crossing(const Configuration& c, const Region& r) {
    if (!(c.region() == r)) throw std::domain_error("lowest_crossing: region mismatch");
    return lowest_crossing(c);
}

// Splits the region into the crossing, the sites above it and the sites
// below it.  Works for any valid open LR crossing, lowest or not.
inline CrossingPartition partition(const Configuration& c, const Region& r,
                                   const Crossing& gamma) {
    if (!(c.region() == r)) throw std::domain_error("partition: region mismatch");
    if (gamma.color != Color::Open || gamma.direction != Direction::LeftRight)
        throw std::domain_error("partition: crossing must be open left-right");
    if (gamma.path.empty()) throw std::domain_error("partition: empty crossing");
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(r.site_count()), 0);
    for (std::size_t k = 0; k < gamma.path.size(); ++k) {
        const Site v = gamma.path[k];
        if (!r.contains(v) || !c.is_open(v))
            throw std::domain_error("partition: crossing leaves the open sites of the region");
        if (seen[static_cast<std::size_t>(r.index(v))]++)
            throw std::domain_error("partition: crossing repeats a site");
        if (k > 0) {
            const Site p = gamma.path[k - 1];
            const int dx = v.x - p.x, dy = v.y - p.y;
            bool adjacent = false;
            for (const auto& o : neighbor_offsets)
                adjacent = adjacent || (dx == o[0] && dy == o[1]);
            if (!adjacent) throw std::domain_error("partition: crossing path not connected");
        }
    }
    if (gamma.path.front().x != r.x_min || gamma.path.back().x != r.x_max)
        throw std::domain_error("partition: crossing endpoints off the boundary columns");

    const std::vector<std::uint8_t> face = detail::crossing_faces(r, gamma.path);
    CrossingPartition out;
    out.crossing = gamma;
    for (std::int64_t i = 0; i < r.site_count(); ++i) {
        if (face[static_cast<std::size_t>(i)] == detail::face_top)
            out.top_interior.push_back(r.site_at(i));
        else if (face[static_cast<std::size_t>(i)] == detail::face_bottom)
            out.bottom_interior.push_back(r.site_at(i));
    }
    if (out.top_interior.size() + out.bottom_interior.size() + gamma.path.size() !=
        static_cast<std::size_t>(r.site_count()))
        throw std::logic_error("partition: faces fail to cover the region");
    return out;
}

}  // namespace perc

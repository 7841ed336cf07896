#pragma once

// Generic arm events around a center site, and the four-arm pivotal set.
//
// An arm is a path of prescribed color from a neighbor of the center to a
// prescribed boundary segment, optionally confined to a given side set;
// the center itself belongs to no arm, and all arms must be pairwise
// site-disjoint.  An arm whose target segment already contains the center
// is satisfied by the empty path.
//
// Joint disjointness is decided by unit-vertex-capacity max-flow.  Arms of
// the same color and the same confinement share one flow with one sink per
// target segment; arms whose usable site sets are disjoint (different
// colors always, different confinements when the sets do not meet) cannot
// interact, so their flows are solved independently.  A same-color pair of
// confinements with overlapping usable sites has no max-flow encoding and
// is rejected as unsupported.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perc/lowest_crossing.hpp"

namespace perc {

struct ArmRequirement {
    Color color = Color::Open;
    Boundary target = Boundary::Left;
    std::optional<std::vector<Site>> containment;  // sites the arm may use
};

struct ArmSpec {
    Site center{0, 0};
    Color center_state = Color::Open;
    std::vector<ArmRequirement> arms;
};

namespace detail {

// Vertex-capacitated max-flow, sized for a handful of augmenting paths.
class ArmFlow {
  public:
    explicit ArmFlow(std::int32_t n_nodes) : head_(static_cast<std::size_t>(n_nodes), -1) {}

    void add_edge(std::int32_t from, std::int32_t to, std::int32_t cap) {
        push(from, to, cap);
        push(to, from, 0);
    }

    std::int32_t max_flow(std::int32_t src, std::int32_t snk) {
        std::int32_t total = 0;
        std::vector<std::int32_t> prev_edge(head_.size());
        std::vector<std::int32_t> queue;
        while (true) {
            std::fill(prev_edge.begin(), prev_edge.end(), -1);
            queue.assign(1, src);
            prev_edge[static_cast<std::size_t>(src)] = -2;
            bool found = false;
            for (std::size_t h = 0; h < queue.size() && !found; ++h) {
                const std::int32_t v = queue[h];
                for (std::int32_t e = head_[static_cast<std::size_t>(v)]; e != -1;
                     e = next_[static_cast<std::size_t>(e)]) {
                    const std::int32_t u = to_[static_cast<std::size_t>(e)];
                    if (cap_[static_cast<std::size_t>(e)] <= 0 ||
                        prev_edge[static_cast<std::size_t>(u)] != -1)
                        continue;
                    prev_edge[static_cast<std::size_t>(u)] = e;
                    if (u == snk) {
                        found = true;
                        break;
                    }
                    queue.push_back(u);
                }
            }
            if (!found) return total;
            for (std::int32_t v = snk; v != src;) {
                const std::int32_t e = prev_edge[static_cast<std::size_t>(v)];
                --cap_[static_cast<std::size_t>(e)];
                ++cap_[static_cast<std::size_t>(e ^ 1)];
                v = to_[static_cast<std::size_t>(e ^ 1)];
            }
            ++total;
        }
    }

  private:
    void push(std::int32_t from, std::int32_t to, std::int32_t cap) {
        to_.push_back(to);
        cap_.push_back(cap);
        next_.push_back(head_[static_cast<std::size_t>(from)]);
        head_[static_cast<std::size_t>(from)] = static_cast<std::int32_t>(to_.size()) - 1;
    }

    std::vector<std::int32_t> head_, to_, cap_, next_;
};

}  // namespace detail

inline bool arm_event(const Configuration& c, const Region& r, const ArmSpec& spec) {
    if (!(c.region() == r)) throw std::domain_error("arm_event: region mismatch");
    if (!r.contains(spec.center)) throw std::domain_error("arm_event: center outside region");
    if (spec.arms.empty()) throw std::domain_error("arm_event: no arm requirements");
    if (c.is_open(spec.center) != (spec.center_state == Color::Open)) return false;

    const int w = r.width(), h = r.height();
    const std::int64_t n = r.site_count();
    const std::int32_t center = static_cast<std::int32_t>(r.index(spec.center));

    struct Group {
        Color color;
        std::vector<std::int32_t> confinement;  // sorted indices, empty = whole region
        bool confined = false;
        std::vector<Boundary> targets;
    };
    std::vector<Group> groups;
    for (const ArmRequirement& arm : spec.arms) {
        if (r.on_boundary(spec.center, arm.target)) continue;  // zero-length arm
        std::vector<std::int32_t> conf;
        if (arm.containment) {
            conf.reserve(arm.containment->size());
            for (const Site& v : *arm.containment) {
                if (!r.contains(v))
                    throw std::domain_error("arm_event: containment leaves the region");
                conf.push_back(static_cast<std::int32_t>(r.index(v)));
            }
            std::sort(conf.begin(), conf.end());
            conf.erase(std::unique(conf.begin(), conf.end()), conf.end());
        }
        Group* g = nullptr;
        for (Group& cand : groups)
            if (cand.color == arm.color && cand.confined == arm.containment.has_value() &&
                cand.confinement == conf) {
                g = &cand;
                break;
            }
        if (!g) {
            groups.push_back(Group{arm.color, std::move(conf),
                                   arm.containment.has_value(), {}});
            g = &groups.back();
        }
        g->targets.push_back(arm.target);
    }
    if (groups.empty()) return true;  // every arm was zero-length

    // Usable sites per group; groups must not share any, otherwise the
    // independent flows below would miss cross-group collisions.
    std::vector<std::vector<std::uint8_t>> usable(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& mask = usable[g];
        mask.assign(static_cast<std::size_t>(n), 0);
        const bool want_open = groups[g].color == Color::Open;
        if (groups[g].confined) {
            for (const std::int32_t i : groups[g].confinement)
                if (i != center && c.is_open(i) == want_open)
                    mask[static_cast<std::size_t>(i)] = 1;
        } else {
            for (std::int32_t i = 0; i < n; ++i)
                if (i != center && c.is_open(i) == want_open)
                    mask[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (std::size_t a = 0; a < groups.size(); ++a)
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            if (groups[a].color != groups[b].color) continue;
            for (std::int64_t i = 0; i < n; ++i)
                if (usable[a][static_cast<std::size_t>(i)] &&
                    usable[b][static_cast<std::size_t>(i)])
                    throw std::invalid_argument(
                        "arm_event: same-color confinements overlap; "
                        "unsupported requirement combination");
        }

    const int cx = center % w, cy = center / w;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        // Compact ids for usable sites.
        std::vector<std::int32_t> id(static_cast<std::size_t>(n), -1);
        std::vector<std::int32_t> sites;
        for (std::int32_t i = 0; i < n; ++i)
            if (usable[g][static_cast<std::size_t>(i)]) {
                id[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(sites.size());
                sites.push_back(i);
            }
        std::vector<Boundary> distinct = groups[g].targets;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        const std::int32_t m = static_cast<std::int32_t>(sites.size());
        const std::int32_t src = 0, snk = 1;
        auto in_node = [](std::int32_t k) { return 2 + 2 * k; };
        auto out_node = [](std::int32_t k) { return 3 + 2 * k; };
        const std::int32_t first_target = 2 + 2 * m;
        detail::ArmFlow flow(first_target + static_cast<std::int32_t>(distinct.size()));

        for (std::int32_t k = 0; k < m; ++k) {
            flow.add_edge(in_node(k), out_node(k), 1);
            const std::int32_t i = sites[static_cast<std::size_t>(k)];
            const int x = i % w, y = i / w;
            for (const auto& o : neighbor_offsets) {
                const int nx = x + o[0], ny = y + o[1];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const std::int32_t j = ny * w + nx;
                if (id[static_cast<std::size_t>(j)] >= 0)
                    flow.add_edge(out_node(k), in_node(id[static_cast<std::size_t>(j)]), 1);
            }
            for (std::size_t b = 0; b < distinct.size(); ++b)
                if (r.on_boundary(r.site_at(i), distinct[b]))
                    flow.add_edge(out_node(k), first_target + static_cast<std::int32_t>(b), 1);
        }
        for (const auto& o : neighbor_offsets) {
            const int nx = cx + o[0], ny = cy + o[1];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::int32_t k = id[static_cast<std::size_t>(ny * w + nx)];
            if (k >= 0) flow.add_edge(src, in_node(k), 1);
        }
        std::int32_t want = 0;
        for (std::size_t b = 0; b < distinct.size(); ++b) {
            const std::int32_t mult = static_cast<std::int32_t>(
                std::count(groups[g].targets.begin(), groups[g].targets.end(), distinct[b]));
            flow.add_edge(first_target + static_cast<std::int32_t>(b), snk, mult);
            want += mult;
        }
        if (flow.max_flow(src, snk) < want) return false;
    }
    return true;
}

// Sites of the lowest crossing carrying four disjoint arms: open to the
// left and right, closed to the bottom below the crossing and closed to
// the top above it.  On crossing configurations this is exactly the set of
// sites whose flip changes the crossing indicator.
inline std::vector<Site> pivotal_sites_arms(const Configuration& c, const Region& r) {
    if (!(c.region() == r)) throw std::domain_error("pivotal_sites_arms: region mismatch");
    std::optional<Crossing> gamma = lowest_crossing(c);
    if (!gamma)
        throw std::domain_error("pivotal_sites_arms: no open left-right crossing");
    const CrossingPartition part = partition(c, r, *gamma);

    ArmSpec spec;
    spec.center_state = Color::Open;
    spec.arms = {
        ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
        ArmRequirement{Color::Open, Boundary::Right, std::nullopt},
        ArmRequirement{Color::Closed, Boundary::Bottom, part.bottom_interior},
        ArmRequirement{Color::Closed, Boundary::Top, part.top_interior},
    };
    std::vector<Site> out;
    for (const Site& v : gamma->path) {
        spec.center = v;
        if (arm_event(c, r, spec)) out.push_back(v);
    }
    std::sort(out.begin(), out.end(), [&](const Site& a, const Site& b) {
        return r.index(a) < r.index(b);
    });
    return out;
}

}  // namespace perc

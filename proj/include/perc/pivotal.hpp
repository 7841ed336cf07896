#pragma once

// Pivotal sites for the open left-right crossing event.
//
// A site v is pivotal when the crossing indicator differs between the
// configuration with v forced open and with v forced closed; the definition
// never looks at v's own state.  The scan below evaluates this for every
// site in near-linear total time instead of re-running a crossing detector
// per site.  It rests on the exact complementarity of the two colors here:
// forcing v closed kills the open LR crossing exactly when v hooks the
// closed top territory to the closed bottom territory (and symmetrically,
// forcing v open creates the crossing exactly when v bridges the open left
// and right territories).  Both hooks are readable off component boundary
// flags computed once.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perc/crossings.hpp"

namespace perc {

struct LrPivotalScan {
    bool lr = false;            // does the configuration itself cross?
    std::int64_t n_pivotal = 0;
};

namespace detail {

template <class StateFn>
LrPivotalScan lr_pivotal_scan(const Region& r, StateFn state,
                              DisjointSets& uf_open, DisjointSets& uf_closed,
                              std::vector<Site>* sites_out = nullptr) {
    ComponentFlags<StateFn> open_comp(r, state, Color::Open, uf_open);
    ComponentFlags<StateFn> closed_comp(r, state, Color::Closed, uf_closed);

    LrPivotalScan out;
    out.lr = open_comp.any_component_with(touch_left, touch_right);

    const int w = r.width(), h = r.height();
    const std::int64_t n = r.site_count();
    for (std::int64_t i = 0; i < n; ++i) {
        const bool open = state(i);
        if (open != out.lr) continue;  // candidates: open if crossing, else closed
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);

        bool want_a, want_b;
        if (out.lr) {
            // Closing an open site breaks the crossing iff the closed
            // neighborhood reaches both the top and the bottom through it.
            want_a = y == h - 1;
            want_b = y == 0;
        } else {
            // Opening a closed site creates the crossing iff the open
            // neighborhood reaches both the left and the right through it.
            want_a = x == 0;
            want_b = x == w - 1;
        }
        const std::uint8_t bit_a = out.lr ? touch_top : touch_left;
        const std::uint8_t bit_b = out.lr ? touch_bottom : touch_right;
        if (!(want_a && want_b)) {
            for (int d = 0; d < 6 && !(want_a && want_b); ++d) {
                const int nx = x + neighbor_offsets[static_cast<std::size_t>(d)][0];
                const int ny = y + neighbor_offsets[static_cast<std::size_t>(d)][1];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const std::int64_t j = static_cast<std::int64_t>(ny) * w + nx;
                if (state(j) == out.lr) continue;  // need the other color
                const std::uint8_t f = out.lr ? closed_comp.flags_at(j)
                                              : open_comp.flags_at(j);
                want_a = want_a || (f & bit_a);
                want_b = want_b || (f & bit_b);
            }
        }
        if (want_a && want_b) {
            ++out.n_pivotal;
            if (sites_out)
                sites_out->push_back(Site{r.x_min + x, r.y_min + y});
        }
    }
    return out;
}

}  // namespace detail

// All pivotal sites, in row-major order.
inline std::vector<Site> pivotal_sites_flip(const Configuration& c) {
    DisjointSets uf_open, uf_closed;
    std::vector<Site> sites;
    auto state = [&](std::int64_t i) { return c.is_open(i); };
    detail::lr_pivotal_scan(c.region(), state, uf_open, uf_closed, &sites);
    return sites;
}

inline std::int64_t count_pivotal(const Configuration& c) {
    DisjointSets uf_open, uf_closed;
    auto state = [&](std::int64_t i) { return c.is_open(i); };
    return detail::lr_pivotal_scan(c.region(), state, uf_open, uf_closed).n_pivotal;
}

namespace detail {

inline void require_same_region(const Configuration& c, const Region& r,
                                const char* what) {
    if (!(c.region() == r)) throw std::domain_error(what);
}

}  // namespace detail

inline std::vector<Site> pivotal_sites_flip(const Configuration& c, const Region& r) {
    detail::require_same_region(c, r, "pivotal_sites_flip: region mismatch");
    return pivotal_sites_flip(c);
}

inline std::int64_t count_pivotal(const Configuration& c, const Region& r) {
    detail::require_same_region(c, r, "count_pivotal: region mismatch");
    return count_pivotal(c);
}

}  // namespace perc

#include <map>
#include <queue>
#include <stdexcept>

#include <catch2/catch_amalgamated.hpp>

#include "support/naive.hpp"

using namespace perc;

namespace {

// Rim-touch reference for radius_reached: BFS inside sub over open sites.
bool naive_rim_touch(const Configuration& c, const Site& v, const Region& sub) {
    if (!c.is_open(v)) return false;
    auto on_rim = [&](const Site& s) {
        return s.x == sub.x_min || s.x == sub.x_max || s.y == sub.y_min || s.y == sub.y_max;
    };
    std::vector<char> seen(static_cast<std::size_t>(sub.site_count()), 0);
    std::queue<Site> queue;
    queue.push(v);
    seen[static_cast<std::size_t>(sub.index(v))] = 1;
    while (!queue.empty()) {
        Site s = queue.front();
        queue.pop();
        if (on_rim(s)) return true;
        for (Site w : neighbors(s)) {
            if (!sub.contains(w) || !c.is_open(w)) continue;
            auto j = static_cast<std::size_t>(sub.index(w));
            if (!seen[j]) {
                seen[j] = 1;
                queue.push(w);
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("cluster labels agree with reference components", "[clusters]") {
    Region r = Region::square(5);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        double p = (seed % 2) ? 0.35 : 0.6;
        Configuration c = Configuration::sample(r, p, seed);
        for (Color color : {Color::Open, Color::Closed}) {
            ClusterLabeling lab = label_clusters(c, color);
            auto ref = testref::naive_components(c, color);
            REQUIRE(lab.label.size() == ref.size());

            // Same off-color mask, and the two labelings induce the same
            // partition (labels may be numbered differently).
            std::map<std::int32_t, std::int32_t> fwd, bwd;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                REQUIRE((lab.label[i] < 0) == (ref[i] < 0));
                if (ref[i] < 0) continue;
                auto [fit, fnew] = fwd.try_emplace(ref[i], lab.label[i]);
                REQUIRE(fit->second == lab.label[i]);
                auto [bit, bnew] = bwd.try_emplace(lab.label[i], ref[i]);
                REQUIRE(bit->second == ref[i]);
                (void)fnew;
                (void)bnew;
            }
            REQUIRE(lab.n_clusters() == static_cast<std::int32_t>(fwd.size()));

            std::int64_t total = 0;
            for (auto s : lab.sizes) total += s;
            std::int64_t expect = 0;
            for (std::size_t i = 0; i < ref.size(); ++i)
                if (ref[i] >= 0) ++expect;
            REQUIRE(total == expect);
        }
    }
}

TEST_CASE("cluster_size_at matches the labeled size", "[clusters]") {
    Region r = Region::square(4);
    Configuration c = Configuration::sample(r, 0.5, 31);
    ClusterLabeling lab = label_clusters(c, Color::Open);
    for (std::int64_t i = 0; i < r.site_count(); ++i) {
        Site v = r.site_at(i);
        if (c.is_open(i)) {
            REQUIRE(cluster_size_at(c, v) == lab.sizes[static_cast<std::size_t>(lab.label[i])]);
        } else {
            REQUIRE(cluster_size_at(c, v) == 0);
        }
    }
    REQUIRE_THROWS_AS(cluster_size_at(c, Site{9, 9}), std::domain_error);
}

TEST_CASE("radius_reached agrees with a direct rim search", "[clusters]") {
    Region r = Region::square(8);
    Region sub(2, 6, 2, 6);
    Site v{4, 4};
    for (std::uint64_t seed = 100; seed < 180; ++seed) {
        Configuration c = Configuration::sample(r, 0.55, seed);
        REQUIRE(radius_reached(c, v, sub) == naive_rim_touch(c, v, sub));
    }
    Configuration c = Configuration::sample(r, 0.5, 7);
    REQUIRE_THROWS_AS(radius_reached(c, Site{0, 0}, sub), std::domain_error);
    REQUIRE_THROWS_AS(radius_reached(c, v, Region(2, 9, 2, 6)), std::domain_error);
}

TEST_CASE("has_crossing matches BFS on every 3x3 configuration", "[crossings]") {
    Region r = Region::square(2);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
        Configuration c = Configuration::from_mask(r, mask);
        for (Direction dir : {Direction::LeftRight, Direction::TopBottom}) {
            for (Color color : {Color::Open, Color::Closed}) {
                CrossingQuery q{r, dir, color};
                REQUIRE(has_crossing(c, q) == testref::naive_crossing(c, dir, color));
            }
        }
    }
}

TEST_CASE("has_crossing matches BFS on random 9x9 configurations", "[crossings]") {
    Region r = Region::square(8);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        double p = 0.4 + 0.1 * static_cast<double>(seed % 3);
        Configuration c = Configuration::sample(r, p, 1000 + seed);
        for (Direction dir : {Direction::LeftRight, Direction::TopBottom}) {
            for (Color color : {Color::Open, Color::Closed}) {
                CrossingQuery q{r, dir, color};
                REQUIRE(has_crossing(c, q) == testref::naive_crossing(c, dir, color));
            }
        }
    }
}

TEST_CASE("has_crossing rejects a mismatched query region", "[crossings]") {
    Configuration c = Configuration::sample(Region::square(3), 0.5, 1);
    CrossingQuery q{Region::square(2), Direction::LeftRight, Color::Open};
    REQUIRE_THROWS_AS(has_crossing(c, q), std::domain_error);
}

TEST_CASE("closed circuits in a tight annulus", "[crossings][annulus]") {
    Region outer = Region::square(2);
    Region inner(1, 1, 1, 1);

    // Every ring site closed: nothing open can separate, circuit present.
    Configuration ring_closed = Configuration::from_open_sites(outer, {Site{1, 1}});
    REQUIRE(closed_circuit_in_annulus(ring_closed, inner, outer));

    // Opening the corner (0,0) does not break the circuit: the corner is not
    // lattice-adjacent to the center, and the closed ring still connects
    // around it through the (0,1)-(1,0) anti-diagonal edge.
    Configuration corner_open = ring_closed.with_state(Site{0, 0}, true);
    REQUIRE(closed_circuit_in_annulus(corner_open, inner, outer));

    // Opening an axis neighbor of the center punches a radial open path from
    // the center's boundary to the rim, so no closed circuit survives.
    Configuration axis_open = ring_closed.with_state(Site{1, 0}, true);
    REQUIRE_FALSE(closed_circuit_in_annulus(axis_open, inner, outer));

    REQUIRE_THROWS_AS(closed_circuit_in_annulus(ring_closed, Region(0, 1, 0, 1), outer),
                      std::domain_error);
}

TEST_CASE("closed circuits are monotone under closing sites", "[crossings][annulus]") {
    Region outer = Region::square(4);
    Region inner(2, 2, 2, 2);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Configuration c = Configuration::sample(outer, 0.5, 500 + seed);
        const bool before = closed_circuit_in_annulus(c, inner, outer);
        for (std::int64_t i = 0; i < outer.site_count(); ++i) {
            Configuration closed_more = c.with_state(outer.site_at(i), false);
            const bool after = closed_circuit_in_annulus(closed_more, inner, outer);
            if (before) REQUIRE(after);
        }
    }
}

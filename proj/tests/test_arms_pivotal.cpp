#include <set>
#include <stdexcept>

#include <catch2/catch_amalgamated.hpp>

#include "support/naive.hpp"

using namespace perc;

namespace {

std::vector<Site> sorted_by_index(const Region& r, std::vector<Site> v) {
    std::sort(v.begin(), v.end(),
              [&](const Site& a, const Site& b) { return r.index(a) < r.index(b); });
    return v;
}

}  // namespace

TEST_CASE("flip-pivotal sites match brute-force re-evaluation", "[pivotal]") {
    Region r2 = Region::square(2);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
        Configuration c = Configuration::from_mask(r2, mask);
        REQUIRE(pivotal_sites_flip(c) == sorted_by_index(r2, testref::naive_pivotal(c)));
        REQUIRE(count_pivotal(c) ==
                static_cast<std::int64_t>(testref::naive_pivotal(c).size()));
    }

    Region r8 = Region::square(8);
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        double p = 0.4 + 0.1 * static_cast<double>(seed % 3);
        Configuration c = Configuration::sample(r8, p, 31000 + seed);
        REQUIRE(pivotal_sites_flip(c) == sorted_by_index(r8, testref::naive_pivotal(c)));
    }
}

TEST_CASE("pivotality does not depend on the site's own state", "[pivotal]") {
    Region r = Region::square(5);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Configuration c = Configuration::sample(r, 0.5, 45000 + seed);
        auto piv = pivotal_sites_flip(c);
        std::set<Site> in_piv(piv.begin(), piv.end());
        for (std::int64_t i = 0; i < r.site_count(); ++i) {
            Site v = r.site_at(i);
            auto piv_flipped = pivotal_sites_flip(c.flip(v));
            bool now = std::find(piv_flipped.begin(), piv_flipped.end(), v) !=
                       piv_flipped.end();
            REQUIRE(now == (in_piv.count(v) == 1));
        }
    }
}

TEST_CASE("pivotal counts are invariant under the half turn", "[pivotal][symmetry]") {
    Region r = Region::square(2);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
        Configuration c = Configuration::from_mask(r, mask);
        REQUIRE(count_pivotal(c) == count_pivotal(testref::rotate_180(c)));
    }
}

TEST_CASE("arm-counted pivotal sites equal flip-pivotal sites when a crossing exists",
          "[pivotal][arms]") {
    Region r2 = Region::square(2);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
        Configuration c = Configuration::from_mask(r2, mask);
        auto gamma = lowest_crossing(c);
        if (!gamma) continue;
        auto via_arms = pivotal_sites_arms(c, r2);
        REQUIRE(via_arms == pivotal_sites_flip(c));
        std::set<Site> on_path(gamma->path.begin(), gamma->path.end());
        for (Site v : via_arms) REQUIRE(on_path.count(v) == 1);
    }

    Region r8 = Region::square(8);
    int crossed = 0;
    for (std::uint64_t seed = 0; seed < 800 && crossed < 250; ++seed) {
        Configuration c = Configuration::sample(r8, 0.5, 52000 + seed);
        auto gamma = lowest_crossing(c);
        if (!gamma) {
            REQUIRE_THROWS_AS(pivotal_sites_arms(c, r8), std::domain_error);
            continue;
        }
        ++crossed;
        auto via_arms = pivotal_sites_arms(c, r8);
        REQUIRE(via_arms == pivotal_sites_flip(c));
        std::set<Site> on_path(gamma->path.begin(), gamma->path.end());
        for (Site v : via_arms) REQUIRE(on_path.count(v) == 1);
    }
    REQUIRE(crossed == 250);
}

TEST_CASE("every lowest-crossing site carries three arms", "[arms][lowest]") {
    Region r = Region::square(2);
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
        Configuration c = Configuration::from_mask(r, mask);
        auto gamma = lowest_crossing(c);
        if (!gamma) continue;
        CrossingPartition part = partition(c, r, *gamma);
        for (Site v : gamma->path) {
            ArmSpec spec;
            spec.center = v;
            spec.center_state = Color::Open;
            spec.arms = {
                ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
                ArmRequirement{Color::Open, Boundary::Right, std::nullopt},
                ArmRequirement{Color::Closed, Boundary::Bottom, part.bottom_interior},
            };
            REQUIRE(arm_event(c, r, spec));
        }
    }
}

TEST_CASE("hand-built arm events on the 3x3 square", "[arms]") {
    Region r = Region::square(2);
    // Open middle row, everything else closed.
    Configuration row = Configuration::from_open_sites(
        r, {Site{0, 1}, Site{1, 1}, Site{2, 1}});

    ArmSpec four;
    four.center = Site{1, 1};
    four.center_state = Color::Open;
    four.arms = {
        ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
        ArmRequirement{Color::Open, Boundary::Right, std::nullopt},
        ArmRequirement{Color::Closed, Boundary::Bottom, std::nullopt},
        ArmRequirement{Color::Closed, Boundary::Top, std::nullopt},
    };
    REQUIRE(arm_event(row, r, four));

    // Wrong center state: the event is simply false.
    ArmSpec closed_center = four;
    closed_center.center_state = Color::Closed;
    REQUIRE_FALSE(arm_event(row, r, closed_center));

    // Cutting the left arm kills the event.
    REQUIRE_FALSE(arm_event(row.with_state(Site{0, 1}, false), r, four));

    ArmSpec empty_arms;
    empty_arms.center = Site{1, 1};
    REQUIRE_THROWS_AS(arm_event(row, r, empty_arms), std::domain_error);
    ArmSpec outside = four;
    outside.center = Site{5, 5};
    REQUIRE_THROWS_AS(arm_event(row, r, outside), std::domain_error);
}

TEST_CASE("repeated arms demand vertex-disjoint paths", "[arms]") {
    Region r = Region::square(2);
    ArmSpec two_left;
    two_left.center = Site{1, 1};
    two_left.center_state = Color::Open;
    two_left.arms = {
        ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
        ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
    };

    // Two disjoint routes to the left column: directly via (0,1), and via
    // (1,0) then (0,0).
    Configuration good = Configuration::from_open_sites(
        r, {Site{1, 1}, Site{0, 1}, Site{1, 0}, Site{0, 0}});
    REQUIRE(arm_event(good, r, two_left));

    // Close (0,0): the second route now has to pass through (0,1), which the
    // first arm already occupies, so only one vertex-disjoint arm remains.
    Configuration pinched = good.with_state(Site{0, 0}, false);
    REQUIRE_FALSE(arm_event(pinched, r, two_left));
}

TEST_CASE("arms confined to overlapping same-color site sets are rejected", "[arms]") {
    Region r = Region::square(2);
    // Only the center is open; every confinement site below is closed.
    Configuration c = Configuration::from_open_sites(r, {Site{1, 1}});
    std::vector<Site> left_half = {Site{0, 0}, Site{0, 1}, Site{0, 2}};
    std::vector<Site> bottom_half = {Site{0, 0}, Site{1, 0}, Site{2, 0}};

    ArmSpec overlapping;
    overlapping.center = Site{1, 1};
    overlapping.center_state = Color::Open;
    overlapping.arms = {
        ArmRequirement{Color::Closed, Boundary::Left, left_half},
        ArmRequirement{Color::Closed, Boundary::Bottom, bottom_half},
    };
    // (0,0) lies in both confinements and is closed, so the two closed arms
    // could share it and the disjointness count would be ill-posed.
    REQUIRE_THROWS_AS(arm_event(c, r, overlapping), std::invalid_argument);

    ArmSpec disjoint = overlapping;
    disjoint.arms[0].containment = std::vector<Site>{Site{0, 1}, Site{0, 2}};
    REQUIRE(arm_event(c, r, disjoint));
}

TEST_CASE("arms of zero length are dropped, not routed", "[arms]") {
    Region r = Region::square(2);
    // Center sits on the left column; asking for a left arm is vacuous, the
    // right arm still has to exist.
    ArmSpec spec;
    spec.center = Site{0, 1};
    spec.center_state = Color::Open;
    spec.arms = {
        ArmRequirement{Color::Open, Boundary::Left, std::nullopt},
        ArmRequirement{Color::Open, Boundary::Right, std::nullopt},
    };
    Configuration through = Configuration::from_open_sites(
        r, {Site{0, 1}, Site{1, 1}, Site{2, 1}});
    REQUIRE(arm_event(through, r, spec));
    Configuration stub = Configuration::from_open_sites(r, {Site{0, 1}, Site{1, 1}});
    REQUIRE_FALSE(arm_event(stub, r, spec));
    // Only vacuous arms: the event holds outright.
    ArmSpec vacuous;
    vacuous.center = Site{0, 1};
    vacuous.center_state = Color::Open;
    vacuous.arms = {ArmRequirement{Color::Open, Boundary::Left, std::nullopt}};
    Configuration lone = Configuration::from_open_sites(r, {Site{0, 1}});
    REQUIRE(arm_event(lone, r, vacuous));
}

#pragma once

// Exhaustive enumeration over all configurations of a tiny region: exact
// event polynomials, exact pivotal expectations, and referee checks for
// duality, differentiation identities, positive correlation and the
// minimal-below-region crossing.
//
// Event probabilities are stored as integer coefficient vectors c_k (the
// number of k-open-site configurations in the event), so enumeration
// introduces no rounding at all; floating point enters only when a
// polynomial is evaluated.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perc/lowest_crossing.hpp"
#include "perc/pivotal.hpp"

namespace perc {

inline constexpr std::int64_t enumeration_cap_sites = 25;

struct EventPolynomial {
    std::int64_t sites = 0;
    std::vector<std::uint64_t> coeff;  // coeff[k] = #configs with k open sites in the event

    // P(p) = sum_k coeff[k] p^k (1-p)^(sites-k)
    double eval(double p) const {
        double acc = 0.0;
        for (std::int64_t k = 0; k <= sites; ++k)
            acc += static_cast<double>(coeff[static_cast<std::size_t>(k)]) *
                   std::pow(p, static_cast<double>(k)) *
                   std::pow(1.0 - p, static_cast<double>(sites - k));
        return acc;
    }

    double derivative(double p) const {
        double acc = 0.0;
        for (std::int64_t k = 0; k <= sites; ++k) {
            const double c = static_cast<double>(coeff[static_cast<std::size_t>(k)]);
            if (c == 0.0) continue;
            if (k > 0)
                acc += c * static_cast<double>(k) * std::pow(p, static_cast<double>(k - 1)) *
                       std::pow(1.0 - p, static_cast<double>(sites - k));
            if (k < sites)
                acc -= c * static_cast<double>(sites - k) * std::pow(p, static_cast<double>(k)) *
                       std::pow(1.0 - p, static_cast<double>(sites - k - 1));
        }
        return acc;
    }
};

namespace detail {

inline void require_enumerable(const Region& r, const char* what) {
    if (r.site_count() > enumeration_cap_sites) throw std::length_error(what);
}

// p^k and (1-p)^k for k = 0..n, so enumeration loops avoid pow calls.
struct PowTable {
    std::vector<double> pk, qk;
    PowTable(double p, std::int64_t n) {
        pk.assign(static_cast<std::size_t>(n) + 1, 1.0);
        qk.assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (std::int64_t k = 1; k <= n; ++k) {
            pk[static_cast<std::size_t>(k)] = pk[static_cast<std::size_t>(k - 1)] * p;
            qk[static_cast<std::size_t>(k)] = qk[static_cast<std::size_t>(k - 1)] * (1.0 - p);
        }
    }
    double weight(std::int64_t k, std::int64_t n) const {
        return pk[static_cast<std::size_t>(k)] * qk[static_cast<std::size_t>(n - k)];
    }
};

}  // namespace detail

template <class Pred>
EventPolynomial event_polynomial(const Region& r, Pred&& event) {
    detail::require_enumerable(r, "event_polynomial: region exceeds the enumeration cap");
    const std::int64_t n = r.site_count();
    EventPolynomial poly;
    poly.sites = n;
    poly.coeff.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Configuration c = Configuration::from_mask(r, mask);
        if (event(c)) ++poly.coeff[static_cast<std::size_t>(std::popcount(mask))];
    }
    return poly;
}

inline double exact_expected_pivotal(const Region& r, double p) {
    detail::require_enumerable(r, "exact_expected_pivotal: region exceeds the enumeration cap");
    const std::int64_t n = r.site_count();
    const detail::PowTable pow_table(p, n);
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Configuration c = Configuration::from_mask(r, mask);
        const std::int64_t pivotal = count_pivotal(c);
        if (pivotal)
            acc += static_cast<double>(pivotal) * pow_table.weight(std::popcount(mask), n);
    }
    return acc;
}

// E_p(N; LR) / P_p(LR), the expectation conditioned on an open crossing.
inline double exact_expected_pivotal_on_LR(const Region& r, double p) {
    detail::require_enumerable(r,
                               "exact_expected_pivotal_on_LR: region exceeds the enumeration cap");
    const std::int64_t n = r.site_count();
    const detail::PowTable pow_table(p, n);
    double joint = 0.0, crossing_mass = 0.0;
    DisjointSets uf_open, uf_closed;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Configuration c = Configuration::from_mask(r, mask);
        auto state = [&](std::int64_t i) { return c.is_open(i); };
        const LrPivotalScan scan = detail::lr_pivotal_scan(r, state, uf_open, uf_closed);
        if (!scan.lr) continue;
        const double weight = pow_table.weight(std::popcount(mask), n);
        crossing_mass += weight;
        joint += static_cast<double>(scan.n_pivotal) * weight;
    }
    if (crossing_mass <= 0.0)
        throw std::domain_error("exact_expected_pivotal_on_LR: crossing event has no mass");
    return joint / crossing_mass;
}

struct RussoReport {
    double lhs = 0.0;  // analytic derivative of the crossing polynomial
    double rhs = 0.0;  // exact expected pivotal count
    bool pass = false;
};

inline RussoReport verify_russo(const Region& r, double p, double tol) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("verify_russo: p must lie strictly inside (0,1)");
    const EventPolynomial poly = event_polynomial(r, [&](const Configuration& c) {
        return has_crossing(c, CrossingQuery{r, Direction::LeftRight, Color::Open});
    });
    RussoReport report;
    report.lhs = poly.derivative(p);
    report.rhs = exact_expected_pivotal(r, p);
    report.pass = std::fabs(report.lhs - report.rhs) <= tol;
    return report;
}

inline bool verify_duality(const Region& r) {
    detail::require_enumerable(r, "verify_duality: region exceeds the enumeration cap");
    const std::int64_t n = r.site_count();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Configuration c = Configuration::from_mask(r, mask);
        const bool lr = has_crossing(c, CrossingQuery{r, Direction::LeftRight, Color::Open});
        const bool tb_star =
            has_crossing(c, CrossingQuery{r, Direction::TopBottom, Color::Closed});
        if (lr == tb_star) return false;
    }
    return true;
}

template <class PredA, class PredB>
bool verify_fkg(const Region& r, double p, PredA&& a, PredB&& b) {
    detail::require_enumerable(r, "verify_fkg: region exceeds the enumeration cap");
    const std::int64_t n = r.site_count();
    const detail::PowTable pow_table(p, n);
    double pa = 0.0, pb = 0.0, pab = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Configuration c = Configuration::from_mask(r, mask);
        const bool in_a = a(c), in_b = b(c);
        if (!in_a && !in_b) continue;
        const double weight = pow_table.weight(std::popcount(mask), n);
        if (in_a) pa += weight;
        if (in_b) pb += weight;
        if (in_a && in_b) pab += weight;
    }
    return pab >= pa * pb - 1e-12;
}

namespace detail {

// Every self-avoiding left-right path of a region at most 4x4, stored as
// site masks together with the strictly-below face mask of its polyline.
// One table serves sweeps over all configurations of the region: a path is
// an open crossing of a configuration exactly when its site mask is a
// subset of the open mask.
struct LrPathEntry {
    std::uint32_t sites = 0;
    std::uint32_t below = 0;  // strictly below: B(path) = sites | below
};

class LrPathTable {
  public:
    explicit LrPathTable(const Region& r) : region_(r) {
        if (r.width() > 4 || r.height() > 4)
            throw std::length_error("LrPathTable: region exceeds the path enumeration cap");
        const int w = r.width(), h = r.height();
        std::vector<Site> path;
        std::vector<std::uint8_t> used(static_cast<std::size_t>(r.site_count()), 0);
        struct Frame {
            std::int32_t site;
            std::size_t next_offset;
        };
        std::vector<Frame> stack;
        for (int y0 = 0; y0 < h; ++y0) {
            stack.assign(1, {y0 * w, 0});
            used[static_cast<std::size_t>(y0 * w)] = 1;
            path.assign(1, r.site_at(y0 * w));
            if (w == 1) record(path);
            while (!stack.empty()) {
                Frame& f = stack.back();
                const int x = f.site % w, yy = f.site / w;
                bool advanced = false;
                while (f.next_offset < 6) {
                    const auto& o = neighbor_offsets[f.next_offset++];
                    const int nx = x + o[0], ny = yy + o[1];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::int32_t j = ny * w + nx;
                    if (used[static_cast<std::size_t>(j)]) continue;
                    used[static_cast<std::size_t>(j)] = 1;
                    path.push_back(r.site_at(j));
                    stack.push_back({j, 0});
                    if (nx == w - 1) record(path);
                    advanced = true;
                    break;
                }
                if (!advanced) {
                    used[static_cast<std::size_t>(f.site)] = 0;
                    path.pop_back();
                    stack.pop_back();
                }
            }
        }
    }

    // Joint-minimal crossing for the given open-site mask: its below-region
    // and its strict interior are contained in those of every other open
    // crossing, which is also asserted.  Absent when nothing crosses.
    std::optional<LrPathEntry> minimal(std::uint32_t open_mask) const {
        const LrPathEntry* best = nullptr;
        int best_b = 0, best_bo = 0;
        for (const LrPathEntry& e : entries_) {
            if ((e.sites & ~open_mask) != 0) continue;
            const int nb = std::popcount(e.sites | e.below), nbo = std::popcount(e.below);
            if (!best || nb < best_b || (nb == best_b && nbo < best_bo)) {
                best = &e;
                best_b = nb;
                best_bo = nbo;
            }
        }
        if (!best) return std::nullopt;
        const std::uint32_t b_mask = best->sites | best->below;
        for (const LrPathEntry& e : entries_) {
            if ((e.sites & ~open_mask) != 0) continue;
            if ((b_mask & ~(e.sites | e.below)) != 0 || (best->below & ~e.below) != 0)
                throw std::logic_error("LrPathTable: no crossing is jointly minimal");
        }
        return *best;
    }

    const std::vector<LrPathEntry>& entries() const { return entries_; }
    const Region& region() const { return region_; }

  private:
    void record(const std::vector<Site>& path) {
        const std::vector<std::uint8_t> face = crossing_faces(region_, path);
        LrPathEntry e;
        for (const Site& v : path)
            e.sites |= std::uint32_t{1} << region_.index(v);
        for (std::int64_t i = 0; i < region_.site_count(); ++i)
            if (face[static_cast<std::size_t>(i)] == face_bottom)
                e.below |= std::uint32_t{1} << i;
        entries_.push_back(e);
    }

    Region region_;
    std::vector<LrPathEntry> entries_;
};

}  // namespace detail

// Path-enumeration reference for lowest_crossing; the emitted site order is
// the same canonical ordering the fast walk uses, so agreement tests can
// compare paths verbatim.
inline std::optional<Crossing> brute_force_lowest_crossing(const Configuration& c,
                                                           const Region& r) {
    if (!(c.region() == r))
        throw std::domain_error("brute_force_lowest_crossing: region mismatch");
    const detail::LrPathTable table(r);
    const std::optional<detail::LrPathEntry> best =
        table.minimal(static_cast<std::uint32_t>(c.as_mask()));
    if (!best) return std::nullopt;
    std::vector<std::int32_t> members;
    for (std::int64_t i = 0; i < r.site_count(); ++i)
        if (best->sites & (std::uint32_t{1} << i)) members.push_back(static_cast<std::int32_t>(i));
    return Crossing{detail::order_crossing_set(r, members), Color::Open, Direction::LeftRight};
}

}  // namespace perc

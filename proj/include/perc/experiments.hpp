#pragma once

// Monte Carlo experiment layer.
//
// Replicas are keyed by (master_seed, replica_index) through the counter-based
// generator in rng.hpp, so a replica's draws do not depend on which worker ran
// it.  Workers write into preallocated replica-indexed slots and every merge
// walks those slots in index order, which makes records bitwise identical
// across thread counts.  One uniform draw per site serves the whole p grid:
// the open indicator u < threshold(p) is monotone in p, so estimated curves
// are exactly monotone, not just statistically.
//
// Worker bodies must not throw; estimation failures are detected after the
// merge, on the full per-replica data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "perc/crossings.hpp"
#include "perc/lattice.hpp"
#include "perc/pivotal.hpp"
#include "perc/rng.hpp"
#include "perc/stats.hpp"

namespace perc {

enum class ExperimentKind {
    CrossingProb,
    ConditionalPivotal,
    OneArm,
    ClusterTail,
    RswAspect,
    PcLocate,
};

inline const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::CrossingProb: return "crossing_prob";
        case ExperimentKind::ConditionalPivotal: return "conditional_pivotal";
        case ExperimentKind::OneArm: return "one_arm";
        case ExperimentKind::ClusterTail: return "cluster_tail";
        case ExperimentKind::RswAspect: return "rsw_aspect";
        case ExperimentKind::PcLocate: return "pc_locate";
    }
    return "unknown";
}

// Digits of e; bare runs stay reproducible because the default is a constant,
// not entropy.
inline constexpr std::uint64_t default_master_seed = 271828182845904523ULL;

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::CrossingProb;
    std::vector<int> n_values;
    std::vector<double> p_values;
    std::int64_t replicas = 10000;
    std::uint64_t master_seed = default_master_seed;
    int aspect = 1;   // rectangles are [0, aspect*n] x [0, n]
    int threads = 1;  // 0 = one worker per hardware thread
    bool condition_on_origin_open = false;  // one_arm / cluster_tail only
};

struct EstimateRecord {
    ExperimentKind kind = ExperimentKind::CrossingProb;
    int n = 0;
    double p = std::numeric_limits<double>::quiet_NaN();  // NaN where not applicable
    int aspect = 1;
    double estimate = 0.0;
    double std_error = 0.0;  // named so because stderr is a <cstdio> macro
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::vector<std::pair<std::string, double>> extras;  // JSON-only details
};

namespace detail {

inline void validate_spec(const ExperimentSpec& spec, ExperimentKind expected,
                          const char* op) {
    if (spec.kind != expected)
        throw std::domain_error(std::string(op) + ": spec built for a different kind");
    if (spec.replicas < 1)
        throw std::domain_error(std::string(op) + ": need at least one replica");
    if (spec.n_values.empty())
        throw std::domain_error(std::string(op) + ": no n values");
    for (const int n : spec.n_values)
        if (n < 0) throw std::domain_error(std::string(op) + ": negative n");
    for (const double p : spec.p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error(std::string(op) + ": p outside [0, 1]");
    if (spec.aspect < 1)
        throw std::domain_error(std::string(op) + ": aspect below 1");
}

// Runs fn(replica, scratch) for every replica index, splitting the index
// range into one contiguous chunk per worker.  Each worker owns one Scratch.
template <class Scratch, class Fn>
void for_each_replica(std::int64_t replicas, int threads, Fn fn) {
    int t = threads == 0 ? static_cast<int>(std::thread::hardware_concurrency())
                         : threads;
    if (t < 1) t = 1;
    if (static_cast<std::int64_t>(t) > replicas) t = static_cast<int>(replicas);
    if (t <= 1) {
        Scratch scratch;
        for (std::int64_t rep = 0; rep < replicas; ++rep) fn(rep, scratch);
        return;
    }
    const std::int64_t chunk = (replicas + t - 1) / t;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int k = 0; k < t; ++k) {
        const std::int64_t lo = static_cast<std::int64_t>(k) * chunk;
        const std::int64_t hi = std::min(replicas, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            Scratch scratch;
            for (std::int64_t rep = lo; rep < hi; ++rep) fn(rep, scratch);
        });
    }
    for (std::thread& th : pool) th.join();
}

inline std::uint64_t resample_seed(std::uint64_t master, std::uint64_t salt) {
    return stream_seed(master ^ 0xB0075EED00000000ULL, salt);
}

// Percentile bootstrap intervals occasionally land on one side of the point
// estimate; records promise to contain it.
inline void widen_to_contain(EstimateRecord& rec) {
    rec.ci_lo = std::min(rec.ci_lo, rec.estimate);
    rec.ci_hi = std::max(rec.ci_hi, rec.estimate);
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
}

struct SweepScratch {
    std::vector<std::uint64_t> u;
    DisjointSets uf;
};

}  // namespace detail

// Records plus the per-replica indicators behind them, for fits that
// bootstrap at replica level.  Records are ordered n-major, p-minor.
struct CrossingProbData {
    std::vector<EstimateRecord> records;
    std::vector<std::vector<std::uint8_t>> indicators;  // [record][replica]
};

namespace detail {

inline CrossingProbData crossing_probability_sweep(const ExperimentSpec& spec,
                                                   const char* op) {
    if (spec.p_values.empty()) throw std::domain_error(std::string(op) + ": no p values");
    const std::size_t np = spec.p_values.size();
    const std::int64_t R = spec.replicas;

    std::vector<std::uint64_t> th(np);
    std::vector<char> always(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
        th[pi] = open_threshold(spec.p_values[pi]);
        always[pi] = spec.p_values[pi] >= 1.0;
    }

    CrossingProbData out;
    for (const int n : spec.n_values) {
        const auto start = std::chrono::steady_clock::now();
        const Region r(0, spec.aspect * n, 0, n);
        const std::int64_t sites = r.site_count();

        std::vector<std::vector<std::uint8_t>> bits(
            np, std::vector<std::uint8_t>(static_cast<std::size_t>(R), 0));
        detail::for_each_replica<SweepScratch>(
            R, spec.threads, [&](std::int64_t rep, SweepScratch& s) {
                const std::uint64_t seed =
                    stream_seed(spec.master_seed, static_cast<std::uint64_t>(rep));
                s.u.resize(static_cast<std::size_t>(sites));
                for (std::int64_t i = 0; i < sites; ++i)
                    s.u[static_cast<std::size_t>(i)] =
                        site_uniform(seed, static_cast<std::uint64_t>(i));
                for (std::size_t pi = 0; pi < np; ++pi) {
                    const bool all = always[pi] != 0;
                    const std::uint64_t t = th[pi];
                    auto state = [&](std::int64_t i) {
                        return all || s.u[static_cast<std::size_t>(i)] < t;
                    };
                    ComponentFlags<decltype(state)> comp(r, state, Color::Open, s.uf);
                    bits[pi][static_cast<std::size_t>(rep)] =
                        comp.any_component_with(touch_left, touch_right) ? 1 : 0;
                }
            });

        const double ms = detail::elapsed_ms(start);
        for (std::size_t pi = 0; pi < np; ++pi) {
            std::int64_t k = 0;
            for (const std::uint8_t b : bits[pi]) k += b;
            const double phat = static_cast<double>(k) / static_cast<double>(R);
            const Interval ci = wilson_interval(k, R);
            EstimateRecord rec;
            rec.kind = spec.kind;
            rec.n = n;
            rec.p = spec.p_values[pi];
            rec.aspect = spec.aspect;
            rec.estimate = phat;
            rec.std_error = std::sqrt(phat * (1.0 - phat) / static_cast<double>(R));
            rec.ci_lo = ci.lo;
            rec.ci_hi = ci.hi;
            rec.replicas = R;
            rec.seed = spec.master_seed;
            rec.wall_ms = ms;
            out.records.push_back(std::move(rec));
            out.indicators.push_back(std::move(bits[pi]));
        }
    }
    return out;
}

}  // namespace detail

inline CrossingProbData estimate_crossing_probability_data(const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::CrossingProb,
                          "estimate_crossing_probability");
    return detail::crossing_probability_sweep(spec, "estimate_crossing_probability");
}

inline std::vector<EstimateRecord> estimate_crossing_probability(
    const ExperimentSpec& spec) {
    return estimate_crossing_probability_data(spec).records;
}

inline CrossingProbData rsw_aspect_check_data(const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::RswAspect, "rsw_aspect_check");
    CrossingProbData data = detail::crossing_probability_sweep(spec, "rsw_aspect_check");
    // Stamp each record with the minimum estimate across the n sweep at its p.
    const std::size_t np = spec.p_values.size();
    const std::size_t nn = spec.n_values.size();
    for (std::size_t pi = 0; pi < np; ++pi) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t ni = 0; ni < nn; ++ni)
            lo = std::min(lo, data.records[ni * np + pi].estimate);
        for (std::size_t ni = 0; ni < nn; ++ni)
            data.records[ni * np + pi].extras.emplace_back("min_over_n", lo);
    }
    return data;
}

inline std::vector<EstimateRecord> rsw_aspect_check(const ExperimentSpec& spec) {
    return rsw_aspect_check_data(spec).records;
}

// Conditional pivotal counts.  accepted_counts[k] holds, in replica order,
// the pivotal counts of the replicas that satisfied the crossing event for
// records[k]; the rejection rate is logged in the record's extras.
struct ConditionalPivotalData {
    std::vector<EstimateRecord> records;  // n-major, p-minor
    std::vector<std::vector<double>> accepted_counts;
};

inline ConditionalPivotalData estimate_conditional_pivotal_data(
    const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::ConditionalPivotal,
                          "estimate_conditional_pivotal");
    if (spec.p_values.empty())
        throw std::domain_error("estimate_conditional_pivotal: no p values");
    const std::size_t np = spec.p_values.size();
    const std::int64_t R = spec.replicas;

    std::vector<std::uint64_t> th(np);
    std::vector<char> always(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
        th[pi] = open_threshold(spec.p_values[pi]);
        always[pi] = spec.p_values[pi] >= 1.0;
    }

    struct PivScratch {
        std::vector<std::uint64_t> u;
        DisjointSets uf_open, uf_closed;
    };

    ConditionalPivotalData out;
    for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
        const int n = spec.n_values[ni];
        const auto start = std::chrono::steady_clock::now();
        const Region r = Region::square(n);
        const std::int64_t sites = r.site_count();

        std::vector<std::vector<std::int64_t>> counts(
            np, std::vector<std::int64_t>(static_cast<std::size_t>(R), 0));
        std::vector<std::vector<std::uint8_t>> crossed(
            np, std::vector<std::uint8_t>(static_cast<std::size_t>(R), 0));
        detail::for_each_replica<PivScratch>(
            R, spec.threads, [&](std::int64_t rep, PivScratch& s) {
                const std::uint64_t seed =
                    stream_seed(spec.master_seed, static_cast<std::uint64_t>(rep));
                s.u.resize(static_cast<std::size_t>(sites));
                for (std::int64_t i = 0; i < sites; ++i)
                    s.u[static_cast<std::size_t>(i)] =
                        site_uniform(seed, static_cast<std::uint64_t>(i));
                for (std::size_t pi = 0; pi < np; ++pi) {
                    const bool all = always[pi] != 0;
                    const std::uint64_t t = th[pi];
                    auto state = [&](std::int64_t i) {
                        return all || s.u[static_cast<std::size_t>(i)] < t;
                    };
                    const LrPivotalScan scan =
                        detail::lr_pivotal_scan(r, state, s.uf_open, s.uf_closed);
                    crossed[pi][static_cast<std::size_t>(rep)] = scan.lr ? 1 : 0;
                    counts[pi][static_cast<std::size_t>(rep)] = scan.n_pivotal;
                }
            });

        const double ms = detail::elapsed_ms(start);
        for (std::size_t pi = 0; pi < np; ++pi) {
            std::vector<double> accepted;
            accepted.reserve(static_cast<std::size_t>(R));
            std::int64_t joint_sum = 0;
            for (std::int64_t rep = 0; rep < R; ++rep) {
                if (!crossed[pi][static_cast<std::size_t>(rep)]) continue;
                const std::int64_t c = counts[pi][static_cast<std::size_t>(rep)];
                accepted.push_back(static_cast<double>(c));
                joint_sum += c;
            }
            if (accepted.empty())
                throw std::runtime_error(
                    "estimate_conditional_pivotal: no replica satisfied the "
                    "crossing event");
            const MeanSummary m = summarize_mean(accepted);
            const Interval ci = bootstrap_mean_ci(
                accepted, 2000,
                detail::resample_seed(spec.master_seed,
                                      ni * np + pi));
            EstimateRecord rec;
            rec.kind = spec.kind;
            rec.n = n;
            rec.p = spec.p_values[pi];
            rec.aspect = 1;
            rec.estimate = m.mean;
            rec.std_error = m.std_error;
            rec.ci_lo = ci.lo;
            rec.ci_hi = ci.hi;
            rec.replicas = R;
            rec.seed = spec.master_seed;
            rec.wall_ms = ms;
            rec.extras.emplace_back("acceptance_rate",
                                    static_cast<double>(accepted.size()) /
                                        static_cast<double>(R));
            rec.extras.emplace_back("accepted",
                                    static_cast<double>(accepted.size()));
            rec.extras.emplace_back("joint_mean",
                                    static_cast<double>(joint_sum) /
                                        static_cast<double>(R));
            detail::widen_to_contain(rec);
            out.records.push_back(std::move(rec));
            out.accepted_counts.push_back(std::move(accepted));
        }
    }
    return out;
}

inline std::vector<EstimateRecord> estimate_conditional_pivotal(
    const ExperimentSpec& spec) {
    return estimate_conditional_pivotal_data(spec).records;
}

// Radius-tail sweep shared by the one-arm and cluster-tail estimators: the
// event is that the origin's open cluster meets the boundary of [-n, n]^2.
// One BFS per (replica, p) finds the cluster's Chebyshev radius inside the
// largest box; the indicator for every smaller n reads off it, which also
// makes the estimates exactly nonincreasing in n.  indicators[] holds the
// unconditioned event bits even when the record conditions on an open origin.
struct RadiusTailData {
    std::vector<EstimateRecord> records;                 // n-major, p-minor
    std::vector<std::vector<std::uint8_t>> indicators;   // [record][replica]
};

namespace detail {

inline RadiusTailData radius_tail_sweep(const ExperimentSpec& spec, const char* op) {
    if (spec.p_values.empty()) throw std::domain_error(std::string(op) + ": no p values");
    const std::size_t np = spec.p_values.size();
    const std::size_t nn = spec.n_values.size();
    const std::int64_t R = spec.replicas;

    const int n_max = *std::max_element(spec.n_values.begin(), spec.n_values.end());
    const Region r = Region::centered_square(n_max);
    const int w = r.width();
    const std::int64_t sites = r.site_count();
    const std::int64_t origin = r.index(Site{0, 0});

    std::vector<std::uint64_t> th(np);
    std::vector<char> always(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
        th[pi] = open_threshold(spec.p_values[pi]);
        always[pi] = spec.p_values[pi] >= 1.0;
    }

    struct RadiusScratch {
        std::vector<std::uint32_t> seen;
        std::uint32_t epoch = 0;
        std::vector<std::int32_t> stack;
    };

    // radius[pi][rep]: Chebyshev radius of the origin cluster, -1 if closed.
    std::vector<std::vector<std::int16_t>> radius(
        np, std::vector<std::int16_t>(static_cast<std::size_t>(R), -1));

    const auto start = std::chrono::steady_clock::now();
    detail::for_each_replica<RadiusScratch>(
        R, spec.threads, [&](std::int64_t rep, RadiusScratch& s) {
            const std::uint64_t seed =
                stream_seed(spec.master_seed, static_cast<std::uint64_t>(rep));
            if (s.seen.size() != static_cast<std::size_t>(sites)) {
                s.seen.assign(static_cast<std::size_t>(sites), 0);
                s.epoch = 0;
            }
            for (std::size_t pi = 0; pi < np; ++pi) {
                ++s.epoch;
                const bool all = always[pi] != 0;
                const std::uint64_t t = th[pi];
                auto open_at = [&](std::int64_t i) {
                    return all || site_uniform(seed, static_cast<std::uint64_t>(i)) < t;
                };
                if (!open_at(origin)) continue;  // radius stays -1
                int rmax = 0;
                s.stack.clear();
                s.stack.push_back(static_cast<std::int32_t>(origin));
                s.seen[static_cast<std::size_t>(origin)] = s.epoch;
                while (!s.stack.empty() && rmax < n_max) {
                    const std::int32_t i = s.stack.back();
                    s.stack.pop_back();
                    const int x = r.x_min + static_cast<int>(i % w);
                    const int y = r.y_min + static_cast<int>(i / w);
                    for (const auto& d : neighbor_offsets) {
                        const int nx = x + d[0], ny = y + d[1];
                        if (nx < r.x_min || nx > r.x_max || ny < r.y_min ||
                            ny > r.y_max)
                            continue;
                        const std::int64_t j =
                            static_cast<std::int64_t>(ny - r.y_min) * w +
                            (nx - r.x_min);
                        if (s.seen[static_cast<std::size_t>(j)] == s.epoch) continue;
                        s.seen[static_cast<std::size_t>(j)] = s.epoch;
                        if (!open_at(j)) continue;
                        const int norm = std::max(nx < 0 ? -nx : nx,
                                                  ny < 0 ? -ny : ny);
                        if (norm > rmax) rmax = norm;
                        s.stack.push_back(static_cast<std::int32_t>(j));
                    }
                }
                radius[pi][static_cast<std::size_t>(rep)] =
                    static_cast<std::int16_t>(rmax);
            }
        });
    const double ms = detail::elapsed_ms(start);

    RadiusTailData out;
    for (std::size_t ni = 0; ni < nn; ++ni) {
        const int n = spec.n_values[ni];
        for (std::size_t pi = 0; pi < np; ++pi) {
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(R), 0);
            std::int64_t hits = 0, open_origin = 0;
            for (std::int64_t rep = 0; rep < R; ++rep) {
                const std::int16_t rad = radius[pi][static_cast<std::size_t>(rep)];
                if (rad >= 0) ++open_origin;
                if (rad >= n) {
                    bits[static_cast<std::size_t>(rep)] = 1;
                    ++hits;
                }
            }
            const std::int64_t denom =
                spec.condition_on_origin_open ? open_origin : R;
            if (denom == 0)
                throw std::runtime_error(std::string(op) +
                                         ": no replica had the origin open");
            const double phat =
                static_cast<double>(hits) / static_cast<double>(denom);
            const Interval ci = wilson_interval(hits, denom);
            EstimateRecord rec;
            rec.kind = spec.kind;
            rec.n = n;
            rec.p = spec.p_values[pi];
            rec.aspect = 1;
            rec.estimate = phat;
            rec.std_error =
                std::sqrt(phat * (1.0 - phat) / static_cast<double>(denom));
            rec.ci_lo = ci.lo;
            rec.ci_hi = ci.hi;
            rec.replicas = R;
            rec.seed = spec.master_seed;
            rec.wall_ms = ms;
            if (spec.condition_on_origin_open) {
                rec.extras.emplace_back("conditioned_on_origin_open", 1.0);
                rec.extras.emplace_back("origin_open",
                                        static_cast<double>(open_origin));
            }
            out.records.push_back(std::move(rec));
            out.indicators.push_back(std::move(bits));
        }
    }
    return out;
}

}  // namespace detail

inline RadiusTailData estimate_one_arm_data(const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::OneArm, "estimate_one_arm");
    return detail::radius_tail_sweep(spec, "estimate_one_arm");
}

inline std::vector<EstimateRecord> estimate_one_arm(const ExperimentSpec& spec) {
    return estimate_one_arm_data(spec).records;
}

inline RadiusTailData estimate_cluster_tail_data(const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::ClusterTail, "estimate_cluster_tail");
    return detail::radius_tail_sweep(spec, "estimate_cluster_tail");
}

inline std::vector<EstimateRecord> estimate_cluster_tail(const ExperimentSpec& spec) {
    return estimate_cluster_tail_data(spec).records;
}

// p_c location.  Per replica and per n, the bottleneck value
// T = min over LR paths of (max site uniform on the path) is computed once by
// a minimax Dijkstra; the crossing event at p is exactly [T < threshold(p)],
// so the whole grid curve is the empirical CDF of the T sample: monotone by
// construction and identical to direct evaluation under shared draws.  p*(n)
// interpolates the curve through 1/2 and its CI bootstraps the T sample.
struct PcLocateResult {
    std::vector<EstimateRecord> p_star;  // one per n
    std::vector<EstimateRecord> curve;   // grid estimates per (n, p)
};

inline PcLocateResult locate_pc(const ExperimentSpec& spec) {
    detail::validate_spec(spec, ExperimentKind::PcLocate, "locate_pc");
    if (spec.n_values.size() < 2)
        throw std::domain_error("locate_pc: need at least two n values");
    std::vector<double> grid = spec.p_values;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.size() < 2) throw std::domain_error("locate_pc: need a p grid");
    if (!(grid.front() <= 0.5 && grid.back() >= 0.5))
        throw std::domain_error("locate_pc: p grid must straddle 0.5");
    const std::size_t np = grid.size();
    const std::size_t nn = spec.n_values.size();
    const std::int64_t R = spec.replicas;
    constexpr int resamples = 2000;

    std::vector<std::uint64_t> th(np);
    std::vector<char> always(np);
    for (std::size_t j = 0; j < np; ++j) {
        th[j] = open_threshold(grid[j]);
        always[j] = grid[j] >= 1.0;
    }

    struct PcScratch {
        std::vector<std::uint64_t> u, dist;
        std::vector<std::uint8_t> done;
        std::priority_queue<std::pair<std::uint64_t, std::int32_t>,
                            std::vector<std::pair<std::uint64_t, std::int32_t>>,
                            std::greater<>>
            heap;
    };

    PcLocateResult out;
    std::vector<std::vector<double>> curves(nn, std::vector<double>(np, 0.0));
    for (std::size_t ni = 0; ni < nn; ++ni) {
        const int n = spec.n_values[ni];
        const auto start = std::chrono::steady_clock::now();
        const Region r = Region::square(n);
        const int w = r.width(), h = r.height();
        const std::int64_t sites = r.site_count();

        std::vector<std::uint64_t> bottleneck(static_cast<std::size_t>(R), 0);
        detail::for_each_replica<PcScratch>(
            R, spec.threads, [&](std::int64_t rep, PcScratch& s) {
                const std::uint64_t seed =
                    stream_seed(spec.master_seed, static_cast<std::uint64_t>(rep));
                s.u.resize(static_cast<std::size_t>(sites));
                for (std::int64_t i = 0; i < sites; ++i)
                    s.u[static_cast<std::size_t>(i)] =
                        site_uniform(seed, static_cast<std::uint64_t>(i));
                s.dist.assign(static_cast<std::size_t>(sites),
                              std::numeric_limits<std::uint64_t>::max());
                s.done.assign(static_cast<std::size_t>(sites), 0);
                s.heap = {};
                for (int y = 0; y < h; ++y) {
                    const std::int64_t i = static_cast<std::int64_t>(y) * w;
                    s.dist[static_cast<std::size_t>(i)] =
                        s.u[static_cast<std::size_t>(i)];
                    s.heap.emplace(s.u[static_cast<std::size_t>(i)],
                                   static_cast<std::int32_t>(i));
                }
                std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
                while (!s.heap.empty()) {
                    const auto [d, i] = s.heap.top();
                    s.heap.pop();
                    if (s.done[static_cast<std::size_t>(i)]) continue;
                    s.done[static_cast<std::size_t>(i)] = 1;
                    const int x = static_cast<int>(i % w);
                    if (x == w - 1) {
                        best = d;
                        break;
                    }
                    const int y = static_cast<int>(i / w);
                    for (const auto& dd : neighbor_offsets) {
                        const int nx = x + dd[0], ny = y + dd[1];
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::int64_t j = static_cast<std::int64_t>(ny) * w + nx;
                        if (s.done[static_cast<std::size_t>(j)]) continue;
                        const std::uint64_t nd =
                            std::max(d, s.u[static_cast<std::size_t>(j)]);
                        if (nd < s.dist[static_cast<std::size_t>(j)]) {
                            s.dist[static_cast<std::size_t>(j)] = nd;
                            s.heap.emplace(nd, static_cast<std::int32_t>(j));
                        }
                    }
                }
                if (best == std::numeric_limits<std::uint64_t>::max())
                    throw std::logic_error("locate_pc: no left-right route");
                bottleneck[static_cast<std::size_t>(rep)] = best;
            });

        // First grid index where the crossing event holds, per replica; the
        // predicate is monotone along the sorted grid.
        std::vector<std::int64_t> first_hit_count(np + 1, 0);
        for (std::int64_t rep = 0; rep < R; ++rep) {
            const std::uint64_t tval = bottleneck[static_cast<std::size_t>(rep)];
            std::size_t j = 0;
            while (j < np && !(always[j] != 0 || tval < th[j])) ++j;
            ++first_hit_count[j];
        }
        std::vector<std::int64_t> cnt(np, 0);
        std::int64_t acc = 0;
        for (std::size_t j = 0; j < np; ++j) {
            acc += first_hit_count[j];
            cnt[j] = acc;
        }

        const double ms = detail::elapsed_ms(start);
        for (std::size_t j = 0; j < np; ++j) {
            const double phat = static_cast<double>(cnt[j]) / static_cast<double>(R);
            curves[ni][j] = phat;
            const Interval ci = wilson_interval(cnt[j], R);
            EstimateRecord rec;
            rec.kind = ExperimentKind::CrossingProb;
            rec.n = n;
            rec.p = grid[j];
            rec.aspect = 1;
            rec.estimate = phat;
            rec.std_error = std::sqrt(phat * (1.0 - phat) / static_cast<double>(R));
            rec.ci_lo = ci.lo;
            rec.ci_hi = ci.hi;
            rec.replicas = R;
            rec.seed = spec.master_seed;
            rec.wall_ms = ms;
            out.curve.push_back(std::move(rec));
        }
        for (std::size_t j = 1; j < np; ++j)
            if (curves[ni][j] < curves[ni][j - 1])
                throw std::logic_error("locate_pc: curve lost monotonicity");

        auto cross_half = [&](const std::vector<double>& est) -> double {
            for (std::size_t j = 0; j < np; ++j) {
                if (est[j] == 0.5) return grid[j];
                if (j + 1 < np && est[j] < 0.5 && est[j + 1] > 0.5)
                    return grid[j] + (0.5 - est[j]) / (est[j + 1] - est[j]) *
                                         (grid[j + 1] - grid[j]);
            }
            return std::numeric_limits<double>::quiet_NaN();
        };
        const double p_star = cross_half(curves[ni]);
        if (std::isnan(p_star))
            throw std::runtime_error(
                "locate_pc: estimated curve does not cross 1/2 on the grid");

        // Bootstrap the bottleneck sample; each resample yields a full curve
        // (still monotone) and its own crossing point.
        std::vector<std::int32_t> first_hit(static_cast<std::size_t>(R), 0);
        for (std::int64_t rep = 0; rep < R; ++rep) {
            const std::uint64_t tval = bottleneck[static_cast<std::size_t>(rep)];
            std::size_t j = 0;
            while (j < np && !(always[j] != 0 || tval < th[j])) ++j;
            first_hit[static_cast<std::size_t>(rep)] = static_cast<std::int32_t>(j);
        }
        std::mt19937_64 gen(detail::resample_seed(spec.master_seed, 0x9C00 + ni));
        std::vector<double> stars;
        stars.reserve(resamples);
        std::vector<std::int64_t> hist(np + 1, 0);
        std::vector<double> est_b(np, 0.0);
        for (int b = 0; b < resamples; ++b) {
            std::fill(hist.begin(), hist.end(), 0);
            for (std::int64_t rep = 0; rep < R; ++rep)
                ++hist[static_cast<std::size_t>(
                    first_hit[gen() % static_cast<std::size_t>(R)])];
            std::int64_t a = 0;
            for (std::size_t j = 0; j < np; ++j) {
                a += hist[j];
                est_b[j] = static_cast<double>(a) / static_cast<double>(R);
            }
            const double s = cross_half(est_b);
            if (!std::isnan(s)) stars.push_back(s);
        }
        if (stars.size() < static_cast<std::size_t>(resamples) / 2)
            throw std::runtime_error(
                "locate_pc: bootstrap curves mostly fail to cross 1/2");
        double mean = 0.0;
        for (const double s : stars) mean += s;
        mean /= static_cast<double>(stars.size());
        double var = 0.0;
        for (const double s : stars) var += (s - mean) * (s - mean);
        var = stars.size() > 1 ? var / static_cast<double>(stars.size() - 1) : 0.0;
        const Interval ci = detail::percentile_95(stars);

        EstimateRecord rec;
        rec.kind = ExperimentKind::PcLocate;
        rec.n = n;
        rec.aspect = 1;
        rec.estimate = p_star;
        rec.std_error = std::sqrt(var);
        rec.ci_lo = ci.lo;
        rec.ci_hi = ci.hi;
        rec.replicas = R;
        rec.seed = spec.master_seed;
        rec.wall_ms = detail::elapsed_ms(start);
        rec.extras.emplace_back("grid_lo", grid.front());
        rec.extras.emplace_back("grid_hi", grid.back());
        rec.extras.emplace_back("grid_points", static_cast<double>(np));
        detail::widen_to_contain(rec);
        out.p_star.push_back(std::move(rec));
    }

    // Crossing points of successive-n curves, interpolated on the shared
    // grid; when several sign changes occur the one nearest 1/2 is reported.
    for (std::size_t ni = 0; ni + 1 < nn; ++ni) {
        const std::vector<double>& a = curves[ni];
        const std::vector<double>& b = curves[ni + 1];
        double best = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 0; j < np; ++j) {
            const double d0 = b[j] - a[j];
            double root = std::numeric_limits<double>::quiet_NaN();
            if (d0 == 0.0) {
                root = grid[j];
            } else if (j + 1 < np) {
                const double d1 = b[j + 1] - a[j + 1];
                if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0))
                    root = grid[j] + d0 / (d0 - d1) * (grid[j + 1] - grid[j]);
            }
            if (std::isnan(root)) continue;
            if (std::isnan(best) ||
                std::abs(root - 0.5) < std::abs(best - 0.5))
                best = root;
        }
        if (!std::isnan(best))
            out.p_star[ni].extras.emplace_back("curve_cross_next_n", best);
    }
    return out;
}

}  // namespace perc

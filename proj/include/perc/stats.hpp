#pragma once

// Interval and fitting helpers for the Monte Carlo layer.
//
// Proportions get Wilson intervals, means and fitted slopes get percentile
// bootstrap intervals.  Bootstrap resampling draws indices from a seeded
// mt19937_64 directly (modulo the sample size) instead of going through
// std::uniform_int_distribution, whose output is implementation-defined;
// reproducibility across standard libraries matters more here than the
// negligible modulo bias.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace perc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                                double z = 1.96) {
    if (trials <= 0) throw std::domain_error("wilson_interval: no trials");
    if (successes < 0 || successes > trials)
        throw std::domain_error("wilson_interval: successes out of range");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return Interval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct MeanSummary {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanSummary summarize_mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::domain_error("summarize_mean: empty sample");
    double sum = 0.0;
    for (const double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() == 1) return MeanSummary{mean, 0.0};
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return MeanSummary{mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

namespace detail {

// Type-7 quantile of a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::domain_error("quantile_sorted: empty sample");
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline Interval percentile_95(std::vector<double>& stats) {
    std::sort(stats.begin(), stats.end());
    return Interval{quantile_sorted(stats, 0.025), quantile_sorted(stats, 0.975)};
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("least_squares: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.r_squared = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0)
                                  : std::max(0.0, 1.0 - ss_res / ss_tot);
    return fit;
}

}  // namespace detail

inline Interval bootstrap_mean_ci(const std::vector<double>& xs, int resamples,
                                  std::uint64_t seed) {
    if (xs.empty()) throw std::domain_error("bootstrap_mean_ci: empty sample");
    if (resamples < 1) throw std::domain_error("bootstrap_mean_ci: no resamples");
    std::mt19937_64 gen(seed);
    const std::size_t m = xs.size();
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += xs[gen() % m];
        means.push_back(sum / static_cast<double>(m));
    }
    return detail::percentile_95(means);
}

enum class FitModel { PowerLaw, Exponential };

struct FitPoint {
    double x = 0.0;      // abscissa before the model transform (e.g. n)
    double value = 0.0;  // positive ordinate
    std::vector<double> replica_values;  // optional raw replicas behind `value`
};

struct FitResult {
    FitModel model = FitModel::PowerLaw;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    double r_squared = 1.0;
};

namespace detail {

inline FitResult fit_line_model(FitModel model, const std::vector<FitPoint>& points,
                                int resamples, std::uint64_t seed) {
    if (points.size() < 3) throw std::domain_error("fit: need at least three points");
    std::vector<double> xs, ys;
    for (const FitPoint& pt : points) {
        if (pt.value <= 0.0) throw std::domain_error("fit: nonpositive value");
        if (model == FitModel::PowerLaw && pt.x <= 0.0)
            throw std::domain_error("fit: nonpositive abscissa in a log-log fit");
        xs.push_back(model == FitModel::PowerLaw ? std::log(pt.x) : pt.x);
        ys.push_back(std::log(pt.value));
    }
    const LineFit base = least_squares(xs, ys);
    FitResult out;
    out.model = model;
    out.slope = base.slope;
    out.intercept = base.intercept;
    out.r_squared = base.r_squared;

    const bool replica_level = std::all_of(points.begin(), points.end(), [](const FitPoint& pt) {
        return !pt.replica_values.empty();
    });
    std::mt19937_64 gen(seed);
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> ys_b(ys.size());
    int degenerate = 0;
    for (int b = 0; b < resamples; ++b) {
        bool usable = true;
        if (replica_level) {
            for (std::size_t i = 0; i < points.size() && usable; ++i) {
                const auto& reps = points[i].replica_values;
                double sum = 0.0;
                for (std::size_t k = 0; k < reps.size(); ++k) sum += reps[gen() % reps.size()];
                const double mean = sum / static_cast<double>(reps.size());
                if (mean <= 0.0)
                    usable = false;  // resampled a proportion down to zero
                else
                    ys_b[i] = std::log(mean);
            }
        } else {
            // Residual bootstrap around the fitted line.
            for (std::size_t i = 0; i < ys.size(); ++i) {
                const std::size_t j = gen() % ys.size();
                const double res_j = ys[j] - (base.intercept + base.slope * xs[j]);
                ys_b[i] = base.intercept + base.slope * xs[i] + res_j;
            }
        }
        if (!usable) {
            ++degenerate;
            continue;
        }
        slopes.push_back(least_squares(xs, ys_b).slope);
    }
    if (slopes.size() < static_cast<std::size_t>(resamples) / 2)
        throw std::runtime_error("fit: bootstrap degenerated on zero-valued resamples");
    (void)degenerate;
    const Interval ci = percentile_95(slopes);
    out.slope_ci_lo = ci.lo;
    out.slope_ci_hi = ci.hi;
    return out;
}

}  // namespace detail

inline constexpr std::uint64_t default_bootstrap_seed = 0xB005'74A9'5EED'0001ULL;

inline FitResult fit_power_law(const std::vector<FitPoint>& points, int resamples = 2000,
                               std::uint64_t seed = default_bootstrap_seed) {
    return detail::fit_line_model(FitModel::PowerLaw, points, resamples, seed);
}

inline FitResult fit_exponential(const std::vector<FitPoint>& points, int resamples = 2000,
                                 std::uint64_t seed = default_bootstrap_seed) {
    return detail::fit_line_model(FitModel::Exponential, points, resamples, seed);
}

}  // namespace perc

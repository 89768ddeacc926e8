#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "bhi/error.hpp"
#include "bhi/series.hpp"

namespace bhi::stats {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error("stats", "mean of empty series");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Percentile by linear interpolation at the fractional rank h = (n-1)*p
/// over the sorted values. percentile(xs, 0) = min, percentile(xs, 1) = max.
inline double percentile(const Series& xs, double p) {
    if (xs.empty()) throw Error("stats", "percentile of empty series");
    if (p < 0.0 || p > 1.0) throw Error("stats", "percentile rank outside [0,1]");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Min-max normalization onto [0,1]. A constant series maps to all zeros so
/// an uninformative indicator carries zero variance into downstream weights.
inline std::vector<double> minmax_norm(const Series& xs) {
    if (xs.empty()) throw Error("stats", "minmax_norm of empty series");
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = range > 0.0 ? (xs[i] - lo) / range : 0.0;
    return out;
}

struct TrendFit {
    double slope_per_day = 0.0;
    double intercept = 0.0;
};

/// Least-squares line fit y = k*t + d over (t, y) pairs, solved from the
/// centered normal equations.
inline TrendFit ols_fit(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw Error("stats", "ols_fit length mismatch");
    if (t.size() < 2) throw Error("stats", "ols_fit needs at least 2 points");
    const double t_bar = mean(t);
    const double y_bar = mean(y);
    double s_tt = 0.0;
    double s_ty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double dt = t[i] - t_bar;
        s_tt += dt * dt;
        s_ty += dt * (y[i] - y_bar);
    }
    if (s_tt == 0.0) throw Error("stats", "ols_fit slope undefined: all t identical");
    const double k = s_ty / s_tt;
    return {k, y_bar - k * t_bar};
}

inline double pearson(const Series& xs, const Series& ys) {
    if (xs.size() != ys.size()) throw Error("stats", "pearson length mismatch");
    if (xs.size() < 2) throw Error("stats", "pearson needs at least 2 points");
    const double x_bar = mean(xs.values());
    const double y_bar = mean(ys.values());
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - x_bar;
        const double dy = ys[i] - y_bar;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("stats", "pearson undefined on constant series");
    return sxy / std::sqrt(sxx * syy);
}

/// Fractional (mid) ranks, 1-based; ties share the average of their positions.
inline std::vector<double> mid_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation: Pearson over mid-ranks.
inline double spearman(const Series& xs, const Series& ys) {
    if (xs.size() != ys.size()) throw Error("stats", "spearman length mismatch");
    if (xs.size() < 2) throw Error("stats", "spearman needs at least 2 points");
    return pearson(Series(mid_ranks(xs.values())), Series(mid_ranks(ys.values())));
}

/// Kendall's tau-b (tie-adjusted) over concordant/discordant pairs.
inline double kendall(const Series& xs, const Series& ys) {
    if (xs.size() != ys.size()) throw Error("stats", "kendall length mismatch");
    const std::size_t n = xs.size();
    if (n < 2) throw Error("stats", "kendall needs at least 2 points");
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_x = 0;
    std::int64_t ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom_x = static_cast<double>(concordant + discordant + ties_x);
    const double denom_y = static_cast<double>(concordant + discordant + ties_y);
    if (denom_x == 0.0 || denom_y == 0.0) throw Error("stats", "kendall undefined on constant series");
    return static_cast<double>(concordant - discordant) / std::sqrt(denom_x * denom_y);
}

enum class StdDevMode { population, sample };

inline double std_dev(const Series& xs, StdDevMode mode) {
    if (xs.empty()) throw Error("stats", "std_dev of empty series");
    if (mode == StdDevMode::sample && xs.size() < 2)
        throw Error("stats", "sample std_dev needs at least 2 points");
    const double x_bar = mean(xs.values());
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - x_bar;
        ss += d * d;
    }
    const double denom = mode == StdDevMode::population ? static_cast<double>(xs.size())
                                                        : static_cast<double>(xs.size() - 1);
    return std::sqrt(ss / denom);
}

}  // namespace bhi::stats

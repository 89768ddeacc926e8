#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bhi/dates.hpp"
#include "bhi/error.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"

namespace bhi {

inline constexpr double kStaticWeight = 0.8;
inline constexpr double kDynamicWeight = 0.2;
inline constexpr double kProjectionDays = 30.0;

/// Capability-weighted remaining headroom: 1 minus the theta-weighted mean
/// of the normalized scores. Scaling every theta by a common factor cancels,
/// so the result does not depend on participant volume.
inline double static_resistance(const Series& scores01, const Series& theta) {
    if (scores01.size() != theta.size()) throw Error("saturation", "static_resistance length mismatch");
    if (scores01.empty()) throw Error("saturation", "static_resistance of empty series");
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < scores01.size(); ++i) {
        weighted += scores01[i] * theta[i];
        total += theta[i];
    }
    if (total <= 0.0) throw Error("saturation", "no calibrated participants (sum of theta is zero)");
    return 1.0 - weighted / total;
}

struct DatedScore {
    Date eval_date;
    double score01 = 0.0;
};

struct DynamicProjection {
    double s_dyn = 0.0;
    double mean01 = 0.0;
    std::optional<double> slope_per_day;
    std::optional<double> intercept;
    bool fallback = false;  // negative slope, or fewer than 2 distinct dates
};

/// Near-future headroom: fit score = k*t + d over days since the earliest
/// evaluation and project 30 days ahead,
///     s_dyn = max(0, 1 - (mean + 30*k)).
/// A negative slope (or a degenerate time axis) falls back to s_sta.
inline DynamicProjection dynamic_projection(std::span<const DatedScore> points, double s_sta) {
    if (points.empty()) throw Error("saturation", "dynamic_projection of empty series");
    Date earliest = points.front().eval_date;
    for (const auto& p : points) earliest = std::min(earliest, p.eval_date);

    std::vector<double> t;
    std::vector<double> y;
    t.reserve(points.size());
    y.reserve(points.size());
    bool distinct_dates = false;
    for (const auto& p : points) {
        t.push_back(static_cast<double>(p.eval_date.days - earliest.days));
        y.push_back(p.score01);
        if (p.eval_date != earliest) distinct_dates = true;
    }

    DynamicProjection out;
    out.mean01 = stats::mean(y);
    if (!distinct_dates) {
        out.s_dyn = s_sta;
        out.fallback = true;
        return out;
    }
    const auto fit = stats::ols_fit(t, y);
    out.slope_per_day = fit.slope_per_day;
    out.intercept = fit.intercept;
    if (fit.slope_per_day < 0.0) {
        out.s_dyn = s_sta;
        out.fallback = true;
        return out;
    }
    out.s_dyn = std::max(0.0, 1.0 - (out.mean01 + kProjectionDays * fit.slope_per_day));
    return out;
}

/// Fixed fusion of the two saturation components; the dynamic projection
/// carries less weight because short-horizon extrapolation is noisy.
inline double anti_saturation(double s_sta, double s_dyn) {
    return kStaticWeight * s_sta + kDynamicWeight * s_dyn;
}

struct SaturationBreakdown {
    double s_sta = 0.0;
    double mean_score01 = 0.0;
    double s_dyn = 0.0;
    double s_as = 0.0;
    std::optional<double> slope_per_day;
    std::optional<double> intercept;
    bool dyn_fallback = false;
};

}  // namespace bhi

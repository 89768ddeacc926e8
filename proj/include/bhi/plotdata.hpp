#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "bhi/pipeline.hpp"
#include "bhi/robustness.hpp"

namespace bhi {

/// Ranking bar series: (label, value) pairs sorted descending by BHI.
inline nlohmann::ordered_json ranking_bar_series(const HealthReport& report, std::size_t top_k = 0) {
    nlohmann::ordered_json doc;
    doc["kind"] = "ranking_bar";
    doc["series"] = nlohmann::ordered_json::array();
    std::size_t emitted = 0;
    for (const auto& row : report.rows) {
        if (top_k != 0 && emitted >= top_k) break;
        doc["series"].push_back({{"label", row.benchmark_id}, {"value", row.bhi}});
        ++emitted;
    }
    return doc;
}

/// Per-benchmark score trajectories with the fitted line evaluated at each
/// point, plus the slope annotation.
inline nlohmann::ordered_json trend_lines_series(const HealthReport& report) {
    nlohmann::ordered_json doc;
    doc["kind"] = "trend_lines";
    doc["series"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json line;
        line["benchmark_id"] = row.benchmark_id;
        if (row.sat.slope_per_day.has_value()) line["slope_per_day"] = *row.sat.slope_per_day;
        line["dyn_fallback"] = row.sat.dyn_fallback;
        line["points"] = nlohmann::ordered_json::array();
        Date earliest = row.trend_points.empty() ? Date{} : row.trend_points.front().eval_date;
        for (const auto& p : row.trend_points) earliest = std::min(earliest, p.eval_date);
        for (const auto& p : row.trend_points) {
            nlohmann::ordered_json point;
            point["date"] = p.eval_date.to_string();
            point["score"] = p.score01;
            if (row.sat.slope_per_day.has_value() && row.sat.intercept.has_value()) {
                const double t = static_cast<double>(p.eval_date.days - earliest.days);
                point["fitted"] = *row.sat.slope_per_day * t + *row.sat.intercept;
            }
            line["points"].push_back(std::move(point));
        }
        doc["series"].push_back(std::move(line));
    }
    return doc;
}

/// Threshold sensitivity curve: (delta, spearman rho, discrimination weight).
inline nlohmann::ordered_json sensitivity_curve_series(const RobustnessSummary& sweep) {
    nlohmann::ordered_json doc;
    doc["kind"] = "sensitivity_curve";
    doc["series"] = nlohmann::ordered_json::array();
    for (const auto& d : sweep.deltas)
        doc["series"].push_back({{"delta_frac", d.delta_frac},
                                 {"spearman_rho", d.spearman_rho},
                                 {"s_disc_weight", d.s_disc_weight}});
    return doc;
}

}  // namespace bhi

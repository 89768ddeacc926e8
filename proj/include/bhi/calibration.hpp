#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bhi/error.hpp"
#include "bhi/types.hpp"

namespace bhi {

/// Battle outcome of one model on one benchmark. Equality after 4-decimal
/// rounding on the [0,100] scale counts as a tie.
struct BattleRow {
    std::string model_id;
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
    std::size_t opponents = 0;  // participants on the benchmark minus one
};

/// Pairwise battles among all models scoring on one benchmark; the view must
/// carry one entry per (model, benchmark).
inline std::vector<BattleRow> tally_battles(const ScoreMatrix& view, const std::string& benchmark_id) {
    const auto entries = view.entries_for(benchmark_id);
    std::vector<BattleRow> rows;
    rows.reserve(entries.size());
    std::vector<std::int64_t> keys;
    keys.reserve(entries.size());
    for (const auto& e : entries) {
        rows.push_back({e.model_id, 0, 0, 0, entries.size() - 1});
        keys.push_back(tie_key(e.score));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            if (keys[i] == keys[j]) {
                ++rows[i].ties;
                ++rows[j].ties;
            } else if (keys[i] > keys[j]) {
                ++rows[i].wins;
                ++rows[j].losses;
            } else {
                ++rows[j].wins;
                ++rows[i].losses;
            }
        }
    }
    return rows;
}

/// Average probability of defeating an opponent, pooled over the benchmarks
/// the model actually participates in: sum(win + 0.5*tie) / sum(opponents).
inline double lobo_win_rate(std::span<const BattleRow> rows_for_model) {
    double points = 0.0;
    std::size_t opponents = 0;
    for (const auto& row : rows_for_model) {
        points += static_cast<double>(row.wins) + 0.5 * static_cast<double>(row.ties);
        opponents += row.opponents;
    }
    if (opponents == 0) throw Error("calibration", "win rate undefined: no battles in pool");
    return points / static_cast<double>(opponents);
}

/// Fourth-root log-balance capability: damps the win rate of models with
/// sparse benchmark coverage.
///     theta = win_rate * (ln(1 + n_participated) / ln(1 + pool_size))^(1/4)
inline double capability(double win_rate, std::size_t n_participated, std::size_t pool_size) {
    if (pool_size == 0) throw Error("calibration", "capability undefined: empty benchmark pool");
    if (n_participated > pool_size) throw Error("calibration", "participation exceeds pool size");
    const double balance = std::log(1.0 + static_cast<double>(n_participated)) /
                           std::log(1.0 + static_cast<double>(pool_size));
    return win_rate * std::pow(balance, 0.25);
}

/// Capabilities calibrated for one held-out benchmark, computed strictly
/// from the other benchmarks.
struct CapabilityProfile {
    std::string held_out;
    std::map<std::string, double> theta;
    std::map<std::string, double> win_rate;
    std::map<std::string, std::size_t> participation;
    std::size_t pool_size = 0;  // |B| - 1
};

struct CalibrationOptions {
    /// A model scoring only on the held-out benchmark has no out-of-sample
    /// evidence. Default is to fail; enabling this assigns theta = 0 instead.
    bool zero_theta_when_uncovered = false;
};

/// Leave-one-benchmark-out calibration over the whole matrix. Tallies are
/// computed once per benchmark; each profile subtracts the held-out
/// benchmark's contribution.
inline std::map<std::string, CapabilityProfile> calibrate_all(const ScoreMatrix& view,
                                                              const CalibrationOptions& options = {}) {
    const auto& benchmarks = view.benchmark_ids();
    if (benchmarks.size() < 2) throw Error("calibration", "leave-one-out needs at least 2 benchmarks");

    struct Totals {
        double points = 0.0;
        std::size_t opponents = 0;
        std::size_t participated = 0;
    };
    std::map<std::string, Totals> totals;
    std::map<std::string, std::vector<BattleRow>> tallies;
    for (const auto& b : benchmarks) {
        auto rows = tally_battles(view, b);
        for (const auto& row : rows) {
            auto& t = totals[row.model_id];
            t.points += static_cast<double>(row.wins) + 0.5 * static_cast<double>(row.ties);
            t.opponents += row.opponents;
            t.participated += 1;
        }
        tallies.emplace(b, std::move(rows));
    }

    std::map<std::string, CapabilityProfile> profiles;
    for (const auto& b : benchmarks) {
        CapabilityProfile profile;
        profile.held_out = b;
        profile.pool_size = benchmarks.size() - 1;
        for (const auto& row : tallies.at(b)) {
            const Totals& t = totals.at(row.model_id);
            const double points = t.points - (static_cast<double>(row.wins) + 0.5 * static_cast<double>(row.ties));
            const std::size_t opponents = t.opponents - row.opponents;
            const std::size_t participated = t.participated - 1;
            if (participated == 0 || opponents == 0) {
                if (!options.zero_theta_when_uncovered)
                    throw Error("calibration", "model '" + row.model_id + "' has no data outside benchmark '" +
                                                   b + "'");
                profile.win_rate[row.model_id] = 0.0;
                profile.participation[row.model_id] = 0;
                profile.theta[row.model_id] = 0.0;
                continue;
            }
            const double w = points / static_cast<double>(opponents);
            profile.win_rate[row.model_id] = w;
            profile.participation[row.model_id] = participated;
            profile.theta[row.model_id] = capability(w, participated, profile.pool_size);
        }
        profiles.emplace(b, std::move(profile));
    }
    return profiles;
}

}  // namespace bhi

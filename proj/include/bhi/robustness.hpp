#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bhi/aggregate.hpp"
#include "bhi/error.hpp"
#include "bhi/pipeline.hpp"
#include "bhi/rng.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"

namespace bhi {

enum class Protocol { dropout, noise, loo, delta_sweep };

inline std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::dropout: return "dropout";
        case Protocol::noise: return "noise";
        case Protocol::loo: return "loo";
        case Protocol::delta_sweep: return "delta_sweep";
    }
    return "?";
}

/// Per-parameter aggregate of rank correlations against the unperturbed
/// baseline ranking, over the iterations that produced a valid audit.
struct SettingStats {
    double parameter = 0.0;
    double spearman_mean = 0.0;
    double spearman_std = 0.0;
    double kendall_mean = 0.0;
    double kendall_std = 0.0;
    std::size_t iterations_used = 0;
    std::size_t failures = 0;
    double clamp_rate_mean = 0.0;  // noise protocol only
};

struct LooScenario {
    std::string dropped_pillar;
    double consistency_rho = 0.0;
    std::size_t max_rank_shift = 0;
    std::vector<double> weights;  // re-derived over the remaining pillars
    bool degenerate_weights = false;  // remaining columns perfectly correlated
};

struct DeltaSetting {
    double delta_frac = 0.0;
    double spearman_rho = 0.0;
    double s_disc_weight = 0.0;
};

struct RobustnessSummary {
    Protocol protocol = Protocol::dropout;
    Weighting weighting_mode = Weighting::critic;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<SettingStats> settings;
    std::vector<LooScenario> scenarios;   // loo only
    std::vector<DeltaSetting> deltas;     // delta sweep only
};

namespace detail {

inline std::map<std::string, double> bhi_by_benchmark(const HealthReport& report) {
    std::map<std::string, double> out;
    for (const auto& row : report.rows) out.emplace(row.benchmark_id, row.bhi);
    return out;
}

/// Spearman/Kendall of a perturbed audit against the baseline, restricted to
/// the benchmarks surviving the perturbed run.
struct RankAgreement {
    double spearman = 0.0;
    double kendall = 0.0;
    std::size_t common = 0;
};

inline std::optional<RankAgreement> rank_agreement(const std::map<std::string, double>& baseline,
                                                   const std::map<std::string, double>& perturbed) {
    Series base;
    Series other;
    for (const auto& [id, value] : perturbed) {
        auto it = baseline.find(id);
        if (it == baseline.end()) continue;
        base.push_back(it->second);
        other.push_back(value);
    }
    if (base.size() < 2) return std::nullopt;
    RankAgreement out;
    out.common = base.size();
    out.spearman = stats::spearman(base, other);
    out.kendall = stats::kendall(base, other);
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

inline MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    if (xs.empty()) return out;
    out.mean = stats::mean(xs);
    if (xs.size() >= 2) out.std = stats::std_dev(Series(std::vector<double>(xs.begin(), xs.end())),
                                                 stats::StdDevMode::sample);
    return out;
}

}  // namespace detail

/// Bootstrap model dropout: per dropout ratio, remove ceil(eta * M) models
/// uniformly at random and re-execute the whole audit (participation filter,
/// calibration, pillars, weighting, ranking). Iterations where the audit
/// degenerates (fewer than 3 surviving benchmarks, or a pillar error) are
/// counted as failures and excluded from the statistics.
inline RobustnessSummary dropout_protocol(const AlignedInput& input, const AuditConfig& config,
                                          std::span<const double> etas, std::size_t iterations,
                                          std::uint64_t seed) {
    const HealthReport baseline = audit_aligned(input, config);
    const auto baseline_values = detail::bhi_by_benchmark(baseline);

    std::set<std::string> model_set;
    for (const auto& rec : input.records) model_set.insert(rec.model_id);
    const std::vector<std::string> models(model_set.begin(), model_set.end());

    RobustnessSummary summary;
    summary.protocol = Protocol::dropout;
    summary.weighting_mode = config.weighting;
    summary.seed = seed;
    summary.iterations = iterations;

    for (std::size_t p = 0; p < etas.size(); ++p) {
        const double eta = etas[p];
        if (eta < 0.0 || eta >= 1.0) throw Error("robustness", "dropout ratio must be in [0, 1)");
        const auto drop_count = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(models.size())));
        SettingStats stats_row;
        stats_row.parameter = eta;
        std::vector<double> rhos;
        std::vector<double> taus;
        for (std::size_t iter = 0; iter < iterations; ++iter) {
            Rng rng(derive_seed(seed, p, iter));
            const auto dropped = rng.sample_without_replacement(models.size(), drop_count);
            std::set<std::string> removed;
            for (std::size_t idx : dropped) removed.insert(models[idx]);

            AlignedInput reduced;
            reduced.benchmarks = input.benchmarks;
            reduced.models = input.models;
            reduced.snapshot = input.snapshot;
            reduced.as_of = input.as_of;
            for (const auto& rec : input.records)
                if (!removed.contains(rec.model_id)) reduced.records.push_back(rec);

            try {
                if (reduced.records.empty()) throw Error("robustness", "all records dropped");
                const HealthReport run = audit_aligned(reduced, config);
                if (run.rows.size() < 3) throw Error("robustness", "fewer than 3 surviving benchmarks");
                const auto agreement = detail::rank_agreement(baseline_values, detail::bhi_by_benchmark(run));
                if (!agreement.has_value()) throw Error("robustness", "no overlap with baseline ranking");
                rhos.push_back(agreement->spearman);
                taus.push_back(agreement->kendall);
            } catch (const Error&) {
                ++stats_row.failures;
            }
        }
        const auto rho_stats = detail::mean_std(rhos);
        const auto tau_stats = detail::mean_std(taus);
        stats_row.spearman_mean = rho_stats.mean;
        stats_row.spearman_std = rho_stats.std;
        stats_row.kendall_mean = tau_stats.mean;
        stats_row.kendall_std = tau_stats.std;
        stats_row.iterations_used = rhos.size();
        summary.settings.push_back(stats_row);
    }
    return summary;
}

/// Gaussian noise injection: scores are perturbed on the [0,1] scale with
/// i.i.d. N(0, sigma^2) draws, clamped back into [0,1], and the whole audit
/// is re-executed. The clamp rate per iteration is recorded.
inline RobustnessSummary noise_protocol(const AlignedInput& input, const AuditConfig& config,
                                        std::span<const double> sigmas, std::size_t iterations,
                                        std::uint64_t seed) {
    const HealthReport baseline = audit_aligned(input, config);
    const auto baseline_values = detail::bhi_by_benchmark(baseline);

    RobustnessSummary summary;
    summary.protocol = Protocol::noise;
    summary.weighting_mode = config.weighting;
    summary.seed = seed;
    summary.iterations = iterations;

    for (std::size_t p = 0; p < sigmas.size(); ++p) {
        const double sigma = sigmas[p];
        if (sigma < 0.0) throw Error("robustness", "noise sigma must be non-negative");
        SettingStats stats_row;
        stats_row.parameter = sigma;
        std::vector<double> rhos;
        std::vector<double> taus;
        std::vector<double> clamp_rates;
        for (std::size_t iter = 0; iter < iterations; ++iter) {
            Rng rng(derive_seed(seed, p + 0x100, iter));
            AlignedInput noised;
            noised.benchmarks = input.benchmarks;
            noised.models = input.models;
            noised.snapshot = input.snapshot;
            noised.as_of = input.as_of;
            noised.records = input.records;
            std::size_t clamped = 0;
            if (sigma > 0.0) {
                for (auto& rec : noised.records) {
                    const double value01 = rec.score / 100.0 + sigma * rng.normal();
                    const double bounded = std::clamp(value01, 0.0, 1.0);
                    if (bounded != value01) ++clamped;
                    rec.score = bounded * 100.0;
                }
            }
            try {
                const HealthReport run = audit_aligned(noised, config);
                const auto agreement = detail::rank_agreement(baseline_values, detail::bhi_by_benchmark(run));
                if (!agreement.has_value()) throw Error("robustness", "no overlap with baseline ranking");
                rhos.push_back(agreement->spearman);
                taus.push_back(agreement->kendall);
                clamp_rates.push_back(noised.records.empty()
                                          ? 0.0
                                          : static_cast<double>(clamped) /
                                                static_cast<double>(noised.records.size()));
            } catch (const Error&) {
                ++stats_row.failures;
            }
        }
        const auto rho_stats = detail::mean_std(rhos);
        const auto tau_stats = detail::mean_std(taus);
        stats_row.spearman_mean = rho_stats.mean;
        stats_row.spearman_std = rho_stats.std;
        stats_row.kendall_mean = tau_stats.mean;
        stats_row.kendall_std = tau_stats.std;
        stats_row.iterations_used = rhos.size();
        if (!clamp_rates.empty()) stats_row.clamp_rate_mean = detail::mean_std(clamp_rates).mean;
        summary.settings.push_back(stats_row);
    }
    return summary;
}

/// Pairwise correlation of the three pillar columns; any |r| at or above the
/// 0.30 redundancy threshold is worth flagging in the report.
inline std::array<std::array<double, 3>, 3> orthogonality_check(
    std::span<const std::array<double, 3>> pillars) {
    if (pillars.size() < 3) throw Error("robustness", "orthogonality check needs at least 3 benchmarks");
    std::array<std::array<double, 3>, 3> out{};
    std::vector<std::vector<double>> columns(3, std::vector<double>(pillars.size()));
    for (std::size_t i = 0; i < pillars.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) columns[j][i] = pillars[i][j];
    for (std::size_t j = 0; j < 3; ++j) {
        out[j][j] = 1.0;
        for (std::size_t k = j + 1; k < 3; ++k) {
            const double r = stats::pearson(Series(columns[j]), Series(columns[k]));
            out[j][k] = r;
            out[k][j] = r;
        }
    }
    return out;
}

/// Leave-one-pillar-out ablation over a pillar table: drop each pillar in
/// turn, re-derive the weights over the remaining two columns, and compare
/// the 2-pillar ranking with the 3-pillar baseline.
inline RobustnessSummary loo_from_pillars(std::span<const std::string> ids,
                                          std::span<const std::array<double, 3>> pillars,
                                          Weighting weighting) {
    std::array<double, 3> baseline_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    if (weighting == Weighting::critic) baseline_weights = critic_weights(pillars).weights;

    Series baseline_bhi;
    std::vector<std::pair<std::string, double>> baseline_keyed(pillars.size());
    for (std::size_t i = 0; i < pillars.size(); ++i) {
        const double value = baseline_weights[0] * pillars[i][0] + baseline_weights[1] * pillars[i][1] +
                             baseline_weights[2] * pillars[i][2];
        baseline_bhi.push_back(value);
        baseline_keyed[i] = {ids[i], value};
    }
    std::map<std::string, std::size_t> baseline_rank;
    for (const auto& item : rank_benchmarks(baseline_keyed)) baseline_rank[item.id] = item.rank;

    RobustnessSummary summary;
    summary.protocol = Protocol::loo;
    summary.weighting_mode = weighting;
    summary.iterations = 1;

    for (std::size_t dropped = 0; dropped < 3; ++dropped) {
        std::vector<std::size_t> kept;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != dropped) kept.push_back(j);

        std::vector<std::vector<double>> columns(2, std::vector<double>(pillars.size()));
        std::vector<std::string> names;
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < pillars.size(); ++i) columns[c][i] = pillars[i][kept[c]];
            names.emplace_back(kPillarNames[kept[c]]);
        }

        std::vector<double> weights(2, 0.5);
        bool degenerate = false;
        if (weighting == Weighting::critic) {
            try {
                weights = critic_weights_n(columns, names).weights;
            } catch (const Error&) {
                // Perfectly correlated (or constant) remaining columns leave
                // the conflict term at zero; any convex split ranks them
                // identically, so fall back to the equal split and flag it.
                degenerate = true;
            }
        }

        std::vector<std::pair<std::string, double>> keyed(pillars.size());
        Series reduced_bhi;
        for (std::size_t i = 0; i < pillars.size(); ++i) {
            const double value = weights[0] * columns[0][i] + weights[1] * columns[1][i];
            keyed[i] = {ids[i], value};
            reduced_bhi.push_back(value);
        }

        LooScenario scenario;
        scenario.dropped_pillar = kPillarNames[dropped];
        scenario.weights = weights;
        scenario.degenerate_weights = degenerate;
        scenario.consistency_rho = stats::spearman(baseline_bhi, reduced_bhi);
        for (const auto& item : rank_benchmarks(keyed)) {
            const std::size_t base = baseline_rank.at(item.id);
            const std::size_t shift = base > item.rank ? base - item.rank : item.rank - base;
            scenario.max_rank_shift = std::max(scenario.max_rank_shift, shift);
        }
        summary.scenarios.push_back(std::move(scenario));
    }
    return summary;
}

/// Leave-one-pillar-out ablation driven by a full audit of the inputs.
inline RobustnessSummary loo_ablation(const AlignedInput& input, const AuditConfig& config) {
    const HealthReport baseline = audit_aligned(input, config);
    std::vector<std::string> ids;
    std::vector<std::array<double, 3>> pillars;
    for (const auto& row : baseline.rows) {
        ids.push_back(row.benchmark_id);
        pillars.push_back({row.disc.s_disc, row.sat.s_as, row.imp.s_imp});
    }
    auto summary = loo_from_pillars(ids, pillars, config.weighting);
    summary.seed = config.seed;
    return summary;
}

inline constexpr std::array<double, 8> kDefaultDeltaSweep = {0.005, 0.01, 0.015, 0.02,
                                                             0.025, 0.03, 0.04, 0.05};

/// Threshold sensitivity sweep: the full audit (including weight derivation)
/// is recomputed per delta and the ranking is correlated against the default
/// 2% baseline. The baseline row reports rho = 1 by construction.
inline RobustnessSummary delta_sweep(const AlignedInput& input, const AuditConfig& config,
                                     std::span<const double> deltas = kDefaultDeltaSweep) {
    AuditConfig base_config = config;
    base_config.delta_frac = kDefaultDeltaFrac;
    const HealthReport baseline = audit_aligned(input, base_config);
    const auto baseline_values = detail::bhi_by_benchmark(baseline);

    RobustnessSummary summary;
    summary.protocol = Protocol::delta_sweep;
    summary.weighting_mode = config.weighting;
    summary.seed = config.seed;
    summary.iterations = 1;

    for (double delta : deltas) {
        AuditConfig swept = config;
        swept.delta_frac = delta;
        const HealthReport run = audit_aligned(input, swept);

        DeltaSetting setting;
        setting.delta_frac = delta;
        if (delta == kDefaultDeltaFrac) {
            setting.spearman_rho = 1.0;
        } else {
            const auto agreement = detail::rank_agreement(baseline_values, detail::bhi_by_benchmark(run));
            if (!agreement.has_value()) throw Error("robustness", "delta sweep lost the benchmark set");
            setting.spearman_rho = agreement->spearman;
        }
        setting.s_disc_weight = run.weights[0];
        summary.deltas.push_back(setting);
    }
    return summary;
}

inline nlohmann::ordered_json summary_to_json(const RobustnessSummary& summary) {
    nlohmann::ordered_json doc;
    doc["protocol"] = to_string(summary.protocol);
    doc["weighting"] = to_string(summary.weighting_mode);
    doc["seed"] = summary.seed;
    doc["iterations"] = summary.iterations;
    if (!summary.settings.empty()) {
        doc["settings"] = nlohmann::ordered_json::array();
        for (const auto& s : summary.settings) {
            nlohmann::ordered_json row;
            row["parameter"] = s.parameter;
            row["spearman_mean"] = s.spearman_mean;
            row["spearman_std"] = s.spearman_std;
            row["kendall_mean"] = s.kendall_mean;
            row["kendall_std"] = s.kendall_std;
            row["iterations_used"] = s.iterations_used;
            row["failures"] = s.failures;
            if (summary.protocol == Protocol::noise) row["clamp_rate_mean"] = s.clamp_rate_mean;
            doc["settings"].push_back(std::move(row));
        }
    }
    if (!summary.scenarios.empty()) {
        doc["scenarios"] = nlohmann::ordered_json::array();
        for (const auto& s : summary.scenarios) {
            nlohmann::ordered_json row{{"dropped_pillar", s.dropped_pillar},
                                       {"consistency_rho", s.consistency_rho},
                                       {"max_rank_shift", s.max_rank_shift},
                                       {"weights", s.weights}};
            if (s.degenerate_weights) row["degenerate_weights"] = true;
            doc["scenarios"].push_back(std::move(row));
        }
    }
    if (!summary.deltas.empty()) {
        doc["deltas"] = nlohmann::ordered_json::array();
        for (const auto& d : summary.deltas)
            doc["deltas"].push_back({{"delta_frac", d.delta_frac},
                                     {"spearman_rho", d.spearman_rho},
                                     {"s_disc_weight", d.s_disc_weight}});
    }
    return doc;
}

}  // namespace bhi

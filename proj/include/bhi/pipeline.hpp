#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bhi/aggregate.hpp"
#include "bhi/calibration.hpp"
#include "bhi/dates.hpp"
#include "bhi/discrimination.hpp"
#include "bhi/error.hpp"
#include "bhi/impact.hpp"
#include "bhi/ingest.hpp"
#include "bhi/saturation.hpp"
#include "bhi/types.hpp"

namespace bhi {

enum class Weighting { critic, equal };

inline std::string_view to_string(Weighting w) {
    return w == Weighting::critic ? "critic" : "equal";
}

inline Weighting parse_weighting(std::string_view text) {
    if (text == "critic") return Weighting::critic;
    if (text == "equal") return Weighting::equal;
    throw Error("config", "unknown weighting '" + std::string(text) + "'");
}

enum class OutputFormat { json, csv, markdown };

inline std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::json: return "json";
        case OutputFormat::csv: return "csv";
        case OutputFormat::markdown: return "markdown";
    }
    return "?";
}

inline OutputFormat parse_output_format(std::string_view text) {
    if (text == "json") return OutputFormat::json;
    if (text == "csv") return OutputFormat::csv;
    if (text == "markdown") return OutputFormat::markdown;
    throw Error("config", "unknown output format '" + std::string(text) + "'");
}

struct AuditConfig {
    double delta_frac = kDefaultDeltaFrac;
    Weighting weighting = Weighting::critic;
    std::optional<Date> as_of;  // default: latest eval date in the matrix
    std::uint64_t seed = 42;
    OutputFormat format = OutputFormat::json;
    bool zero_theta_when_uncovered = false;

    void validate() const {
        if (!(delta_frac > 0.0 && delta_frac <= 0.2))
            throw Error("config", "delta_frac must be in (0, 0.2]");
    }
};

/// Raw parsed inputs, before alignment.
struct AuditInput {
    std::vector<RawScoreRecord> records;
    BenchmarkRegistry benchmarks;
    ModelRegistry models;
    std::optional<SnapshotFile> snapshot;
};

/// Inputs after cost inversion, headroom normalization and snapshot
/// clustering, with the audit reference date resolved. The robustness
/// protocols perturb this stage and rerun everything downstream of it.
struct AlignedInput {
    std::vector<ScoreEntry> records;
    BenchmarkRegistry benchmarks;
    ModelRegistry models;
    std::optional<SnapshotFile> snapshot;
    Date as_of;
    std::vector<std::string> notes;
};

inline AlignedInput align_inputs(const AuditInput& input, const AuditConfig& config) {
    config.validate();
    auto records = invert_cost_metrics(input.records, input.benchmarks);

    // Headroom-normalize each open-ended benchmark over its own records.
    std::map<std::string, std::vector<RawScoreRecord>> open_ended;
    std::vector<RawScoreRecord> passthrough;
    for (auto& rec : records) {
        if (rec.metric_kind == MetricKind::open_ended)
            open_ended[rec.benchmark_id].push_back(std::move(rec));
        else
            passthrough.push_back(std::move(rec));
    }
    for (auto& [id, group] : open_ended) {
        auto normalized = headroom_normalize(std::move(group));
        passthrough.insert(passthrough.end(), std::make_move_iterator(normalized.begin()),
                           std::make_move_iterator(normalized.end()));
    }

    auto clustered = cluster_snapshots(std::move(passthrough), input.benchmarks);

    AlignedInput out;
    out.benchmarks = std::move(clustered.benchmarks);
    out.models = input.models;
    out.snapshot = input.snapshot;
    out.notes = std::move(clustered.notes);
    out.records.reserve(clustered.records.size());
    for (const auto& rec : clustered.records)
        out.records.push_back({rec.model_id, rec.benchmark_id, rec.score, rec.eval_date, rec.variant});

    if (out.records.empty()) throw Error("ingest", "no score records after alignment");
    if (config.as_of.has_value()) {
        out.as_of = *config.as_of;
    } else {
        out.as_of = out.records.front().eval_date;
        for (const auto& rec : out.records) out.as_of = std::max(out.as_of, rec.eval_date);
    }
    return out;
}

/// Everything the report needs for one benchmark.
struct BenchmarkHealth {
    std::string benchmark_id;
    DiscriminationBreakdown disc;
    SaturationBreakdown sat;
    ImpactBreakdown imp;
    double bhi = 0.0;
    double bhi_ew = 0.0;
    double bhi_on_normalized = 0.0;  // diagnostic: same weights over normalized pillar columns
    std::size_t rank = 0;
    bool tie = false;
    std::vector<DatedScore> trend_points;  // saturation-view series behind the fit
};

struct HealthReport {
    std::vector<BenchmarkHealth> rows;  // sorted by rank
    Weighting weighting_mode = Weighting::critic;
    std::array<double, 3> weights{};  // the weights behind `bhi`
    std::optional<CriticWeights> critic;
    double delta_frac = kDefaultDeltaFrac;
    Date as_of;
    std::uint64_t seed = 0;
    bool zero_theta_when_uncovered = false;
    std::vector<std::string> dropped_benchmarks;
    std::vector<std::string> warnings;
    std::array<std::array<double, 3>, 3> pillar_correlation{};  // raw pillar columns
};

/// The audit downstream of alignment: participation filter, variant views,
/// LOBO calibration, the three pillars, weighting, and ranking.
inline HealthReport audit_aligned(const AlignedInput& input, const AuditConfig& config) {
    config.validate();
    HealthReport report;
    report.weighting_mode = config.weighting;
    report.delta_frac = config.delta_frac;
    report.as_of = input.as_of;
    report.seed = config.seed;
    report.zero_theta_when_uncovered = config.zero_theta_when_uncovered;
    report.warnings = input.notes;

    auto filtered = apply_participation_filter(ScoreMatrix::build(input.records));
    report.dropped_benchmarks = std::move(filtered.dropped);
    const ScoreMatrix& matrix = filtered.matrix;
    const auto& benchmark_ids = matrix.benchmark_ids();

    const ScoreMatrix disc_view = select_variant(matrix, Axis::discrimination);
    const ScoreMatrix sat_view = select_variant(matrix, Axis::saturation);

    CalibrationOptions calibration_options;
    calibration_options.zero_theta_when_uncovered = config.zero_theta_when_uncovered;
    const auto profiles = calibrate_all(sat_view, calibration_options);

    // Discrimination pillar: per-benchmark indicators, then SDM fusion.
    Series edr_all;
    Series rcv_all;
    for (const auto& b : benchmark_ids) {
        Series scores;
        for (const auto& e : disc_view.entries_for(b)) scores.push_back(e.score);
        if (scores.size() < 2)
            throw Error("discrimination", "benchmark '" + b + "' has fewer than 2 base-variant scores");
        edr_all.push_back(edr(scores, config.delta_frac));
        rcv_all.push_back(rcv(scores));
    }
    const SdmFusion sdm = fuse_sdm(edr_all, rcv_all);

    // Anti-saturation pillar.
    std::vector<SaturationBreakdown> saturation(benchmark_ids.size());
    std::vector<std::vector<DatedScore>> trend_points(benchmark_ids.size());
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i) {
        const auto& b = benchmark_ids[i];
        const auto& profile = profiles.at(b);
        Series scores01;
        Series theta;
        std::vector<DatedScore> dated;
        for (const auto& e : sat_view.entries_for(b)) {
            scores01.push_back(e.score / 100.0);
            theta.push_back(profile.theta.at(e.model_id));
            dated.push_back({e.eval_date, e.score / 100.0});
        }
        auto& breakdown = saturation[i];
        breakdown.s_sta = static_resistance(scores01, theta);
        const auto projection = dynamic_projection(dated, breakdown.s_sta);
        breakdown.mean_score01 = projection.mean01;
        breakdown.s_dyn = projection.s_dyn;
        breakdown.slope_per_day = projection.slope_per_day;
        breakdown.intercept = projection.intercept;
        breakdown.dyn_fallback = projection.fallback;
        breakdown.s_as = anti_saturation(breakdown.s_sta, breakdown.s_dyn);
        trend_points[i] = std::move(dated);
    }

    // Impact pillar.
    if (!input.snapshot.has_value())
        throw Error("impact", "community snapshot required: pass --snapshot (see 'bhi fetch')");
    std::vector<ImpactBreakdown> impact(benchmark_ids.size());
    Series i_raw_all;
    std::vector<CommunitySignals> signals(benchmark_ids.size());
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i) {
        const auto& b = benchmark_ids[i];
        const BenchmarkMeta& meta = input.benchmarks.at(b);
        const auto& profile = profiles.at(b);

        std::size_t n_eligible = 0;
        for (const auto& model_id : matrix.model_ids())
            if (input.models.at(model_id).release_date >= meta.release_date) ++n_eligible;

        std::vector<AdoptionParticipant> participants;
        for (const auto& e : sat_view.entries_for(b)) {
            const ModelMeta& model = input.models.at(e.model_id);
            if (model.release_date < meta.release_date) continue;  // pre-release model: not adoption
            const double months = std::max(0.0, months_between(model.release_date, input.as_of));
            participants.push_back({profile.theta.at(e.model_id), months});
        }
        if (n_eligible == 0)
            throw Error("impact", "benchmark '" + b + "' has no eligible models (released after every model)");
        impact[i].n_eligible = n_eligible;
        impact[i].i_raw = industry_adoption_raw(participants, n_eligible);
        i_raw_all.push_back(impact[i].i_raw);

        const CommunitySnapshot* snap = input.snapshot->find(b);
        const double age_months = std::max(0.0, months_between(meta.release_date, input.as_of));
        if (snap != nullptr) {
            signals[i] = community_signals(*snap, age_months);
            impact[i].github_present = snap->github.has_value();
            impact[i].huggingface_present = snap->huggingface.has_value();
        } else {
            report.warnings.push_back("no community snapshot entry for '" + b + "'; both platforms absent");
        }
        if (!impact[i].github_present)
            report.warnings.push_back("benchmark '" + b + "': GitHub signal absent, normalized value 0");
        if (!impact[i].huggingface_present)
            report.warnings.push_back("benchmark '" + b + "': HuggingFace signal absent, normalized value 0");
    }
    const auto usage = usage_scores(i_raw_all);
    const auto community = community_scores(signals);
    const auto fusion = fuse_cv(Series(usage), Series([&] {
                                    std::vector<double> v(community.size());
                                    for (std::size_t i = 0; i < community.size(); ++i) v[i] = community[i].s_comm;
                                    return v;
                                }()));
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i) {
        impact[i].n_usage = usage[i];
        impact[i].s_comm = community[i].s_comm;
        impact[i].github_norm = community[i].github_norm;
        impact[i].huggingface_norm = community[i].huggingface_norm;
        impact[i].s_imp = fusion.s_imp[i];
    }

    // Aggregation.
    std::vector<std::array<double, 3>> pillars(benchmark_ids.size());
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i)
        pillars[i] = {sdm.s_disc[i], saturation[i].s_as, impact[i].s_imp};

    if (config.weighting == Weighting::critic) {
        report.critic = critic_weights(pillars);
        report.weights = report.critic->weights;
    } else {
        report.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    }
    const auto bhi_values = compose_bhi(pillars, report.weights);
    const auto bhi_ew = equal_weight_bhi(pillars);

    // Diagnostics: the same weights applied to min-max normalized pillar
    // columns, and the raw pillar correlation matrix.
    std::vector<double> bhi_normalized_diag(pillars.size());
    {
        std::vector<std::vector<double>> columns(3, std::vector<double>(pillars.size()));
        for (std::size_t i = 0; i < pillars.size(); ++i)
            for (std::size_t j = 0; j < 3; ++j) columns[j][i] = pillars[i][j];
        std::vector<std::vector<double>> normalized;
        for (const auto& col : columns) normalized.push_back(stats::minmax_norm(Series(col)));
        for (std::size_t i = 0; i < pillars.size(); ++i)
            bhi_normalized_diag[i] = report.weights[0] * normalized[0][i] +
                                     report.weights[1] * normalized[1][i] +
                                     report.weights[2] * normalized[2][i];
        for (std::size_t j = 0; j < 3; ++j) {
            report.pillar_correlation[j][j] = 1.0;
            for (std::size_t k = j + 1; k < 3; ++k) {
                const double r = stats::pearson(Series(columns[j]), Series(columns[k]));
                report.pillar_correlation[j][k] = r;
                report.pillar_correlation[k][j] = r;
            }
        }
    }

    std::vector<std::pair<std::string, double>> keyed(benchmark_ids.size());
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i) keyed[i] = {benchmark_ids[i], bhi_values[i]};
    const auto ranking = rank_benchmarks(keyed);

    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < benchmark_ids.size(); ++i) index_of[benchmark_ids[i]] = i;
    report.rows.reserve(ranking.size());
    for (const auto& item : ranking) {
        const std::size_t i = index_of.at(item.id);
        BenchmarkHealth row;
        row.benchmark_id = item.id;
        row.disc = {edr_all[i], rcv_all[i], sdm.edr_norm[i], sdm.rcv_norm[i],
                    sdm.w_edr,  sdm.w_rcv,  sdm.s_disc[i],  config.delta_frac};
        row.sat = saturation[i];
        row.imp = impact[i];
        row.bhi = item.value;
        row.bhi_ew = bhi_ew[i];
        row.bhi_on_normalized = bhi_normalized_diag[i];
        row.rank = item.rank;
        row.tie = item.tie;
        row.trend_points = std::move(trend_points[i]);
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline HealthReport run_audit(const AuditInput& input, const AuditConfig& config) {
    return audit_aligned(align_inputs(input, config), config);
}

/// Calibration profiles for audit-style inputs, exported for inspection.
inline std::map<std::string, CapabilityProfile> calibration_profiles(const AlignedInput& input,
                                                                     const AuditConfig& config) {
    auto filtered = apply_participation_filter(ScoreMatrix::build(input.records));
    CalibrationOptions options;
    options.zero_theta_when_uncovered = config.zero_theta_when_uncovered;
    return calibrate_all(select_variant(filtered.matrix, Axis::saturation), options);
}

}  // namespace bhi

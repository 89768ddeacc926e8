#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhi/dates.hpp"
#include "bhi/error.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"

namespace bhi {

/// Decay rates operate in months. 0.1155 halves a signal in 6 months,
/// 0.0231 in 30 months; the unit tests pin both identities.
inline constexpr double kUsageDecayPerMonth = 0.1155;
inline constexpr double kCommunityDecayPerMonth = 0.0231;

struct AdoptionParticipant {
    double theta = 0.0;
    double months_since_release = 0.0;
};

/// Capability-weighted, recency-decayed adoption mass over the eligible
/// model pool (models released on or after the benchmark):
///     i_raw = sum(theta_i * exp(-0.1155 * dt_i)) / n_eligible
inline double industry_adoption_raw(std::span<const AdoptionParticipant> participants, std::size_t n_eligible) {
    if (n_eligible == 0) throw Error("impact", "no eligible models (benchmark newer than every model)");
    double sum = 0.0;
    for (const auto& p : participants) {
        if (p.months_since_release < 0.0) throw Error("impact", "negative model age");
        sum += p.theta * std::exp(-kUsageDecayPerMonth * p.months_since_release);
    }
    return sum / static_cast<double>(n_eligible);
}

/// Usage scores across the benchmark set: sqrt compression then min-max
/// normalization.
inline std::vector<double> usage_scores(const Series& i_raw_all) {
    std::vector<double> compressed;
    compressed.reserve(i_raw_all.size());
    for (double v : i_raw_all) {
        if (v < 0.0) throw Error("impact", "negative adoption mass");
        compressed.push_back(std::sqrt(v));
    }
    return stats::minmax_norm(Series(std::move(compressed)));
}

struct GithubCounts {
    std::int64_t stars = 0;
    std::int64_t forks = 0;
};

struct HuggingFaceCounts {
    std::int64_t likes = 0;
    std::int64_t downloads = 0;
};

/// Hosting-platform engagement for one benchmark. A platform the benchmark
/// is not on stays absent; absence is not a zero count.
struct CommunitySnapshot {
    std::string benchmark_id;
    std::optional<GithubCounts> github;
    std::optional<HuggingFaceCounts> huggingface;
};

struct SnapshotFile {
    Date fetched_at;
    std::vector<CommunitySnapshot> entries;
    std::vector<std::string> notes;

    const CommunitySnapshot* find(const std::string& benchmark_id) const {
        for (const auto& e : entries)
            if (e.benchmark_id == benchmark_id) return &e;
        return nullptr;
    }
};

/// Age-decayed, log-compressed per-platform signals:
///     ln(1 + (stars + forks) * exp(-0.0231 * age_months))
/// and the HuggingFace analog over likes + downloads.
struct CommunitySignals {
    std::optional<double> github_log;
    std::optional<double> huggingface_log;
};

inline CommunitySignals community_signals(const CommunitySnapshot& snapshot, double age_months) {
    if (age_months < 0.0) throw Error("impact", "negative benchmark age");
    const double decay = std::exp(-kCommunityDecayPerMonth * age_months);
    CommunitySignals out;
    if (snapshot.github.has_value()) {
        if (snapshot.github->stars < 0 || snapshot.github->forks < 0)
            throw Error("impact", "negative GitHub counts for '" + snapshot.benchmark_id + "'");
        const double adjusted = static_cast<double>(snapshot.github->stars + snapshot.github->forks) * decay;
        out.github_log = std::log1p(adjusted);
    }
    if (snapshot.huggingface.has_value()) {
        if (snapshot.huggingface->likes < 0 || snapshot.huggingface->downloads < 0)
            throw Error("impact", "negative HuggingFace counts for '" + snapshot.benchmark_id + "'");
        const double adjusted =
            static_cast<double>(snapshot.huggingface->likes + snapshot.huggingface->downloads) * decay;
        out.huggingface_log = std::log1p(adjusted);
    }
    return out;
}

struct CommunityScore {
    double s_comm = 0.0;
    double github_norm = 0.0;
    double huggingface_norm = 0.0;
};

/// Community heat per benchmark: each platform's log signal is min-max
/// normalized over the benchmarks present on that platform, an absent
/// platform contributes 0, and the two normalized signals are averaged.
inline std::vector<CommunityScore> community_scores(std::span<const CommunitySignals> signals) {
    const auto normalize_platform = [&](auto member) {
        std::vector<double> present;
        for (const auto& s : signals)
            if ((s.*member).has_value()) present.push_back(*(s.*member));
        std::vector<double> normalized;
        if (!present.empty()) normalized = stats::minmax_norm(Series(std::move(present)));
        std::vector<double> out(signals.size(), 0.0);
        std::size_t next = 0;
        for (std::size_t i = 0; i < signals.size(); ++i)
            if ((signals[i].*member).has_value()) out[i] = normalized[next++];
        return out;
    };
    const auto gh = normalize_platform(&CommunitySignals::github_log);
    const auto hf = normalize_platform(&CommunitySignals::huggingface_log);
    std::vector<CommunityScore> out(signals.size());
    for (std::size_t i = 0; i < signals.size(); ++i) {
        out[i].github_norm = gh[i];
        out[i].huggingface_norm = hf[i];
        out[i].s_comm = (gh[i] + hf[i]) / 2.0;
    }
    return out;
}

struct CvFusion {
    std::vector<double> s_imp;
    double w_usage = 0.0;
    double w_comm = 0.0;
    double cv_usage = 0.0;
    double cv_comm = 0.0;
};

/// Coefficient-of-variation weighting of the two impact indicators. An
/// indicator with zero mean (an all-zero column) carries no information and
/// gets CV = 0; if both do, the pillar is undefined.
inline CvFusion fuse_cv(const Series& usage, const Series& community) {
    if (usage.size() != community.size()) throw Error("impact", "fuse_cv length mismatch");
    if (usage.size() < 2) throw Error("impact", "fuse_cv needs at least 2 benchmarks");
    const auto cv = [](const Series& xs) {
        const double mu = stats::mean(xs.values());
        if (mu <= 0.0) return 0.0;
        return stats::std_dev(xs, stats::StdDevMode::population) / mu;
    };
    CvFusion out;
    out.cv_usage = cv(usage);
    out.cv_comm = cv(community);
    const double total = out.cv_usage + out.cv_comm;
    if (total == 0.0) throw Error("impact", "no impact signal: both indicators have zero variation");
    out.w_usage = out.cv_usage / total;
    out.w_comm = out.cv_comm / total;
    out.s_imp.resize(usage.size());
    for (std::size_t i = 0; i < usage.size(); ++i)
        out.s_imp[i] = out.w_usage * usage[i] + out.w_comm * community[i];
    return out;
}

struct ImpactBreakdown {
    double i_raw = 0.0;
    double n_usage = 0.0;
    double s_comm = 0.0;
    double s_imp = 0.0;
    std::size_t n_eligible = 0;
    double github_norm = 0.0;
    double huggingface_norm = 0.0;
    bool github_present = false;
    bool huggingface_present = false;
};

inline SnapshotFile parse_snapshot_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("impact", "cannot open snapshot '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("impact", path + ": " + e.what());
    }
    SnapshotFile out;
    try {
        out.fetched_at = parse_date(doc.at("fetched_at").get<std::string>());
        for (const auto& obj : doc.at("benchmarks")) {
            CommunitySnapshot snap;
            snap.benchmark_id = obj.at("benchmark_id").get<std::string>();
            if (obj.contains("github")) {
                GithubCounts gh;
                gh.stars = obj.at("github").at("stars").get<std::int64_t>();
                gh.forks = obj.at("github").at("forks").get<std::int64_t>();
                snap.github = gh;
            }
            if (obj.contains("huggingface")) {
                HuggingFaceCounts hf;
                hf.likes = obj.at("huggingface").at("likes").get<std::int64_t>();
                hf.downloads = obj.at("huggingface").at("downloads").get<std::int64_t>();
                snap.huggingface = hf;
            }
            out.entries.push_back(std::move(snap));
        }
        if (doc.contains("notes"))
            for (const auto& n : doc.at("notes")) out.notes.push_back(n.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error("impact", path + ": " + e.what());
    }
    return out;
}

inline nlohmann::ordered_json snapshot_to_json(const SnapshotFile& snapshot) {
    nlohmann::ordered_json doc;
    doc["fetched_at"] = snapshot.fetched_at.to_string();
    if (!snapshot.notes.empty()) doc["notes"] = snapshot.notes;
    doc["benchmarks"] = nlohmann::ordered_json::array();
    for (const auto& e : snapshot.entries) {
        nlohmann::ordered_json obj;
        obj["benchmark_id"] = e.benchmark_id;
        if (e.github.has_value())
            obj["github"] = {{"stars", e.github->stars}, {"forks", e.github->forks}};
        if (e.huggingface.has_value())
            obj["huggingface"] = {{"likes", e.huggingface->likes}, {"downloads", e.huggingface->downloads}};
        doc["benchmarks"].push_back(std::move(obj));
    }
    return doc;
}

}  // namespace bhi

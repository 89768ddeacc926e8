#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bhi/error.hpp"
#include "bhi/types.hpp"

namespace bhi {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ingest", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_score(std::string_view text, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw Error("ingest", path + ":" + std::to_string(line_no) + ": invalid score '" + std::string(text) + "'");
    return value;
}

}  // namespace detail

/// Scores file: delimited text with the fixed header
///   model_id,benchmark_id,score_raw,metric_kind,eval_date,variant
/// Blank variant defaults to base. Errors name the offending line.
inline std::vector<RawScoreRecord> parse_scores_csv(const std::string& path) {
    const std::string text = detail::read_file(path);
    std::vector<RawScoreRecord> records;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool saw_header = false;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (detail::trim(line).empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto fields = detail::split_csv(line);
        if (!saw_header) {
            const std::vector<std::string_view> expected = {"model_id",    "benchmark_id", "score_raw",
                                                            "metric_kind", "eval_date",    "variant"};
            if (std::vector<std::string_view>(fields.begin(), fields.end()) != expected)
                throw Error("ingest", path + ":1: unexpected header");
            saw_header = true;
            continue;
        }
        if (fields.size() != 6)
            throw Error("ingest", path + ":" + std::to_string(line_no) + ": expected 6 fields, got " +
                                      std::to_string(fields.size()));
        RawScoreRecord rec;
        rec.model_id = std::string(fields[0]);
        rec.benchmark_id = std::string(fields[1]);
        if (rec.model_id.empty() || rec.benchmark_id.empty())
            throw Error("ingest", path + ":" + std::to_string(line_no) + ": empty id");
        rec.score = detail::parse_score(fields[2], path, line_no);
        try {
            rec.metric_kind = parse_metric_kind(fields[3]);
            rec.eval_date = parse_date(fields[4]);
            rec.variant = parse_variant(fields[5]);
        } catch (const Error& e) {
            throw Error("ingest", path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(rec));
    }
    if (!saw_header) throw Error("ingest", path + ": missing header row");
    return records;
}

inline BenchmarkRegistry parse_benchmarks_json(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("ingest", path + ": " + e.what());
    }
    if (!doc.is_array()) throw Error("ingest", path + ": expected a top-level array");
    BenchmarkRegistry registry;
    for (const auto& obj : doc) {
        try {
            BenchmarkMeta meta;
            meta.id = obj.at("id").get<std::string>();
            meta.release_date = parse_date(obj.at("release_date").get<std::string>());
            meta.domain = obj.value("domain", std::string{});
            if (obj.contains("family_id")) meta.family_id = obj.at("family_id").get<std::string>();
            if (obj.contains("github_repo")) meta.github_repo = obj.at("github_repo").get<std::string>();
            if (obj.contains("hf_dataset")) meta.hf_dataset = obj.at("hf_dataset").get<std::string>();
            if (obj.contains("cost_bound")) meta.cost_bound = obj.at("cost_bound").get<double>();
            if (meta.id.empty()) throw Error("ingest", "empty benchmark id");
            registry.add(std::move(meta));
        } catch (const nlohmann::json::exception& e) {
            throw Error("ingest", path + ": " + e.what());
        }
    }
    return registry;
}

inline ModelRegistry parse_models_json(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("ingest", path + ": " + e.what());
    }
    if (!doc.is_array()) throw Error("ingest", path + ": expected a top-level array");
    ModelRegistry registry;
    for (const auto& obj : doc) {
        try {
            ModelMeta meta;
            meta.id = obj.at("id").get<std::string>();
            meta.vendor = obj.value("vendor", std::string{});
            meta.release_date = parse_date(obj.at("release_date").get<std::string>());
            if (meta.id.empty()) throw Error("ingest", "empty model id");
            registry.add(std::move(meta));
        } catch (const nlohmann::json::exception& e) {
            throw Error("ingest", path + ": " + e.what());
        }
    }
    return registry;
}

struct ParsedInputs {
    std::vector<RawScoreRecord> records;
    BenchmarkRegistry benchmarks;
    ModelRegistry models;
    std::vector<std::string> warnings;
};

/// Parse the three input files and enforce referential integrity: every
/// record must cite a declared model and benchmark, and (model, benchmark,
/// variant) must be unique.
inline ParsedInputs parse_inputs(const std::string& scores_path, const std::string& benchmarks_path,
                                 const std::string& models_path) {
    ParsedInputs out;
    out.records = parse_scores_csv(scores_path);
    out.benchmarks = parse_benchmarks_json(benchmarks_path);
    out.models = parse_models_json(models_path);

    std::set<std::tuple<std::string, std::string, Variant>> seen;
    for (const auto& rec : out.records) {
        if (out.models.find(rec.model_id) == nullptr)
            throw Error("ingest", "score references undeclared model '" + rec.model_id + "'");
        const BenchmarkMeta* bench = out.benchmarks.find(rec.benchmark_id);
        if (bench == nullptr)
            throw Error("ingest", "score references undeclared benchmark '" + rec.benchmark_id + "'");
        if (!seen.emplace(rec.model_id, rec.benchmark_id, rec.variant).second)
            throw Error("ingest", "duplicate score for (" + rec.model_id + ", " + rec.benchmark_id + ", " +
                                      std::string(to_string(rec.variant)) + ")");
        if (rec.eval_date < bench->release_date)
            out.warnings.push_back("benchmark '" + rec.benchmark_id + "' evaluated before its release date by '" +
                                   rec.model_id + "'");
    }
    return out;
}

/// Cost-oriented metrics are reoriented as bound - score and re-tagged as
/// rewards; the bound comes from the benchmark's cost_bound config.
inline std::vector<RawScoreRecord> invert_cost_metrics(std::vector<RawScoreRecord> records,
                                                       const BenchmarkRegistry& benchmarks) {
    for (auto& rec : records) {
        if (rec.metric_kind != MetricKind::cost) continue;
        const BenchmarkMeta& meta = benchmarks.at(rec.benchmark_id);
        if (!meta.cost_bound.has_value())
            throw Error("ingest", "cost metric '" + rec.benchmark_id + "' has no configured cost_bound");
        rec.score = *meta.cost_bound - rec.score;
        rec.metric_kind = MetricKind::reward;
    }
    return records;
}

/// Open-ended metrics have no theoretical maximum; scale so the observed
/// best maps to 80 and a 20-point buffer remains:
///     score -> raw / (1.25 * max_observed) * 100
inline std::vector<RawScoreRecord> headroom_normalize(std::vector<RawScoreRecord> records) {
    if (records.empty()) return records;
    const std::string& benchmark_id = records.front().benchmark_id;
    double max_observed = 0.0;
    for (const auto& rec : records) {
        if (rec.benchmark_id != benchmark_id)
            throw Error("ingest", "headroom_normalize got mixed benchmarks");
        if (rec.metric_kind != MetricKind::open_ended)
            throw Error("ingest", "headroom_normalize expects open_ended records");
        max_observed = std::max(max_observed, rec.score);
    }
    if (max_observed <= 0.0)
        throw Error("ingest", "benchmark '" + benchmark_id + "' has no positive open-ended score");
    constexpr double kHeadroomBuffer = 1.25;
    for (auto& rec : records) {
        rec.score = rec.score / (kHeadroomBuffer * max_observed) * 100.0;
        rec.metric_kind = MetricKind::reward;
    }
    return records;
}

struct ClusterResult {
    std::vector<RawScoreRecord> records;
    BenchmarkRegistry benchmarks;  // family members replaced by their cluster
    std::vector<std::string> notes;
};

/// Merge time-bound snapshots of one benchmark family into a single cluster:
/// per (model, variant) the latest-dated snapshot score is kept, the cluster
/// inherits the earliest release date in the family, and same-dated snapshot
/// ties resolve to the lexicographically last snapshot id (flagged).
inline ClusterResult cluster_snapshots(std::vector<RawScoreRecord> records, const BenchmarkRegistry& benchmarks) {
    ClusterResult out;

    std::map<std::string, std::vector<const BenchmarkMeta*>> families;
    for (const auto& meta : benchmarks.items()) {
        if (meta.family_id.has_value())
            families[*meta.family_id].push_back(&meta);
        else
            out.benchmarks.add(meta);
    }
    for (const auto& [family_id, members] : families) {
        BenchmarkMeta cluster;
        cluster.id = family_id;
        cluster.release_date = members.front()->release_date;
        cluster.domain = members.front()->domain;
        for (const auto* m : members) cluster.release_date = std::min(cluster.release_date, m->release_date);
        // Platform identifiers come from the newest member, the most current
        // home of the family.
        const BenchmarkMeta* newest = members.front();
        for (const auto* m : members)
            if (m->release_date > newest->release_date) newest = m;
        cluster.github_repo = newest->github_repo;
        cluster.hf_dataset = newest->hf_dataset;
        cluster.cost_bound = newest->cost_bound;
        out.benchmarks.add(std::move(cluster));
    }

    // (family, model, variant) -> best record seen so far.
    std::map<std::tuple<std::string, std::string, Variant>, RawScoreRecord> merged;
    for (auto& rec : records) {
        const BenchmarkMeta& meta = benchmarks.at(rec.benchmark_id);
        if (!meta.family_id.has_value()) {
            out.records.push_back(std::move(rec));
            continue;
        }
        const auto key = std::make_tuple(*meta.family_id, rec.model_id, rec.variant);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(rec));
            continue;
        }
        RawScoreRecord& kept = it->second;
        if (rec.eval_date > kept.eval_date) {
            kept = std::move(rec);
        } else if (rec.eval_date == kept.eval_date && rec.benchmark_id != kept.benchmark_id) {
            out.notes.push_back("family '" + *meta.family_id + "': same-dated snapshots for model '" +
                                rec.model_id + "', kept lexicographically last snapshot");
            if (rec.benchmark_id > kept.benchmark_id) kept = std::move(rec);
        }
    }
    for (auto& [key, rec] : merged) {
        rec.benchmark_id = std::get<0>(key);
        out.records.push_back(std::move(rec));
    }
    return out;
}

struct ParticipationResult {
    ScoreMatrix matrix;
    std::vector<std::string> dropped;
};

/// Minimum participation threshold: benchmarks evaluated by fewer than three
/// models are excluded. Dropping a benchmark never removes a model from
/// another benchmark, so a single pass reaches the fixpoint.
inline ParticipationResult apply_participation_filter(const ScoreMatrix& matrix) {
    constexpr std::size_t kMinModels = 3;
    ParticipationResult out;
    std::vector<ScoreEntry> kept;
    for (const auto& id : matrix.benchmark_ids()) {
        if (matrix.model_count(id) >= kMinModels) {
            const auto span = matrix.entries_for(id);
            kept.insert(kept.end(), span.begin(), span.end());
        } else {
            out.dropped.push_back(id);
        }
    }
    if (kept.empty()) throw Error("ingest", "participation filter dropped every benchmark");
    out.matrix = ScoreMatrix::build(std::move(kept));
    return out;
}

}  // namespace bhi

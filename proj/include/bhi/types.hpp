#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "bhi/dates.hpp"
#include "bhi/error.hpp"

namespace bhi {

enum class MetricKind { reward, cost, open_ended };
enum class Variant { base, augmented };

inline std::string_view to_string(MetricKind k) {
    switch (k) {
        case MetricKind::reward: return "reward";
        case MetricKind::cost: return "cost";
        case MetricKind::open_ended: return "open_ended";
    }
    return "?";
}

inline std::string_view to_string(Variant v) {
    return v == Variant::base ? "base" : "augmented";
}

inline MetricKind parse_metric_kind(std::string_view text) {
    if (text == "reward") return MetricKind::reward;
    if (text == "cost") return MetricKind::cost;
    if (text == "open_ended") return MetricKind::open_ended;
    throw Error("ingest", "unknown metric_kind '" + std::string(text) + "'");
}

inline Variant parse_variant(std::string_view text) {
    if (text.empty() || text == "base") return Variant::base;
    if (text == "augmented") return Variant::augmented;
    throw Error("ingest", "unknown variant '" + std::string(text) + "'");
}

/// One parsed score row, before alignment.
struct RawScoreRecord {
    std::string model_id;
    std::string benchmark_id;
    double score = 0.0;
    MetricKind metric_kind = MetricKind::reward;
    Date eval_date;
    Variant variant = Variant::base;
};

struct BenchmarkMeta {
    std::string id;
    Date release_date;
    std::string domain;
    std::optional<std::string> family_id;
    std::optional<std::string> github_repo;
    std::optional<std::string> hf_dataset;
    std::optional<double> cost_bound;
};

struct ModelMeta {
    std::string id;
    std::string vendor;
    Date release_date;
};

template <typename Meta>
class Registry {
public:
    void add(Meta meta) {
        if (find(meta.id) != nullptr) throw Error("ingest", "duplicate id '" + meta.id + "'");
        items_.push_back(std::move(meta));
        std::sort(items_.begin(), items_.end(), [](const Meta& a, const Meta& b) { return a.id < b.id; });
    }

    const Meta* find(const std::string& id) const {
        auto it = std::lower_bound(items_.begin(), items_.end(), id,
                                   [](const Meta& m, const std::string& key) { return m.id < key; });
        return it != items_.end() && it->id == id ? &*it : nullptr;
    }

    const Meta& at(const std::string& id) const {
        const Meta* m = find(id);
        if (m == nullptr) throw Error("ingest", "unknown id '" + id + "'");
        return *m;
    }

    const std::vector<Meta>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }

private:
    std::vector<Meta> items_;  // sorted by id
};

using BenchmarkRegistry = Registry<BenchmarkMeta>;
using ModelRegistry = Registry<ModelMeta>;

/// One aligned score cell: orientation and scale fixed, clustering applied.
struct ScoreEntry {
    std::string model_id;
    std::string benchmark_id;
    double score = 0.0;  // [0, 100]
    Date eval_date;
    Variant variant = Variant::base;
};

/// Score equality for battle ties uses 4 decimal places on the [0,100] scale.
inline std::int64_t tie_key(double score) {
    return std::llround(score * 1e4);
}

/// Sparse model x benchmark table with deterministic entry order
/// (benchmark, model, variant).
class ScoreMatrix {
public:
    static ScoreMatrix build(std::vector<ScoreEntry> entries) {
        std::sort(entries.begin(), entries.end(), [](const ScoreEntry& a, const ScoreEntry& b) {
            return std::tie(a.benchmark_id, a.model_id, a.variant) <
                   std::tie(b.benchmark_id, b.model_id, b.variant);
        });
        for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
            const auto& a = entries[i];
            const auto& b = entries[i + 1];
            if (a.benchmark_id == b.benchmark_id && a.model_id == b.model_id && a.variant == b.variant)
                throw Error("ingest", "duplicate score for (" + a.model_id + ", " + a.benchmark_id +
                                          ", " + std::string(to_string(a.variant)) + ")");
        }
        for (const auto& e : entries) {
            if (e.score < 0.0 || e.score > 100.0)
                throw Error("ingest", "score outside [0,100] for (" + e.model_id + ", " + e.benchmark_id + ")");
        }
        ScoreMatrix m;
        m.entries_ = std::move(entries);
        m.rebuild_index();
        return m;
    }

    const std::vector<ScoreEntry>& entries() const { return entries_; }
    const std::vector<std::string>& benchmark_ids() const { return benchmark_ids_; }
    const std::vector<std::string>& model_ids() const { return model_ids_; }

    std::span<const ScoreEntry> entries_for(const std::string& benchmark_id) const {
        auto it = spans_.find(benchmark_id);
        if (it == spans_.end()) return {};
        return {entries_.data() + it->second.first, it->second.second - it->second.first};
    }

    std::size_t model_count(const std::string& benchmark_id) const {
        const auto span = entries_for(benchmark_id);
        std::size_t count = 0;
        const std::string* prev = nullptr;
        for (const auto& e : span) {
            if (prev == nullptr || *prev != e.model_id) ++count;
            prev = &e.model_id;
        }
        return count;
    }

private:
    void rebuild_index() {
        benchmark_ids_.clear();
        model_ids_.clear();
        spans_.clear();
        std::size_t begin = 0;
        for (std::size_t i = 0; i <= entries_.size(); ++i) {
            if (i == entries_.size() || (i > begin && entries_[i].benchmark_id != entries_[begin].benchmark_id)) {
                if (i > begin) {
                    spans_.emplace(entries_[begin].benchmark_id, std::make_pair(begin, i));
                    benchmark_ids_.push_back(entries_[begin].benchmark_id);
                }
                begin = i;
            }
        }
        for (const auto& e : entries_) model_ids_.push_back(e.model_id);
        std::sort(model_ids_.begin(), model_ids_.end());
        model_ids_.erase(std::unique(model_ids_.begin(), model_ids_.end()), model_ids_.end());
    }

    std::vector<ScoreEntry> entries_;
    std::vector<std::string> benchmark_ids_;  // sorted
    std::vector<std::string> model_ids_;      // sorted, distinct
    std::map<std::string, std::pair<std::size_t, std::size_t>> spans_;
};

enum class Axis { discrimination, saturation };

/// Bifurcated variant policy: the discrimination view keeps base-ability
/// entries only; the saturation view keeps, per (model, benchmark), the best
/// score across variants (base wins exact ties).
inline ScoreMatrix select_variant(const ScoreMatrix& matrix, Axis axis) {
    std::vector<ScoreEntry> out;
    if (axis == Axis::discrimination) {
        for (const auto& e : matrix.entries())
            if (e.variant == Variant::base) out.push_back(e);
        return ScoreMatrix::build(std::move(out));
    }
    // Entries arrive sorted (benchmark, model, variant) with base first, so a
    // strict-greater replacement keeps the base entry on equal scores.
    for (const auto& e : matrix.entries()) {
        if (!out.empty() && out.back().benchmark_id == e.benchmark_id && out.back().model_id == e.model_id) {
            if (e.score > out.back().score) out.back() = e;
        } else {
            out.push_back(e);
        }
    }
    for (auto& e : out) e.variant = Variant::base;
    return ScoreMatrix::build(std::move(out));
}

}  // namespace bhi

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bhi/error.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"

namespace bhi {

inline constexpr std::array<const char*, 3> kPillarNames = {"discrimination", "anti_saturation", "impact"};

/// CRITIC weighting over any number of dimensions: min-max normalize each
/// column, take the sample sigma as contrast intensity, the summed Pearson
/// complement as conflict, and weight by their product.
struct CriticColumns {
    std::vector<std::vector<double>> normalized;
    std::vector<double> sigma;
    std::vector<std::vector<double>> corr;
    std::vector<double> conflict;
    std::vector<double> info;
    std::vector<double> weights;
};

inline CriticColumns critic_weights_n(std::span<const std::vector<double>> columns,
                                      std::span<const std::string> names) {
    const std::size_t dims = columns.size();
    if (dims < 2) throw Error("aggregation", "critic weighting needs at least 2 dimensions");
    const std::size_t rows = columns.front().size();
    if (rows < 3) throw Error("aggregation", "critic weighting needs at least 3 benchmarks");

    CriticColumns out;
    out.normalized.reserve(dims);
    for (std::size_t j = 0; j < dims; ++j) {
        if (columns[j].size() != rows) throw Error("aggregation", "pillar column length mismatch");
        bool distinct = false;
        for (double v : columns[j])
            if (v != columns[j].front()) distinct = true;
        if (!distinct)
            throw Error("aggregation", "pillar '" + std::string(names[j]) + "' is constant; weights undefined");
        out.normalized.push_back(stats::minmax_norm(Series(columns[j])));
    }
    out.sigma.resize(dims);
    for (std::size_t j = 0; j < dims; ++j)
        out.sigma[j] = stats::std_dev(Series(out.normalized[j]), stats::StdDevMode::sample);

    out.corr.assign(dims, std::vector<double>(dims, 1.0));
    for (std::size_t j = 0; j < dims; ++j)
        for (std::size_t k = j + 1; k < dims; ++k) {
            const double r = stats::pearson(Series(out.normalized[j]), Series(out.normalized[k]));
            out.corr[j][k] = r;
            out.corr[k][j] = r;
        }

    out.conflict.resize(dims);
    out.info.resize(dims);
    double total_info = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
        double conflict = 0.0;
        for (std::size_t k = 0; k < dims; ++k) conflict += 1.0 - out.corr[j][k];
        out.conflict[j] = conflict;
        out.info[j] = out.sigma[j] * conflict;
        total_info += out.info[j];
    }
    if (total_info <= 0.0) throw Error("aggregation", "critic information volume is zero");
    out.weights.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) out.weights[j] = out.info[j] / total_info;
    return out;
}

/// Three-pillar CRITIC summary as reported in the audit output.
struct CriticWeights {
    std::array<double, 3> sigma{};
    std::array<std::array<double, 3>, 3> corr{};
    std::array<double, 3> conflict{};
    std::array<double, 3> info{};
    std::array<double, 3> weights{};
};

inline CriticWeights critic_weights(std::span<const std::array<double, 3>> pillars) {
    std::vector<std::vector<double>> columns(3, std::vector<double>(pillars.size()));
    for (std::size_t i = 0; i < pillars.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) columns[j][i] = pillars[i][j];
    std::vector<std::string> names(kPillarNames.begin(), kPillarNames.end());
    const auto cols = critic_weights_n(columns, names);
    CriticWeights out;
    for (std::size_t j = 0; j < 3; ++j) {
        out.sigma[j] = cols.sigma[j];
        out.conflict[j] = cols.conflict[j];
        out.info[j] = cols.info[j];
        out.weights[j] = cols.weights[j];
        for (std::size_t k = 0; k < 3; ++k) out.corr[j][k] = cols.corr[j][k];
    }
    return out;
}

/// Weighted sum over the raw pillar values. Normalized columns enter weight
/// derivation only; the published index composes the values as reported.
inline std::vector<double> compose_bhi(std::span<const std::array<double, 3>> pillars,
                                       const std::array<double, 3>& weights) {
    std::vector<double> out(pillars.size());
    for (std::size_t i = 0; i < pillars.size(); ++i)
        out[i] = weights[0] * pillars[i][0] + weights[1] * pillars[i][1] + weights[2] * pillars[i][2];
    return out;
}

inline std::vector<double> equal_weight_bhi(std::span<const std::array<double, 3>> pillars) {
    return compose_bhi(pillars, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

struct RankedItem {
    std::string id;
    double value = 0.0;
    std::size_t rank = 0;  // 1-based
    bool tie = false;
};

/// Descending ranking; exact value ties break lexicographically by id and
/// are flagged.
inline std::vector<RankedItem> rank_benchmarks(std::span<const std::pair<std::string, double>> values) {
    std::vector<RankedItem> out;
    out.reserve(values.size());
    for (const auto& [id, value] : values) out.push_back({id, value, 0, false});
    std::sort(out.begin(), out.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.id < b.id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = i + 1;
        if (i > 0 && out[i].value == out[i - 1].value) {
            out[i].tie = true;
            out[i - 1].tie = true;
        }
    }
    return out;
}

}  // namespace bhi

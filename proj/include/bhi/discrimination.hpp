#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "bhi/error.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"

namespace bhi {

inline constexpr double kDefaultDeltaFrac = 0.02;

/// Effective differentiation ratio: the fraction of model pairs whose score
/// gap strictly exceeds the adaptive noise threshold
///     delta = delta_frac * (max - min).
/// Counted over sorted scores with a monotone sweep; the predicate is the
/// same subtract-and-compare an explicit pair enumeration would evaluate, so
/// the two routes agree exactly.
inline double edr(const Series& scores, double delta_frac = kDefaultDeltaFrac) {
    const std::size_t n = scores.size();
    if (n < 2) throw Error("discrimination", "edr needs at least 2 scores");
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    const double delta = delta_frac * (sorted.back() - sorted.front());
    std::size_t differentiated = 0;
    std::size_t cross = 0;
    for (std::size_t j = 0; j < n; ++j) {
        while (cross < j && sorted[j] - sorted[cross] > delta) ++cross;
        differentiated += cross;
    }
    const auto total_pairs = static_cast<double>(n * (n - 1) / 2);
    return static_cast<double>(differentiated) / total_pairs;
}

/// Robust coefficient of variation: the middle-80% spread of the score
/// distribution over the fixed [0,100] scale, (P90 - P10) / 100.
inline double rcv(const Series& scores) {
    if (scores.empty()) throw Error("discrimination", "rcv of empty series");
    return (stats::percentile(scores, 0.9) - stats::percentile(scores, 0.1)) / 100.0;
}

struct SdmFusion {
    std::vector<double> s_disc;
    std::vector<double> edr_norm;
    std::vector<double> rcv_norm;
    double w_edr = 0.0;
    double w_rcv = 0.0;
};

/// Standard-deviation weighting of the two discrimination indicators:
/// min-max normalize each column across benchmarks, weight by the population
/// sigma of the normalized columns, and fuse per benchmark.
inline SdmFusion fuse_sdm(const Series& edr_all, const Series& rcv_all) {
    if (edr_all.size() != rcv_all.size()) throw Error("discrimination", "fuse_sdm length mismatch");
    if (edr_all.size() < 2) throw Error("discrimination", "fuse_sdm needs at least 2 benchmarks");
    SdmFusion out;
    out.edr_norm = stats::minmax_norm(edr_all);
    out.rcv_norm = stats::minmax_norm(rcv_all);
    const double sigma_edr = stats::std_dev(Series(out.edr_norm), stats::StdDevMode::population);
    const double sigma_rcv = stats::std_dev(Series(out.rcv_norm), stats::StdDevMode::population);
    const double total = sigma_edr + sigma_rcv;
    if (total == 0.0) throw Error("discrimination", "no discriminative signal: both indicators constant");
    out.w_edr = sigma_edr / total;
    out.w_rcv = sigma_rcv / total;
    out.s_disc.resize(edr_all.size());
    for (std::size_t i = 0; i < edr_all.size(); ++i)
        out.s_disc[i] = out.w_edr * out.edr_norm[i] + out.w_rcv * out.rcv_norm[i];
    return out;
}

/// Per-benchmark discrimination pillar detail.
struct DiscriminationBreakdown {
    double edr = 0.0;
    double rcv = 0.0;
    double edr_norm = 0.0;
    double rcv_norm = 0.0;
    double w_edr = 0.0;
    double w_rcv = 0.0;
    double s_disc = 0.0;
    double delta_frac = kDefaultDeltaFrac;
};

}  // namespace bhi

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bhi/robustness.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace bhi;

namespace {

AlignedInput aligned_mixed() {
    return align_inputs(synth::make_mixed(), AuditConfig{});
}

}  // namespace

TEST_CASE("zero dropout is the identity protocol") {
    const auto aligned = aligned_mixed();
    const std::vector<double> etas{0.0};
    const auto summary = dropout_protocol(aligned, AuditConfig{}, etas, 10, 42);
    REQUIRE(summary.settings.size() == 1);
    const auto& s = summary.settings[0];
    CHECK(s.spearman_mean == 1.0);
    CHECK(s.spearman_std == 0.0);
    CHECK(s.kendall_mean == 1.0);
    CHECK(s.kendall_std == 0.0);
    CHECK(s.failures == 0);
    CHECK(s.iterations_used == 10);
}

TEST_CASE("dropout summaries are byte-identical across runs with one seed") {
    const auto aligned = aligned_mixed();
    const std::vector<double> etas{0.0, 0.15, 0.3};
    const AuditConfig config;
    const auto a = summary_to_json(dropout_protocol(aligned, config, etas, 15, 42)).dump(2);
    const auto b = summary_to_json(dropout_protocol(aligned, config, etas, 15, 42)).dump(2);
    CHECK(a == b);

    const auto c = summary_to_json(dropout_protocol(aligned, config, etas, 15, 43)).dump(2);
    CHECK(a != c);
}

TEST_CASE("dropout accounts for degenerate iterations as failures") {
    // 3 models only: any nonzero dropout breaks the participation threshold.
    const auto input = synth::make_mixed(5, 3, 11);
    const auto aligned = align_inputs(input, AuditConfig{});
    const std::vector<double> etas{0.34};
    const auto summary = dropout_protocol(aligned, AuditConfig{}, etas, 8, 1);
    const auto& s = summary.settings[0];
    CHECK(s.failures == 8);
    CHECK(s.iterations_used == 0);
}

TEST_CASE("zero noise reproduces the baseline ranking exactly") {
    const auto aligned = aligned_mixed();
    const std::vector<double> sigmas{0.0};
    const auto summary = noise_protocol(aligned, AuditConfig{}, sigmas, 5, 42);
    CHECK(summary.settings[0].spearman_mean == 1.0);
    CHECK(summary.settings[0].spearman_std == 0.0);
    CHECK(summary.settings[0].clamp_rate_mean == 0.0);
}

TEST_CASE("noise degrades rank agreement monotonically on average") {
    const auto aligned = aligned_mixed();
    const std::vector<double> sigmas{0.01, 0.20};
    const auto summary = noise_protocol(aligned, AuditConfig{}, sigmas, 100, 42);
    REQUIRE(summary.settings.size() == 2);
    CHECK(summary.settings[0].spearman_mean >= summary.settings[1].spearman_mean);
    CHECK(summary.settings[0].failures == 0);
    CHECK(summary.settings[1].failures == 0);
    // Strong noise does clamp some scores.
    CHECK(summary.settings[1].clamp_rate_mean > 0.0);
}

TEST_CASE("noise summaries are deterministic per seed") {
    const auto aligned = aligned_mixed();
    const std::vector<double> sigmas{0.05};
    const auto a = summary_to_json(noise_protocol(aligned, AuditConfig{}, sigmas, 10, 7)).dump();
    const auto b = summary_to_json(noise_protocol(aligned, AuditConfig{}, sigmas, 10, 7)).dump();
    CHECK(a == b);
}

TEST_CASE("orthogonality check returns a unit-diagonal symmetric matrix") {
    const auto aligned = aligned_mixed();
    const auto report = audit_aligned(aligned, AuditConfig{});
    std::vector<std::array<double, 3>> pillars;
    for (const auto& row : report.rows)
        pillars.push_back({row.disc.s_disc, row.sat.s_as, row.imp.s_imp});
    const auto matrix = orthogonality_check(pillars);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(matrix[j][j] == 1.0);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(matrix[j][k] == matrix[k][j]);
            CHECK(std::fabs(matrix[j][k]) <= 1.0 + 1e-12);
        }
    }
    // The report embeds the same diagnostic.
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(report.pillar_correlation[j][k] == doctest::Approx(matrix[j][k]).epsilon(1e-12));
}

TEST_CASE("independent random pillars show near-zero correlation") {
    Rng rng(5150);
    std::vector<std::array<double, 3>> pillars(1000);
    for (auto& row : pillars)
        for (auto& v : row) v = rng.uniform01();
    const auto matrix = orthogonality_check(pillars);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = j + 1; k < 3; ++k) CHECK(std::fabs(matrix[j][k]) < 0.1);
}

TEST_CASE("dropping a duplicated pillar leaves the ranking unchanged") {
    Rng rng(61);
    std::vector<std::string> ids;
    std::vector<std::array<double, 3>> pillars;
    for (int i = 0; i < 12; ++i) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        ids.push_back("b" + std::to_string(i));
        pillars.push_back({x, x, y});  // first two pillars identical
    }
    const auto summary = loo_from_pillars(ids, pillars, Weighting::critic);
    REQUIRE(summary.scenarios.size() == 3);
    // Dropping either copy of the duplicated signal changes nothing.
    CHECK(summary.scenarios[0].consistency_rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(summary.scenarios[0].max_rank_shift == 0);
    CHECK(summary.scenarios[1].consistency_rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(summary.scenarios[1].max_rank_shift == 0);
    CHECK_FALSE(summary.scenarios[0].degenerate_weights);
    CHECK_FALSE(summary.scenarios[1].degenerate_weights);
    // Dropping the independent signal leaves two perfectly correlated
    // columns (flagged) and does move the ranking.
    CHECK(summary.scenarios[2].degenerate_weights);
    CHECK(summary.scenarios[2].consistency_rho < 1.0);
    CHECK(summary.scenarios[2].max_rank_shift > 0);
}

TEST_CASE("loo over the audit reports three scenarios with unit-sum weights") {
    const auto aligned = aligned_mixed();
    const auto summary = loo_ablation(aligned, AuditConfig{});
    REQUIRE(summary.scenarios.size() == 3);
    CHECK(summary.scenarios[0].dropped_pillar == "discrimination");
    CHECK(summary.scenarios[1].dropped_pillar == "anti_saturation");
    CHECK(summary.scenarios[2].dropped_pillar == "impact");
    for (const auto& scenario : summary.scenarios) {
        double sum = 0.0;
        for (double w : scenario.weights) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
        CHECK(scenario.consistency_rho >= -1.0);
        CHECK(scenario.consistency_rho <= 1.0);
    }
}

TEST_CASE("the delta sweep pins the baseline row at exactly 1") {
    const auto aligned = align_inputs(synth::make_well_separated(), AuditConfig{});
    const auto summary = delta_sweep(aligned, AuditConfig{});
    REQUIRE(summary.deltas.size() == 8);
    for (const auto& d : summary.deltas) {
        if (d.delta_frac == 0.02) CHECK(d.spearman_rho == 1.0);
        CHECK(d.s_disc_weight > 0.0);
        CHECK(d.s_disc_weight < 1.0);
    }
}

TEST_CASE("a well-separated dataset is stable across the whole sweep") {
    const auto aligned = align_inputs(synth::make_well_separated(), AuditConfig{});
    const auto summary = delta_sweep(aligned, AuditConfig{});
    for (const auto& d : summary.deltas) CHECK(d.spearman_rho >= 0.95);
}

TEST_CASE("the sweep's discrimination column matches an oracle recomputation") {
    const auto aligned = align_inputs(synth::make_well_separated(), AuditConfig{});

    // Reconstruct the discrimination-view score lists independently.
    auto filtered = apply_participation_filter(ScoreMatrix::build(aligned.records));
    const auto disc_view = select_variant(filtered.matrix, Axis::discrimination);

    for (const double delta : {0.005, 0.03}) {
        AuditConfig config;
        config.delta_frac = delta;
        const auto report = audit_aligned(aligned, config);

        std::vector<double> edr_col;
        std::vector<double> rcv_col;
        std::vector<double> s_as_col;
        std::vector<double> s_imp_col;
        for (const auto& b : filtered.matrix.benchmark_ids()) {
            std::vector<double> scores;
            for (const auto& e : disc_view.entries_for(b)) scores.push_back(e.score);
            edr_col.push_back(oracle::edr(scores, delta));
            for (const auto& row : report.rows) {
                if (row.benchmark_id != b) continue;
                rcv_col.push_back(row.disc.rcv);
                s_as_col.push_back(row.sat.s_as);
                s_imp_col.push_back(row.imp.s_imp);
            }
        }
        const auto disc = oracle::sdm(edr_col, rcv_col);
        const auto weights = oracle::critic({disc.fused, s_as_col, s_imp_col});

        CHECK(std::fabs(report.weights[0] - weights[0]) < 1e-9);
        std::size_t i = 0;
        for (const auto& b : filtered.matrix.benchmark_ids()) {
            for (const auto& row : report.rows)
                if (row.benchmark_id == b) CHECK(std::fabs(row.disc.s_disc - disc.fused[i]) < 1e-9);
            ++i;
        }
    }
}

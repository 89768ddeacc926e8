// Acceptance suite: every release criterion, one pass/fail line each.
// Exit code is the number of failed criteria.
//
// Needs BHI_CLI pointing at the bhi binary (ctest sets it).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhi/bhi.hpp"
#include "oracles.hpp"
#include "synth.hpp"
#include "tempfiles.hpp"

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

void table1_consistency() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
        std::ifstream in(std::string(BHI_FIXTURES_DIR) + "/table1/components.json");
        const auto doc = nlohmann::json::parse(in);
        const std::array<double, 3> weights{doc["weights"]["discrimination"].get<double>(),
                                            doc["weights"]["anti_saturation"].get<double>(),
                                            doc["weights"]["impact"].get<double>()};
        std::size_t rows = 0;
        double anchor_hle = 0.0;
        double anchor_swe = 0.0;
        for (const auto& row : doc["rows"]) {
            ++rows;
            const double s_sta = row["s_sta"].get<double>();
            const double s_dyn = row["s_dyn"].get<double>();
            const double s_as = row["s_as"].get<double>();
            if (std::fabs(bhi::anti_saturation(s_sta, s_dyn) - s_as) > 1e-3) ok = false;

            const double composed = weights[0] * row["s_disc"].get<double>() +
                                    weights[1] * s_as + weights[2] * row["s_imp"].get<double>();
            if (std::fabs(composed - row["bhi"].get<double>()) > 5e-4) ok = false;
            if (row["benchmark"] == "Humanity's Last Exam") anchor_hle = composed;
            if (row["benchmark"] == "SWE-Bench-Verified") anchor_swe = composed;
        }
        if (rows != 14) ok = false;
        if (std::fabs(anchor_hle - 0.6686) > 5e-4) ok = false;
        if (std::fabs(anchor_swe - 0.5775) > 5e-4) ok = false;
        const double elapsed = seconds_since(start);
        if (elapsed >= 1.0) ok = false;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "14 rows, s_as within 1e-3, bhi within 5e-4, %.3fs", elapsed);
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(1, "published component rows recompose within tolerance", ok, detail);
}

// ---------------------------------------------------------------- criterion 2

void half_life_identities() {
    const double usage = std::exp(-bhi::kUsageDecayPerMonth * 6.0);
    const double community = std::exp(-bhi::kCommunityDecayPerMonth * 30.0);
    const bool ok = std::fabs(usage - 0.5) < 1e-3 && std::fabs(community - 0.5) < 1e-3;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "exp(-0.1155*6)=%.6f, exp(-0.0231*30)=%.6f", usage, community);
    report(2, "both decay constants realize a one-half decay at their horizon", ok, buf);
}

// ---------------------------------------------------------------- criterion 3

void oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    bhi::Rng rng(777);

    for (int trial = 0; trial < 200 && ok; ++trial) {
        const std::size_t n = 3 + rng.below(6);
        std::vector<double> scores;
        for (std::size_t i = 0; i < n; ++i) scores.push_back(100.0 * rng.uniform01());
        if (trial % 4 == 0) scores[1] = scores[0];
        const double frac = 0.005 + 0.045 * rng.uniform01();
        if (bhi::edr(bhi::Series(scores), frac) != oracle::edr(scores, frac)) ok = false;
    }

    for (int trial = 0; trial < 50 && ok; ++trial) {
        const std::size_t m = 3 + rng.below(18);
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < m; ++i) {
            a.push_back(rng.uniform01());
            b.push_back(rng.uniform01());
        }
        const auto fused = bhi::fuse_sdm(bhi::Series(a), bhi::Series(b));
        const auto expected = oracle::sdm(a, b);
        for (std::size_t i = 0; i < m; ++i)
            if (std::fabs(fused.s_disc[i] - expected.fused[i]) > 1e-12) ok = false;
        if (std::fabs(fused.w_edr - expected.w_first) > 1e-12) ok = false;
    }

    for (int trial = 0; trial < 50 && ok; ++trial) {
        const std::size_t m = 4 + rng.below(16);
        std::vector<std::array<double, 3>> pillars(m);
        std::vector<std::vector<double>> columns(3, std::vector<double>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                pillars[i][j] = rng.uniform01();
                columns[j][i] = pillars[i][j];
            }
        const auto weights = bhi::critic_weights(pillars);
        const auto expected = oracle::critic(columns);
        for (std::size_t j = 0; j < 3; ++j)
            if (std::fabs(weights.weights[j] - expected[j]) > 1e-9) ok = false;
    }

    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "200 edr exact, 50 sdm at 1e-12, 50 critic at 1e-9, %.3fs", elapsed);
    report(3, "independent oracles agree with the fused implementations", ok, buf);
}

// ---------------------------------------------------------------- criterion 4

void critic_symmetry() {
    const std::vector<std::array<double, 3>> pillars{
        {0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}};
    bool ok = true;
    double worst = 0.0;
    try {
        const auto weights = bhi::critic_weights(pillars);
        for (double w : weights.weights) worst = std::max(worst, std::fabs(w - 1.0 / 3.0));
        ok = worst < 1e-9;
    } catch (const std::exception&) {
        ok = false;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max |w - 1/3| = %.2e", worst);
    report(4, "uncorrelated equal-sigma pillars weigh exactly a third each", ok, buf);
}

// ---------------------------------------------------------------- criterion 5

void lobo_independence() {
    bool ok = true;
    std::string detail = "held-out profile bit-identical under full perturbation";
    try {
        std::vector<bhi::ScoreEntry> cells;
        bhi::Rng rng(901);
        const auto date = bhi::Date::from_civil(2025, 7, 1);
        for (int b = 0; b < 5; ++b)
            for (int m = 0; m < 7; ++m)
                cells.push_back({"model-" + std::to_string(m), "bench-" + std::to_string(b),
                                 std::floor(99.0 * rng.uniform01()) + 0.5, date, bhi::Variant::base});
        const auto before = bhi::calibrate_all(bhi::ScoreMatrix::build(cells));

        auto perturbed = cells;
        for (auto& e : perturbed)
            if (e.benchmark_id == "bench-2") e.score = 100.0 - e.score;
        const auto after = bhi::calibrate_all(bhi::ScoreMatrix::build(perturbed));

        const auto& p = before.at("bench-2");
        const auto& q = after.at("bench-2");
        if (p.theta.size() != q.theta.size()) ok = false;
        for (const auto& [model, theta] : p.theta) {
            if (q.theta.at(model) != theta) ok = false;
            if (q.win_rate.at(model) != p.win_rate.at(model)) ok = false;
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(5, "leave-one-benchmark-out calibration ignores the held-out scores", ok, detail);
}

// ---------------------------------------------------------------- criterion 6

void theta_scale_invariance() {
    bool ok = true;
    double worst = 0.0;
    bhi::Rng rng(903);
    for (int trial = 0; trial < 25; ++trial) {
        bhi::Series scores;
        bhi::Series theta;
        const std::size_t n = 2 + rng.below(12);
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(rng.uniform01());
            theta.push_back(0.01 + rng.uniform01());
        }
        const double reference = bhi::static_resistance(scores, theta);
        for (const double c : {0.1, 3.0, 1000.0}) {
            bhi::Series scaled;
            for (double t : theta.values()) scaled.push_back(c * t);
            worst = std::max(worst, std::fabs(bhi::static_resistance(scores, scaled) - reference));
        }
    }
    ok = worst < 1e-12;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max deviation %.2e over c in {0.1, 3, 1000}", worst);
    report(6, "static resistance is invariant to capability rescaling", ok, buf);
}

// ---------------------------------------------------------------- criterion 7

void cli_determinism() {
    bool ok = true;
    std::string detail;
    const char* cli = std::getenv("BHI_CLI");
    if (cli == nullptr) {
        report(7, "seeded robustness runs are byte-identical", false, "BHI_CLI not set");
        return;
    }
    try {
        testutil::TempDir dir;
        const std::string f = std::string(BHI_FIXTURES_DIR) + "/synthetic";
        const std::string args = std::string(cli) + " robustness --scores " + f +
                                 "/scores.csv --benchmarks " + f + "/benchmarks.json --models " + f +
                                 "/models.json --snapshot " + f +
                                 "/snapshot.json --mode dropout --etas 0,0.15 --iters 20 --seed 42 --out ";
        const auto a = dir.file("a.json");
        const auto b = dir.file("b.json");
        if (std::system((args + a + " >/dev/null 2>&1").c_str()) != 0) ok = false;
        if (std::system((args + b + " >/dev/null 2>&1").c_str()) != 0) ok = false;
        const auto text_a = testutil::read_file(a);
        if (text_a.empty() || text_a != testutil::read_file(b)) ok = false;

        const auto doc = nlohmann::json::parse(text_a);
        const auto& eta0 = doc["summary"]["settings"][0];
        if (eta0["parameter"] != 0.0) ok = false;
        if (eta0["spearman_mean"] != 1.0 || eta0["spearman_std"] != 0.0) ok = false;
        if (eta0["kendall_mean"] != 1.0 || eta0["kendall_std"] != 0.0) ok = false;
        detail = "two seeded runs byte-identical; eta=0 row is the identity";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(7, "seeded robustness runs are byte-identical", ok, detail);
}

// ---------------------------------------------------------------- criterion 8

void delta_sweep_stability() {
    bool ok = true;
    double worst = 1.0;
    std::string detail;
    try {
        const auto aligned = bhi::align_inputs(synth::make_well_separated(), bhi::AuditConfig{});
        const std::vector<double> deltas{0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.04, 0.05};
        const auto summary = bhi::delta_sweep(aligned, bhi::AuditConfig{}, deltas);
        for (const auto& d : summary.deltas) worst = std::min(worst, d.spearman_rho);
        ok = worst >= 0.95;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "min rho over the sweep = %.4f", worst);
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(8, "a well-separated dataset holds rank under every threshold", ok, detail);
}

// ---------------------------------------------------------------- criterion 9

void rank_kernels() {
    bool ok = true;
    const double rho = bhi::stats::spearman(bhi::Series{1, 2, 3}, bhi::Series{1, 3, 2});
    const double tau = bhi::stats::kendall(bhi::Series{1, 2, 3}, bhi::Series{1, 3, 2});
    if (std::fabs(rho - 0.5) > 1e-12) ok = false;
    if (std::fabs(tau - 1.0 / 3.0) > 1e-12) ok = false;

    for (std::size_t n = 2; n <= 6 && ok; ++n) {
        std::vector<double> perm(n);
        std::iota(perm.begin(), perm.end(), 1.0);
        do {
            std::vector<double> reversed(n);
            for (std::size_t i = 0; i < n; ++i) reversed[i] = static_cast<double>(n + 1) - perm[i];
            if (bhi::stats::spearman(bhi::Series(perm), bhi::Series(reversed)) != -1.0) ok = false;
            if (bhi::stats::kendall(bhi::Series(perm), bhi::Series(reversed)) != -1.0) ok = false;
        } while (ok && std::next_permutation(perm.begin(), perm.end()));
    }
    report(9, "rank kernels match closed forms and reversal exhaustively to n=6", ok,
           "rho([1,2,3],[1,3,2])=0.5, tau=1/3, reversals exact");
}

// --------------------------------------------------------------- criterion 10

void performance_envelope() {
    bool ok = true;
    std::string detail;
    try {
        const auto input = synth::make_large(106, 91);
        const bhi::AuditConfig config;

        auto start = std::chrono::steady_clock::now();
        const auto aligned = bhi::align_inputs(input, config);
        const auto report_full = bhi::audit_aligned(aligned, config);
        const double audit_seconds = seconds_since(start);
        if (report_full.rows.size() < 100) ok = false;
        if (audit_seconds >= 5.0) ok = false;

        start = std::chrono::steady_clock::now();
        const std::vector<double> etas{0.05, 0.10, 0.15, 0.20, 0.40, 0.55};
        const auto summary = bhi::dropout_protocol(aligned, config, etas, 100, 42);
        const double dropout_seconds = seconds_since(start);
        if (summary.settings.size() != 6) ok = false;
        if (dropout_seconds >= 60.0) ok = false;

        char buf[96];
        std::snprintf(buf, sizeof(buf), "audit %.2fs (<5s), 600 dropout audits %.2fs (<60s)",
                      audit_seconds, dropout_seconds);
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(10, "full-scale audit and dropout protocol fit the time budget", ok, detail);
}

}  // namespace

int main() {
    table1_consistency();
    half_life_identities();
    oracle_equivalence();
    critic_symmetry();
    lobo_independence();
    theta_scale_invariance();
    cli_determinism();
    delta_sweep_stability();
    rank_kernels();
    performance_envelope();

    std::cout << (failures == 0 ? "acceptance: all criteria passed\n"
                                : "acceptance: " + std::to_string(failures) + " criteria failed\n");
    return failures;
}

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhi/error.hpp"
#include "bhi/pipeline.hpp"
#include "bhi/version.hpp"

namespace bhi {

/// FNV-1a 64-bit content hash, used to stamp input provenance into reports.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

struct InputDigest {
    std::string label;
    std::string path;
    std::string fnv1a64_hex;
};

inline InputDigest digest_file(const std::string& label, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("report", "cannot open '" + path + "' for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return {label, path, hex};
}

namespace detail {

/// Shortest round-trip decimal rendering (shared with the JSON encoder) so
/// CSV and JSON carry numerically identical values.
inline std::string full_precision(double v) {
    return nlohmann::json(v).dump();
}

inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const HealthReport& report,
                                             const std::vector<InputDigest>& inputs = {}) {
    nlohmann::ordered_json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["config"] = {
        {"weighting", to_string(report.weighting_mode)},
        {"delta_frac", report.delta_frac},
        {"as_of", report.as_of.to_string()},
        {"seed", report.seed},
        {"theta_zero_uncovered", report.zero_theta_when_uncovered},
    };
    doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& d : inputs)
        doc["inputs"].push_back({{"label", d.label}, {"path", d.path}, {"fnv1a64", d.fnv1a64_hex}});

    doc["weights"] = {{"discrimination", report.weights[0]},
                      {"anti_saturation", report.weights[1]},
                      {"impact", report.weights[2]}};
    if (report.critic.has_value()) {
        const auto& c = *report.critic;
        doc["critic"] = {{"sigma", c.sigma},
                         {"correlation", c.corr},
                         {"conflict", c.conflict},
                         {"information", c.info},
                         {"weights", c.weights}};
    }

    doc["benchmarks"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["rank"] = row.rank;
        r["benchmark_id"] = row.benchmark_id;
        r["bhi"] = row.bhi;
        r["bhi_equal_weight"] = row.bhi_ew;
        if (row.tie) r["tie"] = true;
        r["discrimination"] = {{"s_disc", row.disc.s_disc}, {"edr", row.disc.edr},
                               {"rcv", row.disc.rcv},       {"edr_norm", row.disc.edr_norm},
                               {"rcv_norm", row.disc.rcv_norm}, {"w_edr", row.disc.w_edr},
                               {"w_rcv", row.disc.w_rcv},   {"delta_frac", row.disc.delta_frac}};
        nlohmann::ordered_json sat = {{"s_as", row.sat.s_as},
                                      {"s_sta", row.sat.s_sta},
                                      {"s_dyn", row.sat.s_dyn},
                                      {"mean_score", row.sat.mean_score01},
                                      {"dyn_fallback", row.sat.dyn_fallback}};
        if (row.sat.slope_per_day.has_value()) sat["slope_per_day"] = *row.sat.slope_per_day;
        if (row.sat.intercept.has_value()) sat["intercept"] = *row.sat.intercept;
        r["anti_saturation"] = std::move(sat);
        r["impact"] = {{"s_imp", row.imp.s_imp},
                       {"n_usage", row.imp.n_usage},
                       {"s_comm", row.imp.s_comm},
                       {"i_raw", row.imp.i_raw},
                       {"n_eligible", row.imp.n_eligible},
                       {"github_norm", row.imp.github_norm},
                       {"huggingface_norm", row.imp.huggingface_norm},
                       {"github_present", row.imp.github_present},
                       {"huggingface_present", row.imp.huggingface_present}};
        doc["benchmarks"].push_back(std::move(r));
    }

    if (!report.dropped_benchmarks.empty()) doc["dropped_benchmarks"] = report.dropped_benchmarks;
    if (!report.warnings.empty()) doc["warnings"] = report.warnings;

    nlohmann::ordered_json diag;
    diag["pillar_correlation"] = report.pillar_correlation;
    diag["bhi_on_normalized_pillars"] = nlohmann::ordered_json::object();
    for (const auto& row : report.rows)
        diag["bhi_on_normalized_pillars"][row.benchmark_id] = row.bhi_on_normalized;
    doc["diagnostics"] = std::move(diag);
    return doc;
}

inline std::string render_json(const HealthReport& report, const std::vector<InputDigest>& inputs = {}) {
    return report_to_json(report, inputs).dump(2) + "\n";
}

namespace detail {

inline std::string provenance_lines(const HealthReport& report, const std::vector<InputDigest>& inputs,
                                    const char* prefix) {
    std::ostringstream out;
    out << prefix << kToolName << " " << kToolVersion << " | weighting=" << to_string(report.weighting_mode)
        << " delta_frac=" << full_precision(report.delta_frac) << " as_of=" << report.as_of.to_string()
        << " seed=" << report.seed << "\n";
    for (const auto& d : inputs)
        out << prefix << d.label << "=" << d.path << " fnv1a64=" << d.fnv1a64_hex << "\n";
    return out.str();
}

}  // namespace detail

inline std::string render_csv(const HealthReport& report, const std::vector<InputDigest>& inputs = {}) {
    std::ostringstream out;
    out << detail::provenance_lines(report, inputs, "# ");
    out << "rank,benchmark_id,bhi,bhi_equal_weight,s_disc,edr,rcv,edr_norm,rcv_norm,w_edr,w_rcv,delta_frac,"
           "s_as,s_sta,s_dyn,mean_score,slope_per_day,dyn_fallback,"
           "s_imp,n_usage,s_comm,i_raw,n_eligible,github_norm,huggingface_norm,tie\n";
    for (const auto& row : report.rows) {
        const auto& d = row.disc;
        const auto& s = row.sat;
        const auto& m = row.imp;
        out << row.rank << ',' << row.benchmark_id << ',' << detail::full_precision(row.bhi) << ','
            << detail::full_precision(row.bhi_ew) << ',' << detail::full_precision(d.s_disc) << ','
            << detail::full_precision(d.edr) << ',' << detail::full_precision(d.rcv) << ','
            << detail::full_precision(d.edr_norm) << ',' << detail::full_precision(d.rcv_norm) << ','
            << detail::full_precision(d.w_edr) << ',' << detail::full_precision(d.w_rcv) << ','
            << detail::full_precision(d.delta_frac) << ',' << detail::full_precision(s.s_as) << ','
            << detail::full_precision(s.s_sta) << ',' << detail::full_precision(s.s_dyn) << ','
            << detail::full_precision(s.mean_score01) << ','
            << (s.slope_per_day.has_value() ? detail::full_precision(*s.slope_per_day) : "") << ','
            << (s.dyn_fallback ? "true" : "false") << ',' << detail::full_precision(m.s_imp) << ','
            << detail::full_precision(m.n_usage) << ',' << detail::full_precision(m.s_comm) << ','
            << detail::full_precision(m.i_raw) << ',' << m.n_eligible << ','
            << detail::full_precision(m.github_norm) << ',' << detail::full_precision(m.huggingface_norm) << ','
            << (row.tie ? "true" : "false") << '\n';
    }
    return out.str();
}

/// Human-readable table: one row per benchmark with the sub-metric pairs in
/// parentheses, 4 decimal places.
inline std::string render_markdown(const HealthReport& report, const std::vector<InputDigest>& inputs = {}) {
    std::ostringstream out;
    out << "| Rank | Benchmark | S_Disc (RCV, EDR) | S_AS (S_Sta, S_Dyn) | S_Imp (N_Usage, N_Comm) | BHI |\n";
    out << "|---:|:---|:---|:---|:---|:---|\n";
    for (const auto& row : report.rows) {
        out << "| " << row.rank << " | " << row.benchmark_id << " | "
            << detail::fixed4(row.disc.s_disc) << " (" << detail::fixed4(row.disc.rcv) << ", "
            << detail::fixed4(row.disc.edr) << ") | "
            << detail::fixed4(row.sat.s_as) << " (" << detail::fixed4(row.sat.s_sta) << ", "
            << detail::fixed4(row.sat.s_dyn) << ") | "
            << detail::fixed4(row.imp.s_imp) << " (" << detail::fixed4(row.imp.n_usage) << ", "
            << detail::fixed4(row.imp.s_comm) << ") | "
            << detail::fixed4(row.bhi) << (row.tie ? " (tie)" : "") << " |\n";
    }
    out << "\nweights: discrimination " << detail::fixed4(report.weights[0]) << ", anti-saturation "
        << detail::fixed4(report.weights[1]) << ", impact " << detail::fixed4(report.weights[2])
        << " (" << to_string(report.weighting_mode) << ")\n\n";
    out << detail::provenance_lines(report, inputs, "> ");
    return out.str();
}

inline std::string render_report(const HealthReport& report, OutputFormat format,
                                 const std::vector<InputDigest>& inputs = {}) {
    switch (format) {
        case OutputFormat::json: return render_json(report, inputs);
        case OutputFormat::csv: return render_csv(report, inputs);
        case OutputFormat::markdown: return render_markdown(report, inputs);
    }
    throw Error("report", "unknown output format");
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("report", "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("report", "write failed for '" + path + "'");
}

}  // namespace bhi
